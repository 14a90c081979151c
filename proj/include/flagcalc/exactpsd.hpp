#pragma once

#include "flagcalc/rational.hpp"

namespace flagcalc {

// Dense symmetric rational matrix, row-major.
struct QMat {
    unsigned n = 0;
    std::vector<Rational> a;

    QMat() = default;
    explicit QMat(unsigned n_) : n(n_), a(static_cast<size_t>(n_) * n_) {}
    Rational& at(unsigned i, unsigned j) { return a[static_cast<size_t>(i) * n + j]; }
    const Rational& at(unsigned i, unsigned j) const {
        return a[static_cast<size_t>(i) * n + j];
    }
};

struct PsdCheck {
    bool psd = true;
    std::vector<Rational> witness;  // when not psd: w with w^T M w < 0
};

// Exact positive semidefiniteness via LDL^T with greatest-diagonal pivoting.
// Stops at the first sign violation and back-substitutes an explicit
// negativity witness through the recorded eliminations.
PsdCheck check_psd(const QMat& M);

Rational quad_form(const QMat& M, const std::vector<Rational>& v);

}  // namespace flagcalc
