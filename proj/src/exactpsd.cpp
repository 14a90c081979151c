#include "flagcalc/exactpsd.hpp"

#include <algorithm>

namespace flagcalc {

namespace {

struct Elim {
    unsigned pivot;
    std::vector<std::pair<unsigned, Rational>> coeffs;  // row i gets -c * row pivot
};

// w^T (E_k ... E_1 M E_1^T ... E_k^T) w < 0 certifies v^T M v < 0 for
// v = E_1^T ... E_k^T w; each E^T applies u[pivot] -= sum c_i u[i].
std::vector<Rational> back_substitute(std::vector<Rational> u, const std::vector<Elim>& steps) {
    for (auto it = steps.rbegin(); it != steps.rend(); ++it) {
        Rational acc = 0;
        for (const auto& [i, c] : it->coeffs) acc += c * u[i];
        u[it->pivot] -= acc;
    }
    return u;
}

}  // namespace

PsdCheck check_psd(const QMat& M) {
    const unsigned n = M.n;
    if (M.a.size() != static_cast<size_t>(n) * n)
        throw std::invalid_argument("matrix storage does not match its order");
    for (unsigned i = 0; i < n; ++i)
        for (unsigned j = i + 1; j < n; ++j)
            if (M.at(i, j) != M.at(j, i)) throw std::invalid_argument("matrix is not symmetric");

    QMat W = M;
    std::vector<bool> active(n, true);
    std::vector<Elim> steps;
    unsigned remaining = n;

    while (remaining > 0) {
        unsigned p = n;
        for (unsigned i = 0; i < n; ++i)
            if (active[i] && (p == n || W.at(i, i) > W.at(p, p))) p = i;

        if (W.at(p, p) > 0) {
            Elim e{p, {}};
            const Rational d = W.at(p, p);
            for (unsigned i = 0; i < n; ++i) {
                if (!active[i] || i == p || W.at(i, p) == 0) continue;
                e.coeffs.emplace_back(i, W.at(i, p) / d);
            }
            for (const auto& [i, c] : e.coeffs)
                for (unsigned j = 0; j < n; ++j) W.at(i, j) -= c * W.at(p, j);
            steps.push_back(std::move(e));
            active[p] = false;
            --remaining;
            continue;
        }

        // every active diagonal is <= 0 now
        for (unsigned i = 0; i < n; ++i) {
            if (!active[i] || W.at(i, i) >= 0) continue;
            std::vector<Rational> w(n, Rational(0));
            w[i] = 1;
            return {false, back_substitute(std::move(w), steps)};
        }
        for (unsigned i = 0; i < n; ++i) {
            if (!active[i]) continue;
            for (unsigned j = i + 1; j < n; ++j) {
                if (!active[j] || W.at(i, j) == 0) continue;
                std::vector<Rational> w(n, Rational(0));
                w[i] = 1;
                w[j] = W.at(i, j) > 0 ? Rational(-1) : Rational(1);
                return {false, back_substitute(std::move(w), steps)};
            }
        }
        return {true, {}};  // the rest of the matrix is identically zero
    }
    return {true, {}};
}

Rational quad_form(const QMat& M, const std::vector<Rational>& v) {
    if (v.size() != M.n) throw std::invalid_argument("vector length does not match matrix order");
    Rational acc = 0;
    for (unsigned i = 0; i < M.n; ++i) {
        if (v[i] == 0) continue;
        Rational row = 0;
        for (unsigned j = 0; j < M.n; ++j) row += M.at(i, j) * v[j];
        acc += v[i] * row;
    }
    return acc;
}

}  // namespace flagcalc
