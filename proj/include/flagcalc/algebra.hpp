#pragma once

#include "flagcalc/generate.hpp"
#include "flagcalc/rational.hpp"

namespace flagcalc {

// Formal rational combination of the flags of one basis (fixed size + type).
struct AlgebraElement {
    BasisPtr basis;
    std::vector<Rational> coeffs;

    unsigned size() const { return basis->n; }
    const Flag& ftype() const { return basis->ftype; }
    std::string render() const;
};

AlgebraElement element_of(const Flag& f, const Rational& coeff = 1);
AlgebraElement zero_element(const Theory& th, const Flag& ftype, unsigned n);
// c * (sum of all basis flags); evaluates to c at every probability vector.
AlgebraElement constant_element(const Theory& th, const Flag& ftype, unsigned n,
                                const Rational& c);

// Induced density p(F, H): probability that a uniform extension of the marks
// of H by |F|-|type| unmarked vertices induces F. Types must agree.
Rational density(const Flag& F, const Flag& H);

AlgebraElement lift(const AlgebraElement& e, unsigned n);
AlgebraElement add(const AlgebraElement& a, const AlgebraElement& b);
AlgebraElement sub(const AlgebraElement& a, const AlgebraElement& b);
AlgebraElement scale(const AlgebraElement& a, const Rational& c);
AlgebraElement add_constant(const AlgebraElement& a, const Rational& c);

// Typed product on the smallest common extension size (n1 + n2 - |type|).
AlgebraElement multiply(const AlgebraElement& a, const AlgebraElement& b);

// Averaging over demoted marks: keeps the first r marks, integrates out the
// rest with the normalized-extension factor.
AlgebraElement project(const AlgebraElement& e, unsigned r = 0);

Rational evaluate(const AlgebraElement& e, const std::vector<Rational>& point);
bool equal_elements(const AlgebraElement& a, const AlgebraElement& b);

// Pair-density table of one type at target size N: for every untyped H of
// size N, the symmetric matrix of averaged products of the typed basis of
// size m = (N+|type|)/2. Entry (i,j) holds the coefficient of H in the
// projection of F_i * F_j; counts are stored exactly, divided by denom.
struct PairTable {
    Flag type;
    BasisPtr basis_m;
    BasisPtr basis_N;
    // per H: (i, j, count) with i <= j
    std::vector<std::vector<std::tuple<int, int, long long>>> counts;
    Integer denom;
};

PairTable sos_table(const Theory& th, const Flag& type, unsigned N, bool parallel = true);

}  // namespace flagcalc
