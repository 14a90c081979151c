#include "flagcalc/algebra.hpp"

#include <omp.h>

#include <algorithm>
#include <functional>
#include <map>
#include <mutex>
#include <numeric>
#include <sstream>

namespace flagcalc {

namespace {

void require_same_theory(const AlgebraElement& a, const AlgebraElement& b) {
    if (!(a.basis->theory == b.basis->theory))
        throw std::invalid_argument("elements come from different theories");
}

void require_same_type(const AlgebraElement& a, const AlgebraElement& b) {
    require_same_theory(a, b);
    if (a.ftype().key() != b.ftype().key())
        throw std::invalid_argument("elements have different ftypes");
}

// typed canonical key of the substructure of `core` on marks+extra
std::string typed_sub_key(const TheoryData& td, const FlagCore& core,
                          const std::vector<uint8_t>& verts, unsigned s) {
    FlagCore ind = induce_core(core, verts);
    std::vector<int> marks(s);
    std::iota(marks.begin(), marks.end(), 0);
    return canonicalize_marked(td, ind, marks).key;
}

template <class F>
void for_each_subset(unsigned lo, unsigned hi, unsigned k, F&& f) {
    // k-subsets of {lo..hi-1}, passed ascending
    std::vector<uint8_t> c(k);
    if (lo + k > hi) return;
    for (unsigned i = 0; i < k; ++i) c[i] = static_cast<uint8_t>(lo + i);
    while (true) {
        f(c);
        int i = static_cast<int>(k) - 1;
        while (i >= 0 && c[i] == hi - k + i) --i;
        if (i < 0) return;
        ++c[i];
        for (unsigned j = i + 1; j < k; ++j) c[j] = c[j - 1] + 1;
    }
}

struct ProductTable {
    BasisPtr ba, bb, bn;
    std::vector<std::vector<std::tuple<int, int, long long>>> entries;  // per H
    Integer denom;
};

std::mutex table_mu;
std::map<std::string, std::shared_ptr<const ProductTable>> product_cache;

std::shared_ptr<const ProductTable> product_table(const Theory& th, const Flag& ftype, unsigned na,
                                                  unsigned nb) {
    const unsigned s = ftype.size();
    const unsigned n = na + nb - s;
    const std::string ck =
        th.state_hash() + ":" + ftype.key() + ":" + std::to_string(na) + "x" + std::to_string(nb);
    {
        std::lock_guard<std::mutex> lk(table_mu);
        auto it = product_cache.find(ck);
        if (it != product_cache.end()) return it->second;
    }
    auto tab = std::make_shared<ProductTable>();
    tab->ba = generate(th, na, ftype);
    tab->bb = generate(th, nb, ftype);
    tab->bn = generate(th, n, ftype);
    tab->denom = binomial(n - s, na - s);
    tab->entries.resize(tab->bn->size());
    const TheoryData& td = *th.data();
    for (size_t hi = 0; hi < tab->bn->size(); ++hi) {
        const Flag& H = tab->bn->flags[hi];
        std::map<std::pair<int, int>, long long> acc;
        for_each_subset(s, n, na - s, [&](const std::vector<uint8_t>& A) {
            std::vector<uint8_t> va, vb;
            for (unsigned i = 0; i < s; ++i) va.push_back(static_cast<uint8_t>(i));
            vb = va;
            va.insert(va.end(), A.begin(), A.end());
            std::vector<bool> inA(n, false);
            for (uint8_t x : A) inA[x] = true;
            for (unsigned v = s; v < n; ++v)
                if (!inA[v]) vb.push_back(static_cast<uint8_t>(v));
            int ia = tab->ba->index_of(typed_sub_key(td, H.core(), va, s));
            int ib = tab->bb->index_of(typed_sub_key(td, H.core(), vb, s));
            if (ia < 0 || ib < 0) throw std::logic_error("product table lookup failed");
            ++acc[{ia, ib}];
        });
        auto& out = tab->entries[hi];
        for (const auto& [key, cnt] : acc) out.emplace_back(key.first, key.second, cnt);
    }
    std::lock_guard<std::mutex> lk(table_mu);
    auto [it, ins] = product_cache.emplace(ck, tab);
    return it->second;
}

}  // namespace

AlgebraElement element_of(const Flag& f, const Rational& coeff) {
    AlgebraElement e;
    e.basis = generate(f.theory(), f.size(), f.ftype_flag());
    e.coeffs.assign(e.basis->size(), Rational(0));
    int idx = e.basis->index_of(f);
    if (idx < 0) throw std::logic_error("flag missing from its own basis");
    e.coeffs[idx] = coeff;
    return e;
}

AlgebraElement zero_element(const Theory& th, const Flag& ftype, unsigned n) {
    AlgebraElement e;
    e.basis = generate(th, n, ftype);
    e.coeffs.assign(e.basis->size(), Rational(0));
    return e;
}

AlgebraElement constant_element(const Theory& th, const Flag& ftype, unsigned n,
                                const Rational& c) {
    AlgebraElement e = zero_element(th, ftype, n);
    for (auto& x : e.coeffs) x = c;
    return e;
}

Rational density(const Flag& F, const Flag& H) {
    if (!F.same_type(H)) throw std::invalid_argument("density needs flags of the same type");
    if (F.size() > H.size()) throw std::invalid_argument("density needs |F| <= |H|");
    const unsigned s = F.type_size(), nf = F.size(), nh = H.size();
    const TheoryData& td = *F.theory().data();
    long long hits = 0;
    for_each_subset(s, nh, nf - s, [&](const std::vector<uint8_t>& A) {
        std::vector<uint8_t> verts;
        for (unsigned i = 0; i < s; ++i) verts.push_back(static_cast<uint8_t>(i));
        verts.insert(verts.end(), A.begin(), A.end());
        if (typed_sub_key(td, H.core(), verts, s) == F.key()) ++hits;
    });
    Rational r(Integer(static_cast<long>(hits)), binomial(nh - s, nf - s));
    r.canonicalize();
    return r;
}

AlgebraElement lift(const AlgebraElement& e, unsigned n) {
    const unsigned m = e.size(), s = e.ftype().size();
    if (n < m) throw std::invalid_argument("lift target smaller than element");
    if (n == m) return e;
    const Theory& th = e.basis->theory;
    const TheoryData& td = *th.data();
    AlgebraElement out = zero_element(th, e.ftype(), n);
    Integer denom = binomial(n - s, m - s);
    for (size_t hi = 0; hi < out.basis->size(); ++hi) {
        const Flag& H = out.basis->flags[hi];
        Rational acc(0);
        for_each_subset(s, n, m - s, [&](const std::vector<uint8_t>& A) {
            std::vector<uint8_t> verts;
            for (unsigned i = 0; i < s; ++i) verts.push_back(static_cast<uint8_t>(i));
            verts.insert(verts.end(), A.begin(), A.end());
            int idx = e.basis->index_of(typed_sub_key(td, H.core(), verts, s));
            if (idx < 0) throw std::logic_error("lift lookup failed");
            acc += e.coeffs[idx];
        });
        acc /= Rational(denom);
        out.coeffs[hi] = acc;
    }
    return out;
}

AlgebraElement add(const AlgebraElement& a, const AlgebraElement& b) {
    require_same_type(a, b);
    unsigned n = std::max(a.size(), b.size());
    AlgebraElement la = lift(a, n), lb = lift(b, n);
    for (size_t i = 0; i < la.coeffs.size(); ++i) la.coeffs[i] += lb.coeffs[i];
    return la;
}

AlgebraElement sub(const AlgebraElement& a, const AlgebraElement& b) {
    return add(a, scale(b, Rational(-1)));
}

AlgebraElement scale(const AlgebraElement& a, const Rational& c) {
    AlgebraElement out = a;
    for (auto& x : out.coeffs) x *= c;
    return out;
}

AlgebraElement add_constant(const AlgebraElement& a, const Rational& c) {
    return add(a, constant_element(a.basis->theory, a.ftype(), a.size(), c));
}

AlgebraElement multiply(const AlgebraElement& a, const AlgebraElement& b) {
    require_same_type(a, b);
    const Flag& ftype = a.ftype();
    auto tab = product_table(a.basis->theory, ftype, a.size(), b.size());
    AlgebraElement out;
    out.basis = tab->bn;
    out.coeffs.assign(out.basis->size(), Rational(0));
    for (size_t hi = 0; hi < tab->entries.size(); ++hi) {
        Rational acc(0);
        for (const auto& [ia, ib, cnt] : tab->entries[hi]) {
            if (a.coeffs[ia] == 0 || b.coeffs[ib] == 0) continue;
            acc += a.coeffs[ia] * b.coeffs[ib] * Rational(Integer(static_cast<long>(cnt)));
        }
        acc /= Rational(tab->denom);
        out.coeffs[hi] = acc;
    }
    return out;
}

AlgebraElement project(const AlgebraElement& e, unsigned r) {
    const unsigned s = e.ftype().size(), n = e.size();
    if (r > s) throw std::invalid_argument("projection target exceeds type size");
    if (r == s) return e;
    const Theory& th = e.basis->theory;
    const TheoryData& td = *th.data();
    std::vector<uint8_t> head(r);
    std::iota(head.begin(), head.end(), 0);
    std::vector<int> idmarks(r);
    std::iota(idmarks.begin(), idmarks.end(), 0);
    Flag tau = Flag::from_core(th, induce_core(e.ftype().core(), head), idmarks, false);
    AlgebraElement out = zero_element(th, tau, n);
    Integer total = falling_factorial(n - r, s - r);
    for (size_t fi = 0; fi < e.basis->size(); ++fi) {
        if (e.coeffs[fi] == 0) continue;
        const Flag& F = e.basis->flags[fi];
        CanonResult demoted = canonicalize_marked(td, F.core(), idmarks);
        int idx = out.basis->index_of(demoted.key);
        if (idx < 0) throw std::logic_error("projection lookup failed");
        // how many re-markings of the demoted flag give back F
        long long hits = 0;
        std::vector<int> marks(idmarks.begin(), idmarks.end());
        marks.resize(s);
        std::vector<bool> used(n, false);
        std::function<void(unsigned)> rec = [&](unsigned pos) {
            if (pos == s) {
                if (canonicalize_marked(td, demoted.core, marks).key == F.key()) ++hits;
                return;
            }
            for (unsigned v = r; v < n; ++v) {
                if (used[v]) continue;
                used[v] = true;
                marks[pos] = static_cast<int>(v);
                rec(pos + 1);
                used[v] = false;
            }
        };
        rec(r);
        Rational q(Integer(static_cast<long>(hits)), total);
        q.canonicalize();
        out.coeffs[idx] += e.coeffs[fi] * q;
    }
    return out;
}

Rational evaluate(const AlgebraElement& e, const std::vector<Rational>& point) {
    if (point.size() != e.coeffs.size())
        throw std::invalid_argument("evaluation point has wrong dimension");
    Rational acc(0);
    for (size_t i = 0; i < point.size(); ++i) acc += e.coeffs[i] * point[i];
    return acc;
}

bool equal_elements(const AlgebraElement& a, const AlgebraElement& b) {
    if (!(a.basis->theory == b.basis->theory)) return false;
    if (a.ftype().key() != b.ftype().key()) return false;
    unsigned n = std::max(a.size(), b.size());
    AlgebraElement la = lift(a, n), lb = lift(b, n);
    return la.coeffs == lb.coeffs;
}

std::string AlgebraElement::render() const {
    std::ostringstream os;
    os << "Element over " << basis->theory.name() << ", size " << basis->n << ", type "
       << (basis->ftype.size() ? basis->ftype.literal() : "()") << ":\n";
    for (size_t i = 0; i < coeffs.size(); ++i)
        os << "  " << rational_to_string(coeffs[i]) << "\t" << basis->flags[i].literal() << "\n";
    return os.str();
}

PairTable sos_table(const Theory& th, const Flag& type, unsigned N, bool parallel) {
    const unsigned s = type.size();
    if (type.type_size() != s) throw std::invalid_argument("type flag must be fully marked");
    if (N < s || (N - s) % 2 != 0)
        throw std::invalid_argument("type size and target size have mismatched parity");
    const unsigned m = (N + s) / 2;
    PairTable tab;
    tab.type = type;
    tab.basis_m = generate(th, m, type);
    tab.basis_N = generate(th, N);
    tab.denom = falling_factorial(N, s) * binomial(N - s, m - s);
    tab.counts.resize(tab.basis_N->size());
    const TheoryData& td = *th.data();

    auto handle = [&](size_t hi) {
        const Flag& H = tab.basis_N->flags[hi];
        std::map<std::pair<int, int>, long long> acc;
        std::vector<uint8_t> theta(s);
        std::vector<bool> used(N, false);
        std::function<void(unsigned)> rec = [&](unsigned pos) {
            if (pos == s) {
                if (typed_sub_key(td, H.core(), theta, s) != type.key()) return;
                for_each_subset(0, N, m - s, [&](const std::vector<uint8_t>& raw) {
                    // raw picks unmarked vertices: skip sets touching theta
                    for (uint8_t x : raw)
                        if (used[x]) return;
                    std::vector<uint8_t> va(theta.begin(), theta.end());
                    va.insert(va.end(), raw.begin(), raw.end());
                    std::vector<uint8_t> vb(theta.begin(), theta.end());
                    for (unsigned v = 0; v < N; ++v) {
                        if (used[v]) continue;
                        bool in_raw = false;
                        for (uint8_t x : raw)
                            if (x == v) in_raw = true;
                        if (!in_raw) vb.push_back(static_cast<uint8_t>(v));
                    }
                    int ia = tab.basis_m->index_of(typed_sub_key(td, H.core(), va, s));
                    int ib = tab.basis_m->index_of(typed_sub_key(td, H.core(), vb, s));
                    if (ia < 0 || ib < 0) throw std::logic_error("pair table lookup failed");
                    if (ia <= ib) ++acc[{ia, ib}];
                });
                return;
            }
            for (unsigned v = 0; v < N; ++v) {
                if (used[v]) continue;
                used[v] = true;
                theta[pos] = static_cast<uint8_t>(v);
                rec(pos + 1);
                used[v] = false;
            }
        };
        rec(0);
        auto& out = tab.counts[hi];
        for (const auto& [key, cnt] : acc) out.emplace_back(key.first, key.second, cnt);
    };

    if (parallel) {
#pragma omp parallel for schedule(dynamic)
        for (size_t hi = 0; hi < tab.basis_N->size(); ++hi) handle(hi);
    } else {
        for (size_t hi = 0; hi < tab.basis_N->size(); ++hi) handle(hi);
    }
    return tab;
}

}  // namespace flagcalc
