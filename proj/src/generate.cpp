#include "flagcalc/generate.hpp"

#include <omp.h>

#include <algorithm>
#include <functional>
#include <map>
#include <mutex>
#include <numeric>

#include "flagcalc/digest.hpp"

namespace flagcalc {

int FlagBasis::index_of(const std::string& key) const {
    auto it = std::lower_bound(flags.begin(), flags.end(), key,
                               [](const Flag& f, const std::string& k) { return f.key() < k; });
    if (it == flags.end() || it->key() != key) return -1;
    return static_cast<int>(it - flags.begin());
}

std::string FlagBasis::checksum() const {
    std::string cat;
    for (const Flag& f : flags) cat += f.key();
    return std::to_string(flags.size()) + ":" + sha256_hex(cat).substr(0, 16);
}

Flag empty_type(const Theory& th) {
    FlagCore core;
    core.n = 0;
    core.rels.resize(th.relations().size());
    return Flag::from_core(th, core, {}, false);
}

namespace {

std::mutex cache_mu;
std::map<std::string, BasisPtr> basis_cache;

std::string cache_key(const Theory& th, unsigned n, const std::string& ftype_key) {
    return th.state_hash() + ":" + std::to_string(n) + ":" + ftype_key;
}

// One-vertex extensions of a single parent; canonical forms land in `sink`.
void extend_parent(const Theory& th, const FlagCore& parent,
                   std::map<std::string, FlagCore>& sink) {
    const TheoryData& td = *th.data();
    const unsigned n = parent.n + 1;
    const uint8_t fresh = parent.n;
    struct Cand {
        size_t slot;
        Tuple t;
    };
    std::vector<Cand> cands;
    for (size_t r = 0; r < td.relations.size(); ++r)
        for (const Tuple& t : all_tuples(n, td.relations[r].arity, td.relations[r].ordered))
            if (t.contains(fresh)) cands.push_back({r, t});
    if (cands.size() > 24) throw std::runtime_error("extension space too large");
    for (uint64_t mask = 0; mask < (uint64_t{1} << cands.size()); ++mask) {
        FlagCore core;
        core.n = static_cast<uint8_t>(n);
        core.rels = parent.rels;
        for (size_t i = 0; i < cands.size(); ++i)
            if (mask & (uint64_t{1} << i)) core.rels[cands[i].slot].push_back(cands[i].t);
        for (auto& lst : core.rels) std::sort(lst.begin(), lst.end());
        if (td.max_excluded_size > 0 && core_contains_excluded_via(td, core, fresh)) continue;
        CanonResult cr = canonicalize_core(td, core, 0);
        sink.emplace(std::move(cr.key), std::move(cr.core));
    }
}

std::vector<FlagCore> untyped_level(const Theory& th, const std::vector<FlagCore>& parents,
                                    bool parallel) {
    std::map<std::string, FlagCore> merged;
    if (parallel) {
        int nt = omp_get_max_threads();
        std::vector<std::map<std::string, FlagCore>> local(nt);
#pragma omp parallel for schedule(dynamic)
        for (size_t p = 0; p < parents.size(); ++p)
            extend_parent(th, parents[p], local[omp_get_thread_num()]);
        for (auto& m : local)
            for (auto& [k, c] : m) merged.emplace(std::move(k), std::move(c));
    } else {
        for (const FlagCore& p : parents) extend_parent(th, p, merged);
    }
    std::vector<FlagCore> out;
    out.reserve(merged.size());
    for (auto& [k, c] : merged) out.push_back(std::move(c));
    return out;
}

std::vector<Flag> gen_untyped(const Theory& th, unsigned n, bool parallel, bool use_cache);
BasisPtr cached_basis(const Theory& th, unsigned n, const std::optional<Flag>& ftype);

std::vector<Flag> gen_typed(const Theory& th, unsigned n, const Flag& ftype, bool parallel,
                            bool use_cache) {
    const unsigned s = ftype.size();
    if (ftype.type_size() != s) throw std::invalid_argument("ftype flag must be fully marked");
    if (s > n) throw std::invalid_argument("type larger than flag size");
    const TheoryData& td = *th.data();
    std::vector<Flag> base = use_cache ? cached_basis(th, n, std::nullopt)->flags
                                       : gen_untyped(th, n, parallel, false);

    std::map<std::string, FlagCore> merged;
    auto handle = [&](const Flag& h, std::map<std::string, FlagCore>& sink) {
        // all injective mark tuples, kept when they induce the wanted type
        std::vector<int> idx(n);
        std::iota(idx.begin(), idx.end(), 0);
        std::vector<uint8_t> theta(s);
        std::vector<bool> used(n, false);
        std::vector<int> stack;
        std::function<void()> rec = [&]() {
            if (stack.size() == s) {
                for (unsigned i = 0; i < s; ++i) theta[i] = static_cast<uint8_t>(stack[i]);
                FlagCore ind = induce_core(h.core(), theta);
                std::vector<int> idmarks(s);
                std::iota(idmarks.begin(), idmarks.end(), 0);
                if (canonicalize_marked(td, ind, idmarks).key != ftype.key()) return;
                std::vector<int> marks(stack.begin(), stack.end());
                CanonResult cr = canonicalize_marked(td, h.core(), marks);
                sink.emplace(std::move(cr.key), std::move(cr.core));
                return;
            }
            for (unsigned v = 0; v < n; ++v) {
                if (used[v]) continue;
                used[v] = true;
                stack.push_back(static_cast<int>(v));
                rec();
                stack.pop_back();
                used[v] = false;
            }
        };
        rec();
    };
    if (parallel) {
        int nt = omp_get_max_threads();
        std::vector<std::map<std::string, FlagCore>> local(nt);
#pragma omp parallel for schedule(dynamic)
        for (size_t i = 0; i < base.size(); ++i) handle(base[i], local[omp_get_thread_num()]);
        for (auto& m : local)
            for (auto& [k, c] : m) merged.emplace(std::move(k), std::move(c));
    } else {
        for (const Flag& h : base) handle(h, merged);
    }
    std::vector<Flag> out;
    out.reserve(merged.size());
    for (auto& [k, c] : merged) out.push_back(Flag::adopt(th, std::move(c), s, k));
    return out;
}

std::vector<Flag> gen_untyped(const Theory& th, unsigned n, bool parallel, bool use_cache) {
    std::vector<FlagCore> level;
    if (n == 0) {
        FlagCore empty;
        empty.n = 0;
        empty.rels.resize(th.relations().size());
        level.push_back(empty);
    } else {
        std::vector<FlagCore> parents;
        if (use_cache) {
            for (const Flag& f : cached_basis(th, n - 1, std::nullopt)->flags)
                parents.push_back(f.core());
        } else {
            for (const Flag& f : gen_untyped(th, n - 1, parallel, false))
                parents.push_back(f.core());
        }
        level = untyped_level(th, parents, parallel);
    }
    std::vector<Flag> out;
    out.reserve(level.size());
    for (FlagCore& c : level) {
        std::string key = encode_core(c, 0);
        out.push_back(Flag::adopt(th, std::move(c), 0, std::move(key)));
    }
    std::sort(out.begin(), out.end());
    return out;
}

BasisPtr cached_basis(const Theory& th, unsigned n, const std::optional<Flag>& ftype) {
    const std::string fkey = ftype ? ftype->key() : std::string();
    const std::string ck = cache_key(th, n, fkey);
    {
        std::lock_guard<std::mutex> lk(cache_mu);
        auto it = basis_cache.find(ck);
        if (it != basis_cache.end()) return it->second;
    }
    auto basis = std::make_shared<FlagBasis>();
    basis->theory = th;
    basis->n = n;
    basis->ftype = ftype ? *ftype : empty_type(th);
    basis->flags = ftype ? gen_typed(th, n, *ftype, true, true) : gen_untyped(th, n, true, true);
    std::lock_guard<std::mutex> lk(cache_mu);
    auto [it, inserted] = basis_cache.emplace(ck, basis);
    return it->second;
}

}  // namespace

BasisPtr generate(const Theory& th, unsigned n) { return cached_basis(th, n, std::nullopt); }

BasisPtr generate(const Theory& th, unsigned n, const Flag& ftype) {
    return cached_basis(th, n, ftype);
}

std::vector<Flag> generate_uncached(const Theory& th, unsigned n, const std::optional<Flag>& ftype,
                                    bool parallel) {
    return ftype ? gen_typed(th, n, *ftype, parallel, false)
                 : gen_untyped(th, n, parallel, false);
}

std::vector<Flag> generate_types(const Theory& th, unsigned k) {
    const TheoryData& td = *th.data();
    std::vector<Flag> base = generate(th, k)->flags;
    std::map<std::string, FlagCore> merged;
    std::vector<int> perm(k);
    for (const Flag& h : base) {
        std::iota(perm.begin(), perm.end(), 0);
        do {
            CanonResult cr = canonicalize_marked(td, h.core(), perm);
            merged.emplace(std::move(cr.key), std::move(cr.core));
        } while (std::next_permutation(perm.begin(), perm.end()));
    }
    std::vector<Flag> out;
    out.reserve(merged.size());
    for (auto& [key, c] : merged) out.push_back(Flag::adopt(th, std::move(c), k, key));
    return out;
}

void clear_basis_cache() {
    std::lock_guard<std::mutex> lk(cache_mu);
    basis_cache.clear();
}

}  // namespace flagcalc
