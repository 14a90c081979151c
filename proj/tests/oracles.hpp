#pragma once

// Independent reference implementations used only by tests. Everything here
// avoids the library's canonical-labeling machinery on purpose: counts come
// from Burnside / brute-force minimality, isomorphism from permutation search.

#include <algorithm>
#include <cstdint>
#include <map>
#include <numeric>
#include <vector>

#include "flagcalc/flag.hpp"

namespace oracles {

using flagcalc::FlagCore;
using flagcalc::RelationSpec;
using flagcalc::Symmetry;
using flagcalc::TheoryData;
using flagcalc::Tuple;

inline std::vector<std::vector<int>> all_perms(int n) {
    std::vector<int> p(n);
    std::iota(p.begin(), p.end(), 0);
    std::vector<std::vector<int>> out;
    do out.push_back(p);
    while (std::next_permutation(p.begin(), p.end()));
    return out;
}

// Orbit count of labeled structures under S_n (x S_rels for FullSymmetry) by
// Burnside: average 2^(number of cycles of the induced action on tuple slots).
inline unsigned long long burnside_count(const std::vector<RelationSpec>& rels, Symmetry sym,
                                         int n) {
    using flagcalc::all_tuples;
    // slot universe: (relation, tuple)
    struct Slot {
        size_t rel;
        Tuple t;
    };
    std::vector<Slot> slots;
    for (size_t r = 0; r < rels.size(); ++r)
        for (const Tuple& t : all_tuples(n, rels[r].arity, rels[r].ordered))
            slots.push_back({r, t});
    auto slot_index = [&](size_t rel, const Tuple& t) {
        for (size_t i = 0; i < slots.size(); ++i)
            if (slots[i].rel == rel && slots[i].t == t) return i;
        return slots.size();
    };
    std::vector<std::vector<int>> vperms = all_perms(n);
    std::vector<std::vector<int>> rperms;
    if (sym == Symmetry::Full) {
        rperms = all_perms(static_cast<int>(rels.size()));
    } else {
        std::vector<int> id(rels.size());
        std::iota(id.begin(), id.end(), 0);
        rperms.push_back(id);
    }
    unsigned long long total = 0;
    for (const auto& rp : rperms) {
        for (const auto& vp : vperms) {
            // permutation of slots
            std::vector<size_t> img(slots.size());
            for (size_t i = 0; i < slots.size(); ++i) {
                Tuple t = slots[i].t;
                for (unsigned j = 0; j < t.len; ++j) t.v[j] = static_cast<uint8_t>(vp[t.v[j]]);
                if (!rels[slots[i].rel].ordered) t.sort_entries();
                img[i] = slot_index(rp[slots[i].rel], t);
            }
            std::vector<bool> seen(slots.size(), false);
            int cycles = 0;
            for (size_t i = 0; i < slots.size(); ++i) {
                if (seen[i]) continue;
                ++cycles;
                size_t j = i;
                while (!seen[j]) {
                    seen[j] = true;
                    j = img[j];
                }
            }
            total += 1ULL << cycles;
        }
    }
    return total / (vperms.size() * rperms.size());
}

// Brute-force graph count: minimal edge-bitmask representative per orbit.
inline unsigned long long graph_orbit_min_count(int n) {
    std::vector<std::pair<int, int>> pairs;
    for (int i = 0; i < n; ++i)
        for (int j = i + 1; j < n; ++j) pairs.emplace_back(i, j);
    const int npairs = static_cast<int>(pairs.size());
    auto pair_index = [&](int a, int b) {
        if (a > b) std::swap(a, b);
        for (int k = 0; k < npairs; ++k)
            if (pairs[k].first == a && pairs[k].second == b) return k;
        return -1;
    };
    std::vector<std::vector<int>> maps;  // per permutation: pair slot -> pair slot
    for (const auto& p : all_perms(n)) {
        std::vector<int> mp(npairs);
        for (int k = 0; k < npairs; ++k) mp[k] = pair_index(p[pairs[k].first], p[pairs[k].second]);
        maps.push_back(mp);
    }
    unsigned long long count = 0;
    const uint64_t limit = uint64_t{1} << npairs;
    for (uint64_t mask = 0; mask < limit; ++mask) {
        bool minimal = true;
        for (const auto& mp : maps) {
            uint64_t img = 0;
            for (int k = 0; k < npairs; ++k)
                if (mask & (uint64_t{1} << k)) img |= uint64_t{1} << mp[k];
            if (img < mask) {
                minimal = false;
                break;
            }
        }
        if (minimal) ++count;
    }
    return count;
}

// Typed isomorphism by exhaustive permutation search (marks map in order,
// relation slots permute under FullSymmetry).
inline bool brute_isomorphic(const TheoryData& th, const FlagCore& a, unsigned sa,
                             const FlagCore& b, unsigned sb) {
    if (a.n != b.n || sa != sb) return false;
    const int n = a.n;
    std::vector<std::vector<int>> rperms;
    if (th.symmetry == Symmetry::Full) {
        rperms = all_perms(static_cast<int>(th.relations.size()));
    } else {
        std::vector<int> id(th.relations.size());
        std::iota(id.begin(), id.end(), 0);
        rperms.push_back(id);
    }
    std::vector<int> p(n);
    std::iota(p.begin(), p.end(), 0);
    do {
        bool fixes_marks = true;
        for (unsigned i = 0; i < sa && fixes_marks; ++i)
            if (p[i] != static_cast<int>(i)) fixes_marks = false;
        if (!fixes_marks) continue;
        for (const auto& rp : rperms) {
            bool ok = true;
            for (size_t r = 0; r < th.relations.size() && ok; ++r) {
                flagcalc::TupleList mapped;
                for (const Tuple& t : a.rels[r]) {
                    Tuple m = t;
                    for (unsigned j = 0; j < m.len; ++j)
                        m.v[j] = static_cast<uint8_t>(p[t.v[j]]);
                    if (!th.relations[r].ordered) m.sort_entries();
                    mapped.push_back(m);
                }
                std::sort(mapped.begin(), mapped.end());
                if (mapped != b.rels[rp[r]]) ok = false;
            }
            if (ok) return true;
        }
    } while (std::next_permutation(p.begin(), p.end()));
    return false;
}

}  // namespace oracles
