#pragma once

#include <array>
#include <compare>
#include <cstdint>
#include <string>
#include <vector>

namespace flagcalc {

inline constexpr unsigned kMaxArity = 7;
inline constexpr unsigned kMaxVertices = 15;

// One relation tuple with distinct vertex entries. Entries of unordered
// relations are kept sorted ascending, so byte equality is tuple equality.
struct Tuple {
    uint8_t len = 0;
    std::array<uint8_t, kMaxArity> v{};

    auto operator<=>(const Tuple&) const = default;

    bool contains(uint8_t x) const {
        for (unsigned i = 0; i < len; ++i)
            if (v[i] == x) return true;
        return false;
    }
    // Relabel through old->new map; caller re-sorts entries if unordered.
    Tuple mapped(const uint8_t* newlabel) const {
        Tuple t;
        t.len = len;
        for (unsigned i = 0; i < len; ++i) t.v[i] = newlabel[v[i]];
        return t;
    }
    void sort_entries() { std::sort(v.begin(), v.begin() + len); }
};

using TupleList = std::vector<Tuple>;  // sorted, duplicate-free

// Bare labeled structure: n vertices, one sorted tuple list per relation slot.
struct FlagCore {
    uint8_t n = 0;
    std::vector<TupleList> rels;

    auto operator<=>(const FlagCore&) const = default;
};

// Every tuple with distinct entries from {0..n-1}; ascending combinations when
// unordered, all arrangements when ordered.
TupleList all_tuples(unsigned n, unsigned arity, bool ordered);

// Deterministic byte encoding of (core, mark count); used as hash/map key and
// as the public canonical form once the core is canonically labeled.
std::string encode_core(const FlagCore& core, unsigned type_size);

}  // namespace flagcalc
