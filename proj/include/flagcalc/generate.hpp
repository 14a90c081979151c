#pragma once

#include <memory>
#include <optional>

#include "flagcalc/flag.hpp"

namespace flagcalc {

struct FlagBasis {
    Theory theory;
    unsigned n = 0;
    Flag ftype;               // fully marked; size 0 for untyped bases
    std::vector<Flag> flags;  // sorted by canonical key

    int index_of(const std::string& key) const;
    int index_of(const Flag& f) const { return index_of(f.key()); }
    size_t size() const { return flags.size(); }
    // count + digest of the canonical keys; certificates use it to pin order
    std::string checksum() const;
};

using BasisPtr = std::shared_ptr<const FlagBasis>;

// Every flag of the theory on n vertices with the given type, up to
// isomorphism, excluded-free, sorted by canonical key. Results are memoized
// process-wide. Untyped generation extends canonical parents one vertex at a
// time; typed generation marks untyped structures in every way.
BasisPtr generate(const Theory& th, unsigned n);
BasisPtr generate(const Theory& th, unsigned n, const Flag& ftype);

// Uncached reference path; parallel=false is the serial twin used to check
// the OpenMP kernels.
std::vector<Flag> generate_uncached(const Theory& th, unsigned n, const std::optional<Flag>& ftype,
                                    bool parallel);

// All fully marked flags on k vertices (one per (structure, mark order) orbit).
std::vector<Flag> generate_types(const Theory& th, unsigned k);

Flag empty_type(const Theory& th);

void clear_basis_cache();

}  // namespace flagcalc
