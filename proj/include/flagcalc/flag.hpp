#pragma once

#include <map>
#include <string>
#include <vector>

#include "flagcalc/theory.hpp"

namespace flagcalc {

using TupleInput = std::vector<std::vector<int>>;
using RelationInput = std::map<std::string, TupleInput>;

// A flag: structure plus an ordered list of marked vertices (the ftype).
// Instances are always canonically labeled: marks occupy 0..s-1 in mark
// order, the rest is the minimum of a refinement-guided labeling search, so
// equality of flags is byte equality of cores.
class Flag {
  public:
    Flag() = default;
    Flag(const Theory& th, unsigned n, const RelationInput& rels,
         const std::vector<int>& ftype = {});

    unsigned size() const { return core_.n; }
    unsigned type_size() const { return s_; }
    const FlagCore& core() const { return core_; }
    const Theory& theory() const { return th_; }
    const std::string& key() const { return key_; }

    // Structure on the marked vertices, fully marked; empty flag when s = 0.
    Flag ftype_flag() const;
    bool same_type(const Flag& o) const;

    Flag unlabeled() const;
    // Re-mark: new_marks lists vertex ids of this flag, in the new mark order.
    Flag with_ftype(const std::vector<int>& new_marks) const;

    std::string render() const;   // human display form
    std::string literal() const;  // parseable "flag(n; rel = ...; ftype = ...)"

    bool operator==(const Flag& o) const { return s_ == o.s_ && core_ == o.core_; }
    bool operator<(const Flag& o) const { return key_ < o.key_; }

    // Internal: adopt an already validated structure (still canonicalizes).
    static Flag from_core(const Theory& th, const FlagCore& core, const std::vector<int>& marks,
                          bool check_excluded = true);
    // Internal: wrap a core that is already canonically labeled; no checks.
    static Flag adopt(const Theory& th, FlagCore canonical_core, unsigned s, std::string key);

  private:
    Theory th_;
    FlagCore core_;
    unsigned s_ = 0;
    std::string key_;
};

Flag make_flag(const Theory& th, unsigned n, const RelationInput& rels,
               const std::vector<int>& ftype = {});

bool is_isomorphic(const Flag& a, const Flag& b);

// Induced substructure on the listed vertices. Marked vertices of f that are
// kept stay marked (in f's mark order); dropping a marked vertex is an error.
Flag induced_subflag(const Flag& f, const std::vector<int>& vertices);

// Does some vertex subset of f induce the (untyped) structure e? Marks of f
// are ignored; exclusion semantics.
bool contains_induced(const Flag& f, const Flag& e);

// Partially specified structure: required tuples, forbidden tuples, the rest
// free. Not canonicalized; vertex labels are meaningful until expansion.
class Pattern {
  public:
    Pattern(const Theory& th, unsigned n, const RelationInput& required,
            const RelationInput& forbidden, const std::vector<int>& ftype = {});

    unsigned size() const { return n_; }
    unsigned type_size() const { return static_cast<unsigned>(marks_.size()); }
    const Theory& theory() const { return th_; }

    // All flags completing the pattern (free tuples arbitrary), deduplicated
    // up to isomorphism, excluded structures dropped, sorted by canonical key.
    std::vector<Flag> compatible_flags() const;
    bool matches(const Flag& f) const;

    std::string literal() const;

  private:
    friend class Theory;
    Theory th_;
    unsigned n_ = 0;
    std::vector<TupleList> required_, forbidden_;
    std::vector<int> marks_;
};

// --- internal helpers shared across modules ---

struct CanonResult {
    FlagCore core;        // canonical labeling applied
    std::string key;      // encode_core(core, s)
};

// Canonicalize a core whose marks already occupy labels 0..s-1 in mark order.
CanonResult canonicalize_core(const TheoryData& th, const FlagCore& base, unsigned s);

// Relabel so marks move to 0..s-1 (mark order), unmarked vertices follow in
// ascending old id; then canonicalize.
CanonResult canonicalize_marked(const TheoryData& th, const FlagCore& core,
                                const std::vector<int>& marks);

// Untyped induced substructure on verts (ascending relabel), not canonical.
FlagCore induce_core(const FlagCore& core, const std::vector<uint8_t>& verts);

// "flag(n; rel = tuples...; ftype = ...)" text for a core; Flag::literal in
// terms of this, also used for excluded structures inside theory serialization.
std::string core_literal(const TheoryData& th, const FlagCore& core, unsigned s);

// Inverse of Flag::literal. Tuples are digit strings when every vertex fits
// one character ("01 02") and comma separated otherwise ("10,2").
Flag parse_flag_literal(const Theory& th, const std::string& text);
// Inverse of Pattern::literal; forbidden tuples arrive as "<rel>_missing".
Pattern parse_pattern_literal(const Theory& th, const std::string& text);

// Any vertex subset inducing one of the theory's excluded cores?
bool core_contains_excluded(const TheoryData& th, const FlagCore& core);
// Same, restricted to subsets through one vertex (extension steps).
bool core_contains_excluded_via(const TheoryData& th, const FlagCore& core, uint8_t v);

}  // namespace flagcalc
