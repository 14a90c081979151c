#pragma once

#include "flagcalc/algebra.hpp"

namespace flagcalc {

// Blow-up limit object of a weighted template. Sampled vertices draw a part
// independently by weight; a tuple of distinct vertices is present when its
// part pattern is listed as deterministic, and independently with the given
// probability when listed as random. Unordered patterns are multisets.
class BlowupTemplate {
  public:
    using DetInput = std::map<std::string, std::vector<std::vector<int>>>;
    using RandomInput = std::map<std::string, std::vector<std::pair<std::vector<int>, Rational>>>;

    BlowupTemplate(const Theory& th, std::vector<Rational> weights, const DetInput& det,
                   const RandomInput& random = {});
    static BlowupTemplate equal_parts(const Theory& th, unsigned parts, const DetInput& det,
                                      const RandomInput& random = {});

    const Theory& theory() const { return th_; }
    unsigned parts() const { return static_cast<unsigned>(weights_.size()); }
    const std::vector<Rational>& weights() const { return weights_; }

    // Exact densities of every flag of the untyped basis of size N. Errors
    // out when the blow-up puts positive mass on an excluded structure.
    AlgebraElement element(unsigned N) const;
    Rational density(const Flag& f) const;
    // Value of e in the limit; typed elements are averaged first.
    Rational value(const AlgebraElement& e) const;

    std::string literal() const;

  private:
    struct RandPat {
        std::vector<int> pat;
        Rational prob;
    };

    Theory th_;
    std::vector<Rational> weights_;
    std::vector<std::vector<std::vector<int>>> det_;  // per relation, sorted patterns
    std::vector<std::vector<RandPat>> random_;
};

// Inverse of BlowupTemplate::literal. "parts = 3" is also accepted and means
// three equal parts.
BlowupTemplate parse_blowup_literal(const Theory& th, const std::string& text);

}  // namespace flagcalc
