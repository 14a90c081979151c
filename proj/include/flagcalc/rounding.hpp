#pragma once

#include "flagcalc/certificate.hpp"

namespace flagcalc {

struct RoundingOptions {
    // max denominator for matrix entries and multipliers
    Integer denom = 1024;
    // eigenvalues of a numeric Q below this count as kernel directions
    double slack_threshold = 1e-6;
    // max denominator when rationalizing kernel vectors
    Integer kernel_denom = 1024;
};

// Exact certificate from a numeric solve. The near-kernel of each numeric
// matrix is rationalized (denominator <= kernel_denom) and the matrix is
// rewritten over an exact basis of the complement; entries are then rounded
// to the best rationals with denominator <= denom (refined by the basis
// conditioning) and a failed PSD check is repaired by the smallest diagonal
// load 2^-k that restores it. Finally the flags that should be tight (the
// support of the construction, or the flags with vanishing numeric slack
// against the continued-fraction bound) get their residuals zeroed exactly by
// a least-norm correction of the reduced matrices; if any step of that fails
// the uncorrected rounding stands. The claimed bound is always recomputed
// from the rounded data, never taken from the solver, so the result is a
// valid certificate whenever it verifies; only its sharpness is at stake.
Certificate round_certificate(const SdpReport& rep, const RoundingOptions& opts = {},
                              const std::optional<BlowupTemplate>& construction = std::nullopt);

}  // namespace flagcalc
