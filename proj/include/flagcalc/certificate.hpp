#pragma once

#include <iosfwd>
#include <optional>

#include "flagcalc/blowup.hpp"
#include "flagcalc/exactpsd.hpp"
#include "flagcalc/sdp.hpp"

namespace flagcalc {

// Self-contained exact proof of a density bound. The verifier re-derives
// every enumeration (bases, pair tables, assumption rows) from the theory
// block; checksums in the text only catch mismatches early with a clear
// message instead of an opaque residual failure.
struct Certificate {
    Theory theory;
    unsigned N = 0;
    bool maximize = true;
    Rational bound;
    AlgebraElement target;  // untyped, original sense, size <= N
    std::vector<AlgebraElement> positives;
    std::vector<Flag> types;  // fully marked type flags
    std::vector<QMat> q;      // one PSD matrix per type, on the basis at (N+s)/2
    std::vector<Rational> mu;  // multipliers, aligned with assumption_rows()
    std::optional<BlowupTemplate> construction;  // matching lower bound, if any
};

void write_certificate(std::ostream& os, const Certificate& c);
Certificate read_certificate(std::istream& is);  // throws with line numbers

struct VerifyReport {
    bool ok = false;
    std::string failure;             // first failed check, empty when ok
    std::vector<std::string> notes;  // human readable check trail
    Rational slack_min;              // min over size-N flags of the residual
    std::optional<Rational> construction_value;
    bool tight = false;  // construction value equals the bound exactly
};

// Exact verification: every type matrix is PSD, every multiplier is
// nonnegative, and for every flag H of size N the residual of the bound
// after subtracting target, sum-of-squares and assumption mass is
// nonnegative. Never throws on a bad certificate; the failure field carries
// the first broken check.
VerifyReport verify_certificate(const Certificate& c, bool parallel = true);

}  // namespace flagcalc
