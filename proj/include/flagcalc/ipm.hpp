#pragma once

#include "flagcalc/sdp.hpp"

namespace flagcalc {

struct IpmOptions {
    double tol = 1e-9;
    // degenerate optima stall before tol; the best iterate is still returned
    // when its worst residual is below this
    double accept_tol = 1e-6;
    int max_iters = 200;
    int verbosity = 0;
};

// Mehrotra predictor-corrector interior point method with the HKM direction.
// Throws on non-convergence; an unbounded problem reports infeasible
// assumptions since the bound SDP is always feasible.
SdpSolution ipm_solve(const SdpInstance& inst, const IpmOptions& opts = {});

}  // namespace flagcalc
