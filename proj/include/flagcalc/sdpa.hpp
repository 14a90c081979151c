#pragma once

#include <iosfwd>

#include "flagcalc/sdp.hpp"

namespace flagcalc {

// Rewrites a free variable as the difference of two nonnegative diagonal
// entries in a trailing size-2 block; identity when there is none.
SdpInstance split_free(const SdpInstance& inst);

// Sparse SDPA export of min <C, X> s.t. <A_h, X> = b_h: the file holds
// F_0 = -C, F_h = A_h and cost vector b, so file conventions (CSDP-style
// solutions) map back as X_ours = X_file and y_ours = -y_file. A free
// variable is split first. Output is deterministic: sorted entries,
// shortest round-tripping decimals.
void write_sdpa(std::ostream& os, const SdpInstance& inst);
std::string sdpa_string(const SdpInstance& inst);
SdpInstance read_sdpa(std::istream& is);

// CSDP-convention solution files: first line y_file, then quintuples
// "mat block i j value" with mat 1 = Z_file, mat 2 = X_file (1-based).
void write_sol(std::ostream& os, const SdpInstance& inst, const SdpSolution& sol);
SdpSolution read_sol(std::istream& is, const SdpInstance& inst);

}  // namespace flagcalc
