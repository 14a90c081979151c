#pragma once

#include "flagcalc/algebra.hpp"

namespace flagcalc {

// Block-diagonal SDP in primal standard form:
//   min <C, X>  s.t.  <A_h, X> = b_h for all h,  X psd.
// Block sizes follow the SDPA convention: positive = dense symmetric,
// negative = diagonal. The instance is the numeric carrier (doubles); exact
// data stays at the flag level in SdpFormulation.
struct SparseEntry {
    int block;  // 0-based
    int i, j;   // 0-based, i <= j, symmetric off-diagonal stored once
    double v;
};

struct SdpInstance {
    std::vector<int> blocks;
    std::vector<SparseEntry> C;
    std::vector<std::vector<SparseEntry>> A;
    std::vector<double> b;
    // Optional free scalar variable (the bound): its coefficient in every
    // constraint and its objective cost. Splitting a free variable into two
    // nonnegative halves makes the optimal face unbounded and wrecks interior
    // point conditioning, so the embedded solver keeps it genuinely free;
    // SDPA export splits it because the file format has no free variables.
    std::vector<double> fcoef;
    double fcost = 0;

    int dim() const {
        int n = 0;
        for (int s : blocks) n += std::abs(s);
        return n;
    }
};

// One positivity assumption g >= 0 multiplied by a basis flag of complementary
// size; row_N is the resulting untyped density row at size N.
struct AssumptionRow {
    size_t positive;
    Flag multiplier;
    AlgebraElement row_N;
};

// Flag-level data of the bound computation
//   min c  s.t.  c - target_N - sum_t <Q_t, M_t(H)> - sum_r mu_r row_r >= 0
// coefficientwise over the untyped basis of size N, Q_t psd, mu_r >= 0.
// target_N is pre-negated for minimization problems, so internally the sense
// is always an upper bound on a maximum.
struct SdpFormulation {
    Theory theory;
    unsigned N = 0;
    bool maximize = true;
    BasisPtr basis_N;
    AlgebraElement target0;  // projected target, original sense and size
    AlgebraElement target_N;
    std::vector<AlgebraElement> positives;
    std::vector<Flag> types;
    std::vector<PairTable> tables;
    std::vector<AssumptionRow> rows;

    SdpInstance instance;
    // instance layout: blocks [0, types) are the Q blocks, then an optional
    // mu diagonal block and a slack diagonal block; the bound itself is the
    // instance's free variable
    int mu_block = -1;
    int slack_block = -1;
};

// Types with |type| = N (mod 2), |type| <= N - 2, one per underlying
// unlabeled structure, nonempty typed basis at m = (N + |type|) / 2.
std::vector<Flag> admissible_types(const Theory& th, unsigned N);

// One row per flag extending each positivity assumption to size N, duplicate
// rows and identically zero rows dropped; deterministic order. Certificates
// rely on re-deriving exactly this list.
std::vector<AssumptionRow> assumption_rows(const Theory& th,
                                           const std::vector<AlgebraElement>& positives,
                                           unsigned N);

// target and positives may live on any size <= N; typed positives are allowed
// and are multiplied by every flag of their own type at the complementary
// size. A typed target is averaged to untyped first.
SdpFormulation assemble(const Theory& th, const AlgebraElement& target, unsigned N, bool maximize,
                        const std::vector<AlgebraElement>& positives = {}, bool parallel = true);

struct SdpSolution {
    // primal block matrices, aligned with SdpInstance::blocks (diagonal
    // blocks store only the diagonal)
    std::vector<std::vector<double>> X;  // row-major per block
    std::vector<double> y;               // one per constraint
    std::vector<std::vector<double>> Z;
    double free_value = 0;  // value of the free variable, if any
    double primal_obj = 0, dual_obj = 0;
};

// Bound and solver artifacts at the flag level.
struct SdpReport {
    SdpFormulation form;
    SdpSolution sol;
    double bound = 0;  // in the original sense
};

struct SolveOptions {
    std::string solver_command;  // empty = embedded interior point solver
    int verbosity = 1;
    bool parallel = true;
};

SdpSolution solve_instance(const SdpInstance& inst, const SolveOptions& opts);
SdpReport solve_sdp(const Theory& th, const AlgebraElement& target, unsigned N, bool maximize,
                    const std::vector<AlgebraElement>& positives = {},
                    const SolveOptions& opts = {});

}  // namespace flagcalc
