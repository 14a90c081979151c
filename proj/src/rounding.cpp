#include "flagcalc/rounding.hpp"

#include <Eigen/Dense>
#include <optional>

#include "flagcalc/generate.hpp"

namespace flagcalc {

namespace {

Rational cf_round(double x, const Integer& maxden) {
    if (x == 0.0) return Rational(0);
    return best_rational_approx(rational_from_double(x), maxden);
}

QMat plain_round(const Eigen::MatrixXd& Qn, const Integer& denom) {
    const unsigned n = static_cast<unsigned>(Qn.rows());
    QMat q(n);
    for (unsigned i = 0; i < n; ++i)
        for (unsigned j = i; j < n; ++j) {
            Rational v = cf_round(Qn(i, j), denom);
            q.at(i, j) = v;
            q.at(j, i) = v;
        }
    return q;
}

// smallest diagonal load 2^-k (k = 60..0) restoring semidefiniteness
void repair_psd(QMat& q) {
    if (q.n == 0 || check_psd(q).psd) return;
    for (int k = 60; k >= 0; --k) {
        Rational eps = Rational(1) / Rational(Integer(1) << k);
        QMat trial = q;
        for (unsigned i = 0; i < q.n; ++i) trial.at(i, i) += eps;
        if (check_psd(trial).psd) {
            q = std::move(trial);
            return;
        }
    }
    throw std::runtime_error("rounded matrix could not be repaired to positive semidefinite");
}

// Gauss-Jordan with full pivoting: normalizing by the largest remaining
// entry keeps the reduced rows O(1), which the complement basis inherits.
// First-column pivoting can divide by a near-zero kernel coordinate and the
// blown-up basis then wrecks the conditioning of the reduced block.
void numeric_rref(Eigen::MatrixXd& K, double eps = 1e-7) {
    const long n = K.cols();
    std::vector<bool> used(n, false);
    long rank = 0;
    while (rank < K.rows()) {
        long pr = -1, pc = -1;
        double best = eps;
        for (long r = rank; r < K.rows(); ++r)
            for (long c = 0; c < n; ++c)
                if (!used[c] && std::abs(K(r, c)) > best) {
                    best = std::abs(K(r, c));
                    pr = r;
                    pc = c;
                }
        if (pr < 0) break;
        used[pc] = true;
        K.row(rank).swap(K.row(pr));
        K.row(rank) /= K(rank, pc);
        for (long r = 0; r < K.rows(); ++r)
            if (r != rank && K(r, pc) != 0.0) K.row(r) -= K(r, pc) * K.row(rank);
        ++rank;
    }
    K.conservativeResize(rank, Eigen::NoChange);
}

// exact counterpart; fills the pivot column of each surviving row
size_t exact_rref(std::vector<std::vector<Rational>>& rows, std::vector<size_t>& pivots) {
    pivots.clear();
    if (rows.empty()) return 0;
    const size_t n = rows[0].size();
    std::vector<bool> used(n, false);
    size_t rank = 0;
    while (rank < rows.size()) {
        size_t pr = 0, pc = 0;
        double best = 0;
        for (size_t r = rank; r < rows.size(); ++r)
            for (size_t c = 0; c < n; ++c)
                if (!used[c] && std::abs(to_double(rows[r][c])) > best) {
                    best = std::abs(to_double(rows[r][c]));
                    pr = r;
                    pc = c;
                }
        if (best == 0) break;
        used[pc] = true;
        std::swap(rows[rank], rows[pr]);
        Rational inv = rows[rank][pc];
        for (size_t j = 0; j < n; ++j) rows[rank][j] /= inv;
        for (size_t r = 0; r < rows.size(); ++r) {
            if (r == rank || rows[r][pc] == 0) continue;
            Rational f = rows[r][pc];
            for (size_t j = 0; j < n; ++j) rows[r][j] -= f * rows[rank][j];
        }
        pivots.push_back(pc);
        ++rank;
    }
    rows.resize(rank);
    return rank;
}

// One optimization block in reduced coordinates: Q = R^T qt R where the rows
// of R span the orthogonal complement of the rounded kernel. R is the
// identity when no kernel was detected, and empty when the whole block
// vanishes.
struct Reduced {
    unsigned n = 0;                         // original order
    std::vector<std::vector<Rational>> R;   // d x n complement basis
    std::vector<std::vector<unsigned>> colrows;  // per column: rows with a nonzero
    QMat qt;                                // rounded d x d matrix
};

void index_columns(Reduced& red) {
    red.colrows.assign(red.n, {});
    for (size_t a = 0; a < red.R.size(); ++a)
        for (unsigned col = 0; col < red.n; ++col)
            if (red.R[a][col] != 0) red.colrows[col].push_back(static_cast<unsigned>(a));
}

// Spectral split of the numeric block: eigenvectors below the threshold are
// canonicalized, rationalized entrywise and closed under exact row reduction;
// the block is then rewritten over an exact basis of the complement, so the
// rounded matrix annihilates the rounded kernel exactly.
Reduced reduce_block(const Eigen::MatrixXd& Qn, const RoundingOptions& opts) {
    Reduced red;
    red.n = static_cast<unsigned>(Qn.rows());
    const unsigned n = red.n;
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(Qn);
    long r0 = 0;
    while (r0 < n && es.eigenvalues()(r0) < opts.slack_threshold) ++r0;
    std::vector<std::vector<Rational>> K;
    std::vector<size_t> pivot;
    if (r0 > 0) {
        Eigen::MatrixXd Kn = es.eigenvectors().leftCols(r0).transpose();
        numeric_rref(Kn);
        K.assign(Kn.rows(), std::vector<Rational>(n));
        for (long i = 0; i < Kn.rows(); ++i)
            for (unsigned j = 0; j < n; ++j) K[i][j] = cf_round(Kn(i, j), opts.kernel_denom);
        exact_rref(K, pivot);
    }
    const size_t r = K.size();
    if (r >= n) {
        red.qt = QMat(0);  // the whole block rounds to zero
        index_columns(red);
        return red;
    }
    const size_t d = n - r;
    if (r == 0) {
        red.R.assign(d, std::vector<Rational>(n));
        for (size_t i = 0; i < d; ++i) red.R[i][i] = 1;
        red.qt = plain_round(Qn, opts.denom);
    } else {
        std::vector<bool> is_pivot(n, false);
        for (size_t col : pivot) is_pivot[col] = true;
        red.R.assign(d, std::vector<Rational>(n));
        size_t ri = 0;
        for (unsigned col = 0; col < n; ++col) {
            if (is_pivot[col]) continue;
            red.R[ri][col] = 1;
            for (size_t i = 0; i < r; ++i) red.R[ri][pivot[i]] = -K[i][col];
            ++ri;
        }
        Eigen::MatrixXd Rn(d, n);
        double rmax = 1.0;
        for (size_t i = 0; i < d; ++i)
            for (unsigned j = 0; j < n; ++j) {
                Rn(i, j) = to_double(red.R[i][j]);
                rmax = std::max(rmax, std::abs(Rn(i, j)));
            }
        if (rmax > 1048576.0) {  // hopeless conditioning, keep the full block
            red.R.assign(n, std::vector<Rational>(n));
            for (unsigned i = 0; i < n; ++i) red.R[i][i] = 1;
            red.qt = plain_round(Qn, opts.denom);
            repair_psd(red.qt);
            index_columns(red);
            return red;
        }
        Eigen::MatrixXd G = Rn * Rn.transpose();
        Eigen::MatrixXd Gi = G.llt().solve(Eigen::MatrixXd::Identity(d, d));
        Eigen::MatrixXd Qt = Gi * Rn * Qn * Rn.transpose() * Gi;
        Qt = (0.5 * (Qt + Qt.transpose())).eval();
        // expansion multiplies rounding error by up to d^2 rmax^2: refine the
        // grid so the expanded entries still land within 1/denom
        Integer denom_eff = opts.denom;
        for (double amp = static_cast<double>(d) * d * rmax * rmax; amp > 1; amp /= 2)
            denom_eff <<= 1;
        red.qt = plain_round(Qt, denom_eff);
    }
    repair_psd(red.qt);
    index_columns(red);
    return red;
}

// expand back to original coordinates: R^T qt R
QMat expand(const Reduced& red) {
    const unsigned n = red.n;
    const size_t d = red.R.size();
    QMat q(n);
    if (d == 0) return q;
    std::vector<std::vector<Rational>> T(d, std::vector<Rational>(n));
    for (size_t i = 0; i < d; ++i)
        for (size_t k = 0; k < d; ++k) {
            if (red.qt.at(i, k) == 0) continue;
            for (unsigned j = 0; j < n; ++j)
                if (red.R[k][j] != 0) T[i][j] += red.qt.at(i, k) * red.R[k][j];
        }
    for (unsigned a = 0; a < n; ++a)
        for (size_t i = 0; i < d; ++i) {
            if (red.R[i][a] == 0) continue;
            for (unsigned b = 0; b < n; ++b)
                if (T[i][b] != 0) q.at(a, b) += red.R[i][a] * T[i][b];
        }
    return q;
}

// pair table of flag h pushed to reduced coordinates: R M(H) R^T
QMat reduced_table(const PairTable& tab, size_t h, const Reduced& red) {
    const size_t d = red.R.size();
    QMat W(static_cast<unsigned>(d));
    if (d == 0) return W;
    const Rational den = Rational(tab.denom);
    for (const auto& [i, j, cnt] : tab.counts[h]) {
        Rational v = Rational(Integer(static_cast<long>(cnt))) / den;
        for (unsigned a : red.colrows[i])
            for (unsigned b : red.colrows[j]) W.at(a, b) += v * red.R[a][i] * red.R[b][j];
        if (i != j)
            for (unsigned a : red.colrows[j])
                for (unsigned b : red.colrows[i]) W.at(a, b) += v * red.R[a][j] * red.R[b][i];
    }
    return W;
}

// exact SOS plus assumption mass per size-N flag
std::vector<Rational> exact_mass(const SdpFormulation& f, const std::vector<QMat>& q,
                                 const std::vector<Rational>& mu) {
    const size_t m = f.basis_N->size();
    std::vector<Rational> S(m);
    for (size_t t = 0; t < f.types.size(); ++t) {
        const PairTable& tab = f.tables[t];
        const Rational den = Rational(tab.denom);
        for (size_t h = 0; h < m; ++h) {
            Rational acc = 0;
            for (const auto& [i, j, cnt] : tab.counts[h]) {
                Rational w = q[t].at(i, j) * Rational(Integer(static_cast<long>(cnt)));
                if (i != j) w *= 2;
                acc += w;
            }
            if (acc != 0) S[h] += acc / den;
        }
    }
    for (size_t r = 0; r < mu.size(); ++r) {
        if (mu[r] == 0) continue;
        for (size_t h = 0; h < m; ++h)
            if (f.rows[r].row_N.coeffs[h] != 0) S[h] += mu[r] * f.rows[r].row_N.coeffs[h];
    }
    return S;
}

Rational exact_bound(const SdpFormulation& f, const AlgebraElement& tN,
                     const std::vector<Rational>& S) {
    Rational best;
    for (size_t h = 0; h < f.basis_N->size(); ++h) {
        Rational v = f.maximize ? Rational(tN.coeffs[h] + S[h]) : Rational(tN.coeffs[h] - S[h]);
        if (h == 0 || (f.maximize ? v > best : v < best)) best = v;
    }
    return best;
}

// Gauss-Jordan solve G x = rhs over the rationals; nullopt when inconsistent,
// free variables pinned to zero.
std::optional<std::vector<Rational>> gauss_solve(std::vector<std::vector<Rational>> G,
                                                 std::vector<Rational> rhs) {
    const size_t k = G.size();
    std::vector<int> pivot_col(k, -1);
    size_t rank = 0;
    for (size_t col = 0; col < k && rank < k; ++col) {
        size_t piv = rank;
        while (piv < k && G[piv][col] == 0) ++piv;
        if (piv == k) continue;
        std::swap(G[rank], G[piv]);
        std::swap(rhs[rank], rhs[piv]);
        Rational inv = G[rank][col];
        for (size_t j = col; j < k; ++j) G[rank][j] /= inv;
        rhs[rank] /= inv;
        for (size_t r = 0; r < k; ++r) {
            if (r == rank || G[r][col] == 0) continue;
            Rational fct = G[r][col];
            for (size_t j = col; j < k; ++j) G[r][j] -= fct * G[rank][j];
            rhs[r] -= fct * rhs[rank];
        }
        pivot_col[rank] = static_cast<int>(col);
        ++rank;
    }
    for (size_t r = rank; r < k; ++r)
        if (rhs[r] != 0) return std::nullopt;
    std::vector<Rational> x(k);
    for (size_t r = 0; r < rank; ++r) x[pivot_col[r]] = rhs[r];
    return x;
}

}  // namespace

Certificate round_certificate(const SdpReport& rep, const RoundingOptions& opts,
                              const std::optional<BlowupTemplate>& construction) {
    const SdpFormulation& f = rep.form;
    if (opts.denom < 1 || opts.kernel_denom < 1 || !(opts.slack_threshold > 0))
        throw std::invalid_argument("bad rounding settings");
    if (rep.sol.X.size() != f.instance.blocks.size())
        throw std::invalid_argument("solution does not match the formulation");
    if (construction && !(construction->theory() == f.theory))
        throw std::invalid_argument("construction belongs to a different theory");

    Certificate c;
    c.theory = f.theory;
    c.N = f.N;
    c.maximize = f.maximize;
    c.target = f.target0;
    c.positives = f.positives;
    c.types = f.types;
    c.construction = construction;

    const size_t ntypes = f.types.size();
    std::vector<Reduced> red(ntypes);
    for (size_t t = 0; t < ntypes; ++t) {
        const size_t n = f.tables[t].basis_m->size();
        if (rep.sol.X[t].size() != n * n)
            throw std::invalid_argument("solution block does not match its flag basis");
        Eigen::MatrixXd Qn = Eigen::Map<const Eigen::MatrixXd>(
            rep.sol.X[t].data(), static_cast<long>(n), static_cast<long>(n));
        Qn = (0.5 * (Qn + Qn.transpose())).eval();
        red[t] = reduce_block(Qn, opts);
    }

    if (f.mu_block >= 0) {
        const auto& diag = rep.sol.X[f.mu_block];
        if (diag.size() != f.rows.size())
            throw std::invalid_argument("multiplier block does not match the assumption rows");
        for (size_t r = 0; r < f.rows.size(); ++r) {
            Rational mu = diag[r] <= 0
                              ? Rational(0)
                              : floor_to_denom(rational_from_double(diag[r]), opts.denom);
            if (mu < 0) mu = 0;
            c.mu.push_back(mu);
        }
    }

    const AlgebraElement tN = lift(c.target, f.N);
    std::vector<QMat> q_best(ntypes);
    for (size_t t = 0; t < ntypes; ++t) q_best[t] = expand(red[t]);
    std::vector<Rational> S = exact_mass(f, q_best, c.mu);
    Rational b_best = exact_bound(f, tN, S);

    // Tight flags must end with exactly zero residual for the bound to land
    // on the conjectured value: solve the least-norm exact correction of the
    // reduced matrices over those equality constraints. Failure of any step
    // (inconsistent system, lost semidefiniteness, no improvement) falls back
    // to the uncorrected rounding, which is always sound.
    [&] {
        Rational c0;
        std::vector<size_t> tight;
        if (construction) {
            c0 = construction->value(f.target0);
            AlgebraElement dens = construction->element(f.N);
            for (size_t h = 0; h < f.basis_N->size(); ++h)
                if (dens.coeffs[h] != 0) tight.push_back(h);
        } else {
            c0 = cf_round(rep.bound, opts.denom);
            const auto& slack = rep.sol.X[f.slack_block];
            for (size_t h = 0; h < f.basis_N->size(); ++h)
                if (slack[h] < opts.slack_threshold) tight.push_back(h);
        }
        if (tight.empty()) return;
        const size_t k = tight.size();
        std::vector<Rational> delta(k);
        bool all_zero = true;
        for (size_t e = 0; e < k; ++e) {
            const size_t h = tight[e];
            delta[e] = f.maximize ? Rational(c0 - tN.coeffs[h] - S[h])
                                  : Rational(tN.coeffs[h] - c0 - S[h]);
            if (delta[e] != 0) all_zero = false;
        }
        if (all_zero) return;  // already exactly tight
        // constraint rows over the upper triangles of the reduced blocks
        std::vector<size_t> offset(ntypes + 1, 0);
        for (size_t t = 0; t < ntypes; ++t) {
            const size_t d = red[t].R.size();
            offset[t + 1] = offset[t] + d * (d + 1) / 2;
        }
        const size_t cols = offset[ntypes];
        if (cols == 0) return;
        std::vector<std::vector<Rational>> A(k, std::vector<Rational>(cols));
        for (size_t e = 0; e < k; ++e)
            for (size_t t = 0; t < ntypes; ++t) {
                QMat W = reduced_table(f.tables[t], tight[e], red[t]);
                size_t idx = offset[t];
                for (unsigned a = 0; a < W.n; ++a)
                    for (unsigned b = a; b < W.n; ++b, ++idx)
                        A[e][idx] = a == b ? W.at(a, b) : Rational(2 * W.at(a, b));
            }
        std::vector<std::vector<Rational>> G(k, std::vector<Rational>(k));
        for (size_t e = 0; e < k; ++e)
            for (size_t e2 = e; e2 < k; ++e2) {
                Rational acc = 0;
                for (size_t j = 0; j < cols; ++j)
                    if (A[e][j] != 0 && A[e2][j] != 0) acc += A[e][j] * A[e2][j];
                G[e][e2] = acc;
                G[e2][e] = acc;
            }
        auto lam = gauss_solve(std::move(G), delta);
        if (!lam) return;
        std::vector<Reduced> red2 = red;
        for (size_t t = 0; t < ntypes; ++t) {
            size_t idx = offset[t];
            QMat& qt = red2[t].qt;
            for (unsigned a = 0; a < qt.n; ++a)
                for (unsigned b = a; b < qt.n; ++b, ++idx) {
                    Rational adj = 0;
                    for (size_t e = 0; e < k; ++e)
                        if ((*lam)[e] != 0 && A[e][idx] != 0) adj += (*lam)[e] * A[e][idx];
                    if (adj == 0) continue;
                    qt.at(a, b) += adj;
                    qt.at(b, a) = qt.at(a, b);
                }
            if (!check_psd(qt).psd) return;
        }
        std::vector<QMat> q2(ntypes);
        for (size_t t = 0; t < ntypes; ++t) q2[t] = expand(red2[t]);
        std::vector<Rational> S2 = exact_mass(f, q2, c.mu);
        Rational b2 = exact_bound(f, tN, S2);
        if (f.maximize ? b2 < b_best : b2 > b_best) {
            q_best = std::move(q2);
            b_best = b2;
        }
    }();

    c.q = std::move(q_best);
    c.bound = b_best;
    return c;
}

}  // namespace flagcalc
