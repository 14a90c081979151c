#include "flagcalc/ipm.hpp"

#include <omp.h>

#include <Eigen/Dense>
#include <cmath>
#include <iostream>
#include <limits>

namespace flagcalc {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

struct Ent {
    int i, j;
    double v;
};

// symmetric block-diagonal matrix: dense blocks as matrices, diagonal blocks
// as plain vectors
struct Blk {
    std::vector<Eigen::MatrixXd> M;
    std::vector<Eigen::VectorXd> D;
};

class Ipm {
  public:
    struct Trouble {};

    Ipm(const SdpInstance& inst, const IpmOptions& opts) : opts_(opts) {
        nb_ = static_cast<int>(inst.blocks.size());
        m_ = static_cast<int>(inst.A.size());
        dense_.resize(nb_);
        size_.resize(nb_);
        for (int b = 0; b < nb_; ++b) {
            dense_[b] = inst.blocks[b] > 0;
            size_[b] = std::abs(inst.blocks[b]);
            ntot_ += size_[b];
        }
        A_.assign(m_, std::vector<std::vector<Ent>>(nb_));
        touches_.assign(nb_, {});
        for (int h = 0; h < m_; ++h)
            for (const auto& e : inst.A[h]) {
                if (A_[h][e.block].empty()) touches_[e.block].push_back(h);
                A_[h][e.block].push_back({e.i, e.j, e.v});
            }
        Cent_.assign(nb_, {});
        for (const auto& e : inst.C) Cent_[e.block].push_back({e.i, e.j, e.v});
        b_ = Eigen::VectorXd::Zero(m_);
        for (int h = 0; h < m_; ++h) b_[h] = inst.b[h];
        C_ = alloc();
        scatter_add(C_, Cent_, 1.0);
        has_free_ = !inst.fcoef.empty();
        if (has_free_) {
            if (inst.fcoef.size() != inst.A.size())
                throw std::invalid_argument("free variable coefficient count mismatch");
            f_ = Eigen::VectorXd::Zero(m_);
            for (int h = 0; h < m_; ++h) f_[h] = inst.fcoef[h];
            fcost_ = inst.fcost;
        }
    }

    SdpSolution run() {
        double anorm = 1.0;
        for (int h = 0; h < m_; ++h)
            for (const auto& blk : A_[h])
                for (const auto& e : blk) anorm = std::max(anorm, std::abs(e.v));
        double tau = std::max(20.0, 2.0 * std::max(b_.cwiseAbs().maxCoeff(), anorm));
        X_ = identity(tau);
        Z_ = identity(tau);
        y_ = Eigen::VectorXd::Zero(m_);

        const double bnorm = 1.0 + b_.cwiseAbs().maxCoeff();
        double cnorm = 1.0;
        for (const auto& blk : Cent_)
            for (const auto& e : blk) cnorm = std::max(cnorm, 1.0 + std::abs(e.v));

        // most accurate iterate so far, the fallback when the Schur system
        // turns numerically singular near a degenerate optimum
        double best_merit = kInf;
        Blk bX, bZ;
        Eigen::VectorXd by;
        double bc = 0;

        for (int iter = 0; iter < opts_.max_iters; ++iter) {
            Eigen::VectorXd rp = b_;
            for (int h = 0; h < m_; ++h) rp[h] -= constr_dot(h, X_);
            double rf = 0;  // dual residual of the free variable
            if (has_free_) {
                rp -= c_ * f_;
                rf = fcost_ - f_.dot(y_);
            }
            Blk Rd = C_;
            axpy(Rd, Z_, -1.0);
            add_adjoint(Rd, y_, -1.0);

            double mu = inner(X_, Z_) / ntot_;
            double pobj = inner(C_, X_) + fcost_ * c_;
            double dobj = b_.dot(y_);
            double rp_norm = rp.cwiseAbs().maxCoeff() / bnorm;
            double rd_norm = std::max(max_abs(Rd) / cnorm, std::abs(rf) / (1.0 + std::abs(fcost_)));
            double gap = std::abs(pobj - dobj) / (1.0 + std::abs(pobj) + std::abs(dobj));
            double merit = std::max({rp_norm, rd_norm, gap});
            if (merit < best_merit) {
                best_merit = merit;
                bX = X_;
                bZ = Z_;
                by = y_;
                bc = c_;
            }
            if (opts_.verbosity >= 2)
                std::cerr << "ipm iter " << iter << " mu " << mu << " pobj " << pobj << " dobj "
                          << dobj << " rp " << rp_norm << " rd " << rd_norm << "\n";
            if (opts_.verbosity >= 3) {
                std::cerr << "  block max X:";
                for (int b = 0; b < nb_; ++b)
                    std::cerr << " " << (dense_[b] ? X_.M[b].diagonal().maxCoeff()
                                                   : X_.D[b].maxCoeff());
                std::cerr << "\n";
            }
            if (rp_norm < opts_.tol && rd_norm < opts_.tol && gap < opts_.tol) break;
            if (pobj < -1e9 * bnorm && rp_norm < 1e-6)
                throw std::runtime_error(
                    "the SDP is unbounded below; the positivity assumptions admit no limit "
                    "object");

            try {
                if (mu < 1e-15) throw Trouble{};
                if (iter + 1 == opts_.max_iters) throw Trouble{};

                factor_z();

                Eigen::MatrixXd G = schur();
                Eigen::LLT<Eigen::MatrixXd> gl;
                double ridge = 0.0;
                for (int attempt = 0;; ++attempt) {
                    if (ridge > 0) G.diagonal().array() += ridge;
                    gl.compute(G);
                    if (gl.info() == Eigen::Success) break;
                    if (attempt > 6 || !(G.diagonal().maxCoeff() > 0)) throw Trouble{};
                    ridge = std::max(1e-12 * G.diagonal().maxCoeff(), ridge * 100);
                }
                auto solve = [&](const Eigen::VectorXd& rhs) {
                    Eigen::VectorXd x = gl.solve(rhs);
                    for (int r = 0; r < 2; ++r) x += gl.solve(rhs - G * x);
                    return x;
                };
                // free variable: eliminate dc from the bordered system
                //   [G f; f^T 0] [dy; dc] = [rhs; rf]
                Eigen::VectorXd w;
                double fw = 0;
                if (has_free_) {
                    w = solve(f_);
                    fw = f_.dot(w);
                    if (!(fw > 0)) throw Trouble{};
                }
                double dc = 0;
                auto directions = [&](const Eigen::VectorXd& rhs) {
                    Eigen::VectorXd dy = solve(rhs);
                    dc = 0;
                    if (has_free_) {
                        dc = (f_.dot(dy) - rf) / fw;
                        dy -= dc * w;
                    }
                    return dy;
                };

                // predictor: affine direction
                Blk XRZ = sandwich(X_, Rd);
                Eigen::VectorXd rhs(m_);
                for (int h = 0; h < m_; ++h)
                    rhs[h] = b_[h] - f_h(h) * c_ + constr_dot_general(h, XRZ);
                Eigen::VectorXd dy = directions(rhs);
                Blk dZ = Rd;
                add_adjoint(dZ, dy, -1.0);
                Blk dX = delta_x(0.0, XRZ, nullptr, dy);
                double ap = max_step(X_, dX);
                double ad = max_step(Z_, dZ);

                // corrector with Mehrotra centering
                double mu_aff = inner_shifted(X_, dX, ap, Z_, dZ, ad) / ntot_;
                double sigma = std::min(1.0, std::max(1e-12, std::pow(mu_aff / mu, 3)));
                double nu = sigma * mu;
                Blk EZ = sandwich(dX, dZ);
                for (int h = 0; h < m_; ++h)
                    rhs[h] = b_[h] - f_h(h) * c_ - nu * constr_dot_general(h, Zinv_) +
                             constr_dot_general(h, XRZ) + constr_dot_general(h, EZ);
                dy = directions(rhs);
                Blk dZ2 = Rd;
                add_adjoint(dZ2, dy, -1.0);
                Blk dX2 = delta_x(nu, XRZ, &EZ, dy);

                ap = std::min(1.0, 0.98 * max_step(X_, dX2));
                ad = std::min(1.0, 0.98 * max_step(Z_, dZ2));
                axpy(X_, dX2, ap);
                c_ += ap * dc;
                y_ += ad * dy;
                axpy(Z_, dZ2, ad);
            } catch (const Trouble&) {
                if (best_merit < opts_.accept_tol) {
                    X_ = bX;
                    Z_ = bZ;
                    y_ = by;
                    c_ = bc;
                    break;
                }
                throw std::runtime_error("interior point method did not converge");
            }
        }

        SdpSolution sol;
        sol.free_value = c_;
        sol.primal_obj = inner(C_, X_) + fcost_ * c_;
        sol.dual_obj = b_.dot(y_);
        sol.y.assign(y_.data(), y_.data() + m_);
        sol.X.resize(nb_);
        sol.Z.resize(nb_);
        for (int b = 0; b < nb_; ++b) {
            if (dense_[b]) {
                sol.X[b].assign(X_.M[b].data(), X_.M[b].data() + size_[b] * size_[b]);
                sol.Z[b].assign(Z_.M[b].data(), Z_.M[b].data() + size_[b] * size_[b]);
            } else {
                sol.X[b].assign(X_.D[b].data(), X_.D[b].data() + size_[b]);
                sol.Z[b].assign(Z_.D[b].data(), Z_.D[b].data() + size_[b]);
            }
        }
        return sol;
    }

  private:
    Blk alloc() const {
        Blk r;
        r.M.resize(nb_);
        r.D.resize(nb_);
        for (int b = 0; b < nb_; ++b) {
            if (dense_[b])
                r.M[b] = Eigen::MatrixXd::Zero(size_[b], size_[b]);
            else
                r.D[b] = Eigen::VectorXd::Zero(size_[b]);
        }
        return r;
    }

    Blk identity(double tau) const {
        Blk r = alloc();
        for (int b = 0; b < nb_; ++b) {
            if (dense_[b])
                r.M[b].diagonal().setConstant(tau);
            else
                r.D[b].setConstant(tau);
        }
        return r;
    }

    void scatter_add(Blk& out, const std::vector<std::vector<Ent>>& ent, double c) const {
        for (int b = 0; b < nb_; ++b)
            for (const auto& e : ent[b]) {
                if (dense_[b]) {
                    out.M[b](e.i, e.j) += c * e.v;
                    if (e.i != e.j) out.M[b](e.j, e.i) += c * e.v;
                } else {
                    out.D[b][e.i] += c * e.v;
                }
            }
    }

    // <A_h, S> for symmetric S
    double constr_dot(int h, const Blk& S) const {
        double acc = 0;
        for (int b = 0; b < nb_; ++b)
            for (const auto& e : A_[h][b]) {
                if (dense_[b])
                    acc += e.v * (e.i == e.j ? S.M[b](e.i, e.i) : 2.0 * S.M[b](e.i, e.j));
                else
                    acc += e.v * S.D[b][e.i];
            }
        return acc;
    }

    // tr(A_h S) for general S
    double constr_dot_general(int h, const Blk& S) const {
        double acc = 0;
        for (int b = 0; b < nb_; ++b)
            for (const auto& e : A_[h][b]) {
                if (dense_[b])
                    acc += e.v *
                           (e.i == e.j ? S.M[b](e.i, e.i) : S.M[b](e.i, e.j) + S.M[b](e.j, e.i));
                else
                    acc += e.v * S.D[b][e.i];
            }
        return acc;
    }

    void axpy(Blk& out, const Blk& in, double c) const {
        for (int b = 0; b < nb_; ++b) {
            if (dense_[b])
                out.M[b] += c * in.M[b];
            else
                out.D[b] += c * in.D[b];
        }
    }

    void add_adjoint(Blk& out, const Eigen::VectorXd& y, double c) const {
        for (int h = 0; h < m_; ++h) {
            if (y[h] == 0) continue;
            scatter_add(out, A_[h], c * y[h]);
        }
    }

    double inner(const Blk& a, const Blk& bk) const {
        double acc = 0;
        for (int b = 0; b < nb_; ++b)
            acc += dense_[b] ? a.M[b].cwiseProduct(bk.M[b]).sum() : a.D[b].dot(bk.D[b]);
        return acc;
    }

    double inner_shifted(const Blk& X, const Blk& dX, double ap, const Blk& Z, const Blk& dZ,
                         double ad) const {
        double acc = 0;
        for (int b = 0; b < nb_; ++b) {
            if (dense_[b])
                acc += (X.M[b] + ap * dX.M[b]).cwiseProduct(Z.M[b] + ad * dZ.M[b]).sum();
            else
                acc += (X.D[b] + ap * dX.D[b]).dot(Z.D[b] + ad * dZ.D[b]);
        }
        return acc;
    }

    double max_abs(const Blk& a) const {
        double acc = 0;
        for (int b = 0; b < nb_; ++b)
            acc = std::max(acc, dense_[b] ? a.M[b].cwiseAbs().maxCoeff()
                                          : a.D[b].cwiseAbs().maxCoeff());
        return acc;
    }

    void factor_z() {
        Zinv_ = alloc();
        for (int b = 0; b < nb_; ++b) {
            if (dense_[b]) {
                Eigen::LLT<Eigen::MatrixXd> llt(Z_.M[b]);
                if (llt.info() != Eigen::Success) throw Trouble{};
                Zinv_.M[b] = llt.solve(Eigen::MatrixXd::Identity(size_[b], size_[b]));
            } else {
                Zinv_.D[b] = Z_.D[b].cwiseInverse();
            }
        }
    }

    // Schur complement G_hk = tr(A_h X A_k Z^-1), blockwise
    Eigen::MatrixXd schur() const {
        Eigen::MatrixXd G = Eigen::MatrixXd::Zero(m_, m_);
        for (int b = 0; b < nb_; ++b) {
            const auto& hs = touches_[b];
            if (dense_[b]) {
                const int n = size_[b];
#pragma omp parallel for schedule(dynamic)
                for (size_t hi = 0; hi < hs.size(); ++hi) {
                    const int h = hs[hi];
                    Eigen::MatrixXd S = Eigen::MatrixXd::Zero(n, n);
                    for (const auto& e : A_[h][b]) {
                        S(e.i, e.j) += e.v;
                        if (e.i != e.j) S(e.j, e.i) += e.v;
                    }
                    Eigen::MatrixXd W = X_.M[b] * S * Zinv_.M[b];
                    for (size_t ki = 0; ki <= hi; ++ki) {
                        const int k = hs[ki];
                        double g = 0;
                        for (const auto& e : A_[k][b])
                            g += e.v * (e.i == e.j ? W(e.i, e.i) : W(e.i, e.j) + W(e.j, e.i));
                        G(h, k) += g;
                        if (h != k) G(k, h) += g;
                    }
                }
            } else {
                // diagonal block: per coordinate, a rank-one update over the
                // constraints touching it
                Eigen::VectorXd w = X_.D[b].cwiseProduct(Zinv_.D[b]);
                std::vector<std::vector<std::pair<int, double>>> cols(size_[b]);
                for (int h : hs)
                    for (const auto& e : A_[h][b]) cols[e.i].push_back({h, e.v});
                for (int i = 0; i < size_[b]; ++i)
                    for (size_t a = 0; a < cols[i].size(); ++a)
                        for (size_t c = 0; c <= a; ++c) {
                            double g = w[i] * cols[i][a].second * cols[i][c].second;
                            G(cols[i][a].first, cols[i][c].first) += g;
                            if (a != c) G(cols[i][c].first, cols[i][a].first) += g;
                        }
            }
        }
        return G;
    }

    // P * Q * Zinv blockwise, nonsymmetric result
    Blk sandwich(const Blk& P, const Blk& Q) const {
        Blk r = alloc();
        for (int b = 0; b < nb_; ++b) {
            if (dense_[b])
                r.M[b] = P.M[b] * Q.M[b] * Zinv_.M[b];
            else
                r.D[b] = P.D[b].cwiseProduct(Q.D[b]).cwiseProduct(Zinv_.D[b]);
        }
        return r;
    }

    // dX = nu Zinv - X - E Zinv - X Rd Zinv + X A*(dy) Zinv, symmetrized;
    // XRZ = X Rd Zinv precomputed, EZ = dXa dZa Zinv or null
    Blk delta_x(double nu, const Blk& XRZ, const Blk* EZ, const Eigen::VectorXd& dy) const {
        Blk S = alloc();
        add_adjoint(S, dy, 1.0);
        Blk r = alloc();
        for (int b = 0; b < nb_; ++b) {
            if (dense_[b]) {
                Eigen::MatrixXd acc = -X_.M[b] - XRZ.M[b] + X_.M[b] * S.M[b] * Zinv_.M[b];
                if (nu != 0) acc += nu * Zinv_.M[b];
                if (EZ) acc -= EZ->M[b];
                r.M[b] = 0.5 * (acc + acc.transpose());
            } else {
                Eigen::VectorXd acc =
                    -X_.D[b] - XRZ.D[b] + X_.D[b].cwiseProduct(S.D[b]).cwiseProduct(Zinv_.D[b]);
                if (nu != 0) acc += nu * Zinv_.D[b];
                if (EZ) acc -= EZ->D[b];
                r.D[b] = acc;
            }
        }
        return r;
    }

    double max_step(const Blk& P, const Blk& dP) const {
        double alpha = kInf;
        for (int b = 0; b < nb_; ++b) {
            if (dense_[b]) {
                Eigen::LLT<Eigen::MatrixXd> llt(P.M[b]);
                if (llt.info() != Eigen::Success) throw Trouble{};
                Eigen::MatrixXd L = llt.matrixL();
                Eigen::MatrixXd T1 = L.triangularView<Eigen::Lower>().solve(dP.M[b]);
                Eigen::MatrixXd T2 = L.triangularView<Eigen::Lower>().solve(T1.transpose());
                Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(T2, Eigen::EigenvaluesOnly);
                double lmin = es.eigenvalues().minCoeff();
                if (lmin < 0) alpha = std::min(alpha, -1.0 / lmin);
            } else {
                for (int i = 0; i < size_[b]; ++i)
                    if (dP.D[b][i] < 0) alpha = std::min(alpha, -P.D[b][i] / dP.D[b][i]);
            }
        }
        return std::min(1.0, alpha);
    }

    double f_h(int h) const { return has_free_ ? f_[h] : 0.0; }

    IpmOptions opts_;
    int nb_ = 0, m_ = 0, ntot_ = 0;
    std::vector<bool> dense_;
    std::vector<int> size_;
    std::vector<std::vector<std::vector<Ent>>> A_;  // [h][block]
    std::vector<std::vector<int>> touches_;         // block -> constraints in it
    std::vector<std::vector<Ent>> Cent_;
    Eigen::VectorXd b_;
    Blk C_, X_, Z_, Zinv_;
    Eigen::VectorXd y_;
    bool has_free_ = false;
    Eigen::VectorXd f_;
    double fcost_ = 0;
    double c_ = 0;
};

}  // namespace

SdpSolution ipm_solve(const SdpInstance& inst, const IpmOptions& opts) {
    if (inst.A.empty()) throw std::invalid_argument("SDP instance has no constraints");
    Ipm solver(inst, opts);
    return solver.run();
}

}  // namespace flagcalc
