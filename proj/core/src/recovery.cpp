#include "swiptbeam/recovery.hpp"

#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "swiptbeam/hermitian.hpp"
#include "swiptbeam/metrics.hpp"

namespace swiptbeam {

RankProfile rank_profile(const std::vector<ComplexMatrix>& W) {
  RankProfile prof;
  for (const ComplexMatrix& Wk : W) {
    EigenSystem es = eig_hermitian(Wk);
    int n = static_cast<int>(es.values.size());
    double l1 = std::max(es.values[n - 1], 0.0);
    double l2 = n > 1 ? std::max(es.values[n - 2], 0.0) : 0.0;
    double tr = std::max(es.values.array().max(0.0).sum(),
                         std::numeric_limits<double>::min());
    prof.ratio.push_back(l1 > 0.0 ? l2 / l1 : 0.0);
    prof.dominant_share.push_back(l1 / tr);
  }
  return prof;
}

ComplexMatrix beam_dual_from_scalars(const ProblemInstance& inst,
                                     const DualCertificate& cert, int k) {
  const int n = inst.n_tx, K = inst.users(), M = inst.eavesdroppers();
  ComplexMatrix U = ComplexMatrix::Identity(n, n);
  U -= (cert.alpha[k] / inst.gamma_req[k]) * (inst.h[k] * inst.h[k].adjoint());
  for (int j = 0; j < K; ++j) {
    if (j != k) U += cert.alpha[j] * (inst.h[j] * inst.h[j].adjoint());
    U -= cert.beta[j] * (inst.h[j] * inst.h[j].adjoint());
  }
  for (int m = 0; m < M; ++m) {
    U -= cert.nu[m] * (inst.g[m] * inst.g[m].adjoint());
    U += inst.g[m] * cert.X[m][k] * inst.g[m].adjoint();
  }
  return U;
}

double split_from_duals(const ProblemInstance& inst, const DualCertificate& cert,
                        int k) {
  double a = cert.alpha[k] * inst.sigma_s_w * inst.eta;
  double b = cert.beta[k] * inst.p_min_desired_w[k];
  if (!(a > 0.0) || !(b > 0.0)) return std::numeric_limits<double>::quiet_NaN();
  return std::sqrt(a) / (std::sqrt(a) + std::sqrt(b));
}

KktReport check_kkt(const ProblemInstance& inst, const BeamformingSolution& sol,
                    const DualCertificate& cert) {
  const int K = inst.users(), M = inst.eavesdroppers();
  KktReport rep;

  for (int k = 0; k < K; ++k) {
    ComplexMatrix U = beam_dual_from_scalars(inst, cert, k);
    double scale = std::max(1.0, cert.Z[k].norm());
    rep.beam_dual_residual.push_back((U - cert.Z[k]).norm() / scale);

    // the closed form assumes both the decoding floor and the harvest floor
    // bind for user k; when either is slack its multiplier is numerical
    // dust and the split is not pinned down by this pair. Tightness is
    // judged at the implied split, so a corrupted rho cannot mask itself.
    double target = split_from_duals(inst, cert, k);
    bool tight = !std::isnan(target) && inst.p_min_desired_w[k] > 0.0;
    if (tight) {
      const ComplexVector& hk = inst.h[k];
      double own = std::real(hk.dot(sol.W[k] * hk));
      double other = std::real(hk.dot(sol.V * hk));
      for (int j = 0; j < K; ++j)
        if (j != k) other += std::real(hk.dot(sol.W[j] * hk));
      double sinr = own / (other + inst.sigma_ant_w + inst.sigma_s_w / target);
      double harv = harvested_desired(sol.W, sol.V, hk, target, inst.eta,
                                      inst.sigma_ant_w);
      tight = std::abs(sinr / inst.gamma_req[k] - 1.0) < 1e-4 &&
              std::abs(harv / inst.p_min_desired_w[k] - 1.0) < 1e-4;
    }
    rep.rho_residual.push_back(tight ? std::abs(sol.rho[k] - target) : -1.0);
  }

  // every multiplier times its constraint slack, scaled by the objective
  double scale = std::max(1.0, std::abs(sol.objective_w));
  auto track = [&](double dual, double slack) {
    rep.complementarity = std::max(rep.complementarity, std::abs(dual * slack) / scale);
  };
  double sigma_sum = inst.sigma_ant_w + inst.sigma_s_w;
  for (int k = 0; k < K; ++k) {
    const ComplexVector& hk = inst.h[k];
    double own = std::real(hk.dot(sol.W[k] * hk));
    double other = std::real(hk.dot(sol.V * hk));
    for (int j = 0; j < K; ++j)
      if (j != k) other += std::real(hk.dot(sol.W[j] * hk));
    track(cert.alpha[k], own / inst.gamma_req[k] - other - inst.sigma_ant_w -
                             inst.sigma_s_w / sol.rho[k]);
    if (inst.p_min_desired_w[k] > 0.0) {
      double harv = harvested_desired(sol.W, sol.V, hk, sol.rho[k], inst.eta,
                                      inst.sigma_ant_w);
      track(cert.beta[k], harv - inst.p_min_desired_w[k]);
    }
    track(1.0, std::real((cert.Z[k] * sol.W[k]).trace()));
  }
  for (int m = 0; m < M; ++m) {
    if (inst.p_min_roaming_w[m] > 0.0) {
      double harv = harvested_roaming(sol.W, sol.V, inst.g[m], inst.eta,
                                      inst.sigma_ant_w);
      track(cert.nu[m], harv - inst.p_min_roaming_w[m]);
    }
    int nr = static_cast<int>(inst.g[m].cols());
    ComplexMatrix Q = inst.g[m].adjoint() * sol.V * inst.g[m] +
                      sigma_sum * ComplexMatrix::Identity(nr, nr);
    for (int k = 0; k < K; ++k) {
      double xim1 = std::exp2(inst.r_eav_at(m, k)) - 1.0;
      ComplexMatrix slack =
          xim1 * Q - inst.g[m].adjoint() * sol.W[k] * inst.g[m];
      track(1.0, std::real((cert.X[m][k] * slack).trace()));
    }
  }
  track(1.0, std::real((cert.Y * sol.V).trace()));
  return rep;
}

namespace {

ComplexVector dominant_direction(const ComplexMatrix& Wk) {
  EigenSystem es = eig_hermitian(Wk);
  ComplexVector u = es.vectors.col(es.vectors.cols() - 1);
  fix_eigenvector_phase(u);
  return u;
}

// direction the certificate allows: the dominant eigenvector of W_k after
// projecting onto the null space of the beam dual
ComplexVector certified_direction(const ComplexMatrix& Wk, const ComplexMatrix& Zk) {
  double tol = 1e-7 * std::max(1.0, Zk.norm());
  ComplexMatrix N = null_space(Zk, tol);
  if (N.cols() == 0) return dominant_direction(Wk);
  EigenSystem es = eig_hermitian(ComplexMatrix(N.adjoint() * Wk * N));
  ComplexVector u = N * es.vectors.col(es.vectors.cols() - 1);
  u.normalize();
  fix_eigenvector_phase(u);
  return u;
}

}  // namespace

RecoveredBeams recover_rank_one(const ProblemInstance& inst,
                                const BeamformingSolution& sol,
                                const DualCertificate& cert, double ratio_tol) {
  if (sol.status != SolutionStatus::Optimal)
    throw std::runtime_error("recover_rank_one: no optimal solution to recover from");
  const int K = inst.users();
  RankProfile prof = rank_profile(sol.W);

  RecoveredBeams rec;
  rec.rho = sol.rho;
  rec.V = sol.V;
  bool all_dominant = true;
  for (int k = 0; k < K; ++k) {
    if (prof.ratio[k] <= ratio_tol) {
      EigenSystem es = eig_hermitian(sol.W[k]);
      int top = static_cast<int>(es.values.size()) - 1;
      ComplexVector u = es.vectors.col(top);
      fix_eigenvector_phase(u);
      rec.w.push_back(std::sqrt(std::max(es.values[top], 0.0)) * u);
      rec.method.push_back(RecoveryMethod::Dominant);
    } else {
      rec.w.emplace_back();
      rec.method.push_back(RecoveryMethod::Resolved);
      all_dominant = false;
    }
  }

  double denom = std::max(sol.objective_w, std::numeric_limits<double>::min());
  auto finish = [&]() -> RecoveredBeams& {
    rec.objective_w = std::real(rec.V.trace());
    for (const ComplexVector& wk : rec.w) rec.objective_w += wk.squaredNorm();
    rec.objective_delta_rel = (rec.objective_w - sol.objective_w) / denom;
    std::vector<ComplexMatrix> W1;
    for (const ComplexVector& wk : rec.w) W1.push_back(wk * wk.adjoint());
    rec.feasibility = verify_primal(inst, W1, rec.V, rec.rho);
    return rec;
  };

  if (all_dominant) {
    finish();
    if (rec.feasibility.feasible() && rec.objective_delta_rel <= 1e-7) return rec;
  }

  // re-solve with every beam pinned to its certified direction; the noise
  // covariance and splits readjust around the fixed directions
  std::vector<ComplexMatrix> dirs;
  for (int k = 0; k < K; ++k)
    dirs.push_back(certified_direction(sol.W[k], cert.Z[k]));
  auto [rsol, rcert] = solve_program(build_program(inst, dirs));
  if (rsol.status != SolutionStatus::Optimal) {
    std::ostringstream msg;
    msg << "recover_rank_one: directional re-solve " << to_string(rsol.status);
    throw std::runtime_error(msg.str());
  }

  for (int k = 0; k < K; ++k) {
    rec.w[k] = std::sqrt(std::max(std::real(rsol.W[k].trace()), 0.0)) *
               ComplexVector(dirs[k].col(0));
    rec.method[k] = RecoveryMethod::Resolved;
  }
  rec.V = rsol.V;
  rec.rho = rsol.rho;
  finish();
  if (!rec.feasibility.feasible()) {
    std::ostringstream msg;
    msg << "recover_rank_one: recovered solution infeasible, worst margin "
        << rec.feasibility.worst;
    throw std::runtime_error(msg.str());
  }
  // the relaxation bounds the recovered power from below; far above it the
  // construction lost optimality
  if (rec.objective_delta_rel > 1e-6) {
    std::ostringstream msg;
    msg << "recover_rank_one: recovered power exceeds the relaxation by "
        << rec.objective_delta_rel;
    throw std::runtime_error(msg.str());
  }
  return rec;
}

}  // namespace swiptbeam
