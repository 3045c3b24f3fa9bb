#include "swiptbeam/cone/solver.hpp"

#include <Eigen/Cholesky>
#include <cstdio>
#include <stdexcept>
#include <vector>

namespace swiptbeam::cone {

void Problem::validate() const {
  if (G.rows() != static_cast<Eigen::Index>(dims.total()))
    throw std::invalid_argument("cone::Problem: G row count does not match cone dimensions");
  if (h.size() != G.rows()) throw std::invalid_argument("cone::Problem: h length does not match G");
  if (c.size() != G.cols()) throw std::invalid_argument("cone::Problem: c length does not match G");
}

const char* to_string(SolveStatus status) {
  switch (status) {
    case SolveStatus::Optimal: return "optimal";
    case SolveStatus::PrimalInfeasible: return "primal_infeasible";
    case SolveStatus::DualInfeasible: return "dual_infeasible";
    case SolveStatus::MaxIterations: return "max_iterations";
    case SolveStatus::NumericalError: return "numerical_error";
  }
  return "unknown";
}

namespace {

using SpMat = Eigen::SparseMatrix<double>;

struct Slab {
  enum Kind { Orthant, Soc, Psd } kind;
  int index;  // cone index within its kind
  int row0, nrows;
  std::vector<int> cols;
  MatrixXd Gd;
  MatrixXd B;  // W^{-T} Gd for the current scaling, refreshed per factorization
};

class Ipm {
 public:
  Ipm(const Problem& prob, const Settings& cfg)
      : orig_(prob), cfg_(cfg), ops_(prob.dims), m_(prob.dims.total()),
        n_(static_cast<int>(prob.G.cols())) {
    scale_data();
    build_slabs();
  }

  Result run();

 private:
  void scale_data();
  void build_slabs();
  void assemble_kkt(const Scaling& sc);
  // Solves G'pz = ux, G px - W'W pz = uz for the current factorization.
  void solve_reduced(const Scaling& sc, const VectorXd& ux, const VectorXd& uz,
                     VectorXd& px, VectorXd& pz) const;
  // y = sum_b B_b x(cols_b), the half-scaled product W^{-T} G x
  VectorXd apply_B(const VectorXd& x) const {
    VectorXd y = VectorXd::Zero(m_);
    for (const Slab& slab : slabs_) {
      VectorXd xs(slab.cols.size());
      for (size_t a = 0; a < slab.cols.size(); ++a) xs[a] = x[slab.cols[a]];
      y.segment(slab.row0, slab.nrows).noalias() += slab.B * xs;
    }
    return y;
  }
  VectorXd apply_Bt(const VectorXd& y) const {
    VectorXd x = VectorXd::Zero(n_);
    for (const Slab& slab : slabs_) {
      VectorXd xs = slab.B.transpose() * y.segment(slab.row0, slab.nrows);
      for (size_t a = 0; a < slab.cols.size(); ++a) x[slab.cols[a]] += xs[a];
    }
    return x;
  }

  struct Direction {
    VectorXd x, z, s;
    VectorXd s_scaled, z_scaled;  // W^{-T} ds, W dz
    double tau = 0.0, kappa = 0.0;
  };
  bool compute_direction(const Scaling& sc, double eta, const VectorXd& ds,
                         double dkappa, Direction& dir) const;

  const Problem& orig_;
  Settings cfg_;
  ConeOps ops_;
  int m_, n_;

  // equilibrated data
  SpMat G_;
  VectorXd h_, c_;
  VectorXd row_scale_, col_scale_;
  double sigma_h_ = 1.0, sigma_c_ = 1.0;

  std::vector<Slab> slabs_;
  MatrixXd P_;
  Eigen::LLT<MatrixXd> llt_;

  // iterate
  VectorXd x_, s_, z_;
  double tau_ = 1.0, kappa_ = 1.0;
  bool best_acceptable_ = false;
  VectorXd rx_, rz_;
  double rtau_ = 0.0;
  VectorXd x1_, z1_;  // solution for rhs (-c, h), reused by both direction solves
};

void Ipm::scale_data() {
  row_scale_ = VectorXd::Ones(m_);
  col_scale_ = VectorXd::Ones(n_);

  // row -> equilibration group: one group per orthant row, one per cone block
  std::vector<int> group(m_);
  int g = 0;
  for (int i = 0; i < orig_.dims.nonneg; ++i) group[i] = g++;
  int off = orig_.dims.nonneg;
  for (int q : orig_.dims.soc) {
    for (int i = 0; i < q; ++i) group[off + i] = g;
    ++g;
    off += q;
  }
  for (int p : orig_.dims.psd) {
    int len = svec_len(p);
    for (int i = 0; i < len; ++i) group[off + i] = g;
    ++g;
    off += len;
  }
  int ngroups = g;

  if (cfg_.equilibrate) {
    for (int pass = 0; pass < cfg_.equilibrate_passes; ++pass) {
      VectorXd colmax = VectorXd::Zero(n_);
      for (int j = 0; j < n_; ++j)
        for (SpMat::InnerIterator it(orig_.G, j); it; ++it)
          colmax[j] = std::max(colmax[j], std::abs(it.value()) * row_scale_[it.row()] * col_scale_[j]);
      for (int j = 0; j < n_; ++j)
        if (colmax[j] > 0.0) col_scale_[j] /= std::sqrt(colmax[j]);

      VectorXd gmax = VectorXd::Zero(ngroups);
      for (int j = 0; j < n_; ++j)
        for (SpMat::InnerIterator it(orig_.G, j); it; ++it) {
          int r = static_cast<int>(it.row());
          gmax[group[r]] = std::max(gmax[group[r]], std::abs(it.value()) * row_scale_[r] * col_scale_[j]);
        }
      for (int i = 0; i < m_; ++i)
        if (gmax[group[i]] > 0.0) row_scale_[i] /= std::sqrt(gmax[group[i]]);
    }
  }

  G_ = row_scale_.asDiagonal() * orig_.G * col_scale_.asDiagonal();
  G_.makeCompressed();
  VectorXd hs = row_scale_.asDiagonal() * orig_.h;
  VectorXd cs = col_scale_.asDiagonal() * orig_.c;
  sigma_h_ = 1.0 / std::max(1.0, hs.lpNorm<Eigen::Infinity>());
  sigma_c_ = 1.0 / std::max(1.0, cs.lpNorm<Eigen::Infinity>());
  h_ = sigma_h_ * hs;
  c_ = sigma_c_ * cs;
}

void Ipm::build_slabs() {
  std::vector<int> block_of_row(m_);
  std::vector<std::pair<Slab::Kind, int>> block_kind;
  std::vector<int> block_row0, block_rows;
  auto add_block = [&](Slab::Kind k, int idx, int row0, int rows) {
    int b = static_cast<int>(block_kind.size());
    block_kind.push_back({k, idx});
    block_row0.push_back(row0);
    block_rows.push_back(rows);
    for (int i = 0; i < rows; ++i) block_of_row[row0 + i] = b;
  };
  if (orig_.dims.nonneg > 0) add_block(Slab::Orthant, 0, 0, orig_.dims.nonneg);
  for (size_t i = 0; i < orig_.dims.soc.size(); ++i)
    add_block(Slab::Soc, static_cast<int>(i), ops_.soc_offset(static_cast<int>(i)), orig_.dims.soc[i]);
  for (size_t i = 0; i < orig_.dims.psd.size(); ++i)
    add_block(Slab::Psd, static_cast<int>(i), ops_.psd_offset(static_cast<int>(i)),
              svec_len(orig_.dims.psd[i]));

  int nblocks = static_cast<int>(block_kind.size());
  std::vector<std::vector<int>> active(nblocks);
  std::vector<char> seen(static_cast<size_t>(nblocks) * n_, 0);
  for (int j = 0; j < n_; ++j)
    for (SpMat::InnerIterator it(G_, j); it; ++it) {
      int b = block_of_row[it.row()];
      char& flag = seen[static_cast<size_t>(b) * n_ + j];
      if (!flag) {
        flag = 1;
        active[b].push_back(j);
      }
    }

  slabs_.clear();
  std::vector<int> colpos(n_);
  for (int b = 0; b < nblocks; ++b) {
    if (active[b].empty()) continue;
    Slab slab;
    slab.kind = block_kind[b].first;
    slab.index = block_kind[b].second;
    slab.row0 = block_row0[b];
    slab.nrows = block_rows[b];
    slab.cols = active[b];
    slab.Gd = MatrixXd::Zero(slab.nrows, static_cast<Eigen::Index>(slab.cols.size()));
    for (size_t a = 0; a < slab.cols.size(); ++a) colpos[slab.cols[a]] = static_cast<int>(a);
    for (size_t a = 0; a < slab.cols.size(); ++a) {
      int j = slab.cols[a];
      for (SpMat::InnerIterator it(G_, j); it; ++it) {
        int b2 = block_of_row[it.row()];
        if (b2 == b) slab.Gd(it.row() - slab.row0, static_cast<Eigen::Index>(a)) = it.value();
      }
    }
    slabs_.push_back(std::move(slab));
  }
  P_.resize(n_, n_);
}

void Ipm::assemble_kkt(const Scaling& sc) {
  P_.setZero();
  for (Slab& slab : slabs_) {
    int p = static_cast<int>(slab.cols.size());
    slab.B.resize(slab.nrows, p);
    switch (slab.kind) {
      case Slab::Orthant: {
        VectorXd w = sc.d.segment(slab.row0, slab.nrows).array().inverse();
        slab.B = w.asDiagonal() * slab.Gd;
        break;
      }
      case Slab::Soc: {
        const SocScaling& w = sc.soc[slab.index];
        int q = slab.nrows;
        VectorXd jv = -w.v;
        jv[0] = w.v[0];
        MatrixXd Winv = 2.0 * jv * jv.transpose();
        for (int i = 1; i < q; ++i) Winv(i, i) += 1.0;
        Winv(0, 0) -= 1.0;
        Winv /= w.eta;
        slab.B.noalias() = Winv * slab.Gd;
        break;
      }
      case Slab::Psd: {
        const PsdScaling& w = sc.psd[slab.index];
        for (int a = 0; a < p; ++a) {
          MatrixXd M = smat(slab.Gd.col(a));
          MatrixXd out = w.Rinv * M * w.Rinv.transpose();
          slab.B.col(a) = svec((out + out.transpose()) / 2.0);
        }
        break;
      }
    }
    MatrixXd T(p, p);
    T.noalias() = slab.B.transpose() * slab.B;
    for (int a = 0; a < p; ++a)
      for (int b2 = 0; b2 < p; ++b2) P_(slab.cols[a], slab.cols[b2]) += T(a, b2);
  }

  // small static shift; the refinement below corrects against the true system
  double bump = std::max(P_.diagonal().maxCoeff(), 1.0);
  P_.diagonal().array() += 1e-14 * bump;
  llt_.compute(P_);
  if (llt_.info() != Eigen::Success) {
    for (double mag : {1e-12, 1e-10, 1e-8}) {
      MatrixXd Pb = P_;
      Pb.diagonal().array() += bump * mag;
      llt_.compute(Pb);
      if (llt_.info() == Eigen::Success) return;
    }
    throw std::runtime_error("kkt factorization failed");
  }
}

void Ipm::solve_reduced(const Scaling& sc, const VectorXd& ux, const VectorXd& uz,
                        VectorXd& px, VectorXd& pz) const {
  // Work with B = W^{-T}G so every product touches only a half power of the
  // scaling: pz = W^{-1}(B px - W^{-T}uz) keeps the second row exact, and the
  // first-row residual below is measured with exact sparse products, so
  // refinement is not limited by the conditioning of W'W.
  VectorXd yz = ops_.apply_WinvT(sc, uz);
  px = llt_.solve(ux + apply_Bt(yz));
  pz = ops_.apply_Winv(sc, apply_B(px) - yz);
  double prev = std::numeric_limits<double>::infinity();
  for (int r = 0; r < cfg_.refine_steps; ++r) {
    VectorXd rtop = ux - G_.transpose() * pz;
    double rn = rtop.norm();
    if (rn <= 1e-14 * std::max(ux.norm(), 1e-300) || rn >= 0.99 * prev) break;
    prev = rn;
    VectorXd dx = llt_.solve(rtop);
    px += dx;
    pz += ops_.apply_Winv(sc, apply_B(dx));
  }
}

bool Ipm::compute_direction(const Scaling& sc, double eta, const VectorXd& ds,
                            double dkappa, Direction& dir) const {
  VectorXd bx = -eta * rx_;
  VectorXd bz = -eta * rz_;
  double btau = -eta * rtau_;

  VectorXd dstilde = ops_.jordan_div_by_lambda(sc.lambda, ds);
  VectorXd bzhat = bz - ops_.apply_WT(sc, dstilde);

  VectorXd x2, z2;
  solve_reduced(sc, bx, bzhat, x2, z2);

  double denom = c_.dot(x1_) + h_.dot(z1_) - kappa_ / tau_;
  if (!std::isfinite(denom) || std::abs(denom) < 1e-300) return false;
  dir.tau = (btau - c_.dot(x2) - h_.dot(z2) - dkappa / tau_) / denom;
  dir.x = x2 + dir.tau * x1_;
  dir.z = z2 + dir.tau * z1_;
  dir.z_scaled = ops_.apply_W(sc, dir.z);
  // recover ds from the primal row, not the complementarity row: the
  // roundoff then lands in the centering target, which the next iteration
  // re-measures, instead of accumulating in the primal residual
  dir.s = bz + h_ * dir.tau - G_ * dir.x;
  dir.s_scaled = ops_.apply_WinvT(sc, dir.s);
  dir.kappa = (dkappa - kappa_ * dir.tau) / tau_;
  return true;
}

Result Ipm::run() {
  Result best;
  double best_score = std::numeric_limits<double>::infinity();

  // starting point: least squares primal/dual shifted into the cone interior
  {
    MatrixXd P0 = MatrixXd(SpMat(G_.transpose() * G_));
    P0.diagonal().array() += 1e-12 * std::max(1.0, P0.diagonal().maxCoeff());
    Eigen::LLT<MatrixXd> llt0(P0);
    if (llt0.info() != Eigen::Success) {
      best.status = SolveStatus::NumericalError;
      return best;
    }
    x_ = llt0.solve(G_.transpose() * h_);
    s_ = h_ - G_ * x_;
    z_ = G_ * llt0.solve(-c_);
    VectorXd e = ops_.identity();
    for (VectorXd* v : {&s_, &z_}) {
      double mg = ops_.margin(*v);
      if (mg < 1e-8 * std::max(1.0, v->lpNorm<Eigen::Infinity>())) *v += (1.0 - mg) * e;
    }
    tau_ = 1.0;
    kappa_ = 1.0;
  }

  double resx0 = std::max(1.0, orig_.c.norm());
  double resz0 = std::max(1.0, orig_.h.norm());
  int stalls = 0;
  int since_best = 0;

  for (int iter = 0; iter <= cfg_.max_iterations; ++iter) {
    // unscaled candidate and certificates
    VectorXd xu = col_scale_.asDiagonal() * x_ / sigma_h_;
    VectorXd su = (s_.array() / row_scale_.array()).matrix() / sigma_h_;
    VectorXd zu = row_scale_.asDiagonal() * z_ / sigma_c_;
    VectorXd xc = xu / tau_, sc_cand = su / tau_, zc = zu / tau_;

    double pcost = orig_.c.dot(xc);
    double dcost = -orig_.h.dot(zc);
    double gap = sc_cand.dot(zc);
    double relgap = std::numeric_limits<double>::infinity();
    if (pcost < 0.0) relgap = gap / -pcost;
    else if (dcost > 0.0) relgap = gap / dcost;
    // residuals are relative to the size of what they compare, so a problem
    // whose solution carries a large magnitude is not penalized for it
    VectorXd Gx = orig_.G * xc;
    VectorXd Gtz = orig_.G.transpose() * zc;
    double pres = (Gx + sc_cand - orig_.h).norm() /
                  std::max({resz0, Gx.norm(), sc_cand.norm()});
    double dres = (Gtz + orig_.c).norm() / std::max(resx0, Gtz.norm());

    auto fill = [&](Result& r) {
      r.x = xc; r.s = sc_cand; r.z = zc;
      r.primal_objective = pcost; r.dual_objective = dcost;
      r.gap = gap; r.relative_gap = relgap;
      r.primal_residual = pres; r.dual_residual = dres;
      r.iterations = iter;
    };

    if (cfg_.verbose)
      std::fprintf(stderr,
                   "iter %3d  pcost % .6e  dcost % .6e  gap %.3e  pres %.3e  dres %.3e"
                   "  tau %.2e kap %.2e srx %.1e srz %.1e\n",
                   iter, pcost, dcost, gap, pres, dres, tau_, kappa_,
                   (G_.transpose() * z_ + c_ * tau_).norm(),
                   (G_ * x_ + s_ - h_ * tau_).norm());

    // dres gets a light weight: the returned point's quality is driven by
    // primal feasibility and gap, while the dual only has to certify
    double score = std::max({pres, 0.05 * dres, std::min(relgap, gap)});
    if (score < 0.9 * best_score) since_best = 0;
    else ++since_best;
    if (score < best_score) {
      best_score = score;
      fill(best);
      best.status = SolveStatus::MaxIterations;
      const double af = cfg_.accept_factor;
      // the dual face of a degenerate problem is often only reachable to a
      // few digits less than the primal; the returned point's constraint
      // margins are governed by pres, so the dual budget is wider
      best_acceptable_ = pres <= af * cfg_.feas_tol && dres <= 10.0 * af * cfg_.feas_tol &&
                         (gap <= af * cfg_.abs_tol || relgap <= af * cfg_.rel_tol);
    }

    if (pres <= cfg_.feas_tol && dres <= cfg_.feas_tol &&
        (gap <= cfg_.abs_tol || relgap <= cfg_.rel_tol)) {
      fill(best);
      best.status = SolveStatus::Optimal;
      return best;
    }

    // near the boundary the scaled system can fall apart; once the iterates
    // regress hard past an acceptable point, or stop improving on one,
    // keep that point
    if (best_acceptable_ && (score > 1e3 * best_score || since_best >= 20)) {
      best.status = SolveStatus::Optimal;
      return best;
    }
    if (!best_acceptable_ && since_best >= 60) break;

    double hz = orig_.h.dot(zu);
    if (hz < 0.0) {
      VectorXd zbar = zu / -hz;
      if ((orig_.G.transpose() * zbar).norm() / resx0 <= cfg_.feas_tol) {
        fill(best);
        best.z = zbar;
        best.status = SolveStatus::PrimalInfeasible;
        return best;
      }
    }
    double cx = orig_.c.dot(xu);
    if (cx < 0.0) {
      VectorXd xbar = xu / -cx, sbar = su / -cx;
      if ((orig_.G * xbar + sbar).norm() / resz0 <= cfg_.feas_tol) {
        fill(best);
        best.x = xbar;
        best.s = sbar;
        best.status = SolveStatus::DualInfeasible;
        return best;
      }
    }

    if (iter == cfg_.max_iterations) break;

    auto bail = [&]() -> Result& {
      best.status = best_acceptable_ ? SolveStatus::Optimal : SolveStatus::NumericalError;
      return best;
    };

    Scaling sc;
    try {
      sc = ops_.compute_scaling(s_, z_);
      assemble_kkt(sc);
    } catch (const std::runtime_error&) {
      return bail();
    }

    rx_ = G_.transpose() * z_ + c_ * tau_;
    rz_ = G_ * x_ + s_ - h_ * tau_;
    rtau_ = c_.dot(x_) + h_.dot(z_) + kappa_;
    solve_reduced(sc, -c_, h_, x1_, z1_);

    double mu = (sc.lambda.squaredNorm() + tau_ * kappa_) / (ops_.degree() + 1);

    Direction aff;
    VectorXd lamlam = ops_.jordan_mul(sc.lambda, sc.lambda);
    if (!compute_direction(sc, 1.0, -lamlam, -tau_ * kappa_, aff)) return bail();
    double alpha_aff = ops_.max_step(sc.lambda, aff.s_scaled, 10.0);
    alpha_aff = std::min(alpha_aff, ops_.max_step(sc.lambda, aff.z_scaled, 10.0));
    if (aff.tau < 0.0) alpha_aff = std::min(alpha_aff, -tau_ / aff.tau);
    if (aff.kappa < 0.0) alpha_aff = std::min(alpha_aff, -kappa_ / aff.kappa);
    alpha_aff = std::min(alpha_aff, 1.0);

    double sigma = std::pow(1.0 - alpha_aff, 3);
    sigma = std::min(0.9, std::max(0.0, sigma));
    // once the primal and gap have converged, spend the step on the side
    // that has not: a mostly-corrector direction drives the dual residual
    if (pres <= 0.01 * cfg_.feas_tol && dres > cfg_.feas_tol &&
        (gap <= 0.01 * cfg_.abs_tol || relgap <= 0.01 * cfg_.rel_tol))
      sigma = std::min(sigma, 0.1);

    VectorXd e = ops_.identity();
    VectorXd ds = sigma * mu * e - lamlam - ops_.jordan_mul(aff.s_scaled, aff.z_scaled);
    double dkappa = sigma * mu - tau_ * kappa_ - aff.tau * aff.kappa;
    Direction dir;
    if (!compute_direction(sc, 1.0 - sigma, ds, dkappa, dir)) return bail();

    double alpha = ops_.max_step(sc.lambda, dir.s_scaled, 10.0);
    alpha = std::min(alpha, ops_.max_step(sc.lambda, dir.z_scaled, 10.0));
    if (dir.tau < 0.0) alpha = std::min(alpha, -tau_ / dir.tau);
    if (dir.kappa < 0.0) alpha = std::min(alpha, -kappa_ / dir.kappa);
    alpha = std::min(1.0, cfg_.step_scale * alpha);

    if (alpha < 1e-9) {
      if (++stalls >= 2) {
        if (best_acceptable_) return bail();
        best.status = best_score < 1e-4 ? SolveStatus::MaxIterations : SolveStatus::NumericalError;
        return best;
      }
    } else {
      stalls = 0;
    }

    x_ += alpha * dir.x;
    z_ += alpha * dir.z;
    s_ += alpha * dir.s;
    tau_ += alpha * dir.tau;
    kappa_ += alpha * dir.kappa;
    if (tau_ <= 0.0 || kappa_ <= 0.0) return bail();
  }

  if (best_acceptable_) best.status = SolveStatus::Optimal;
  return best;  // otherwise MaxIterations with the best iterate seen
}

}  // namespace

Result solve(const Problem& prob, const Settings& settings) {
  prob.validate();
  if (prob.G.cols() == 0) throw std::invalid_argument("cone::solve: problem has no variables");
  Ipm ipm(prob, settings);
  return ipm.run();
}

}  // namespace swiptbeam::cone
