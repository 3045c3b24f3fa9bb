#include "swiptbeam/cone/cones.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace swiptbeam::cone {

namespace {
const double kSqrt2 = std::sqrt(2.0);

// J u = (u0, -u1)
VectorXd reflect(const VectorXd& u) {
  VectorXd r = -u;
  r[0] = u[0];
  return r;
}

double soc_margin(const Eigen::Ref<const VectorXd>& u) {
  return u[0] - u.tail(u.size() - 1).norm();
}

// Factor of a symmetric positive definite matrix, with an eigenvalue-clamping
// fallback for nearly singular input. Returns L with A ~ L L'.
MatrixXd robust_factor(const MatrixXd& A) {
  Eigen::LLT<MatrixXd> llt(A);
  if (llt.info() == Eigen::Success) return llt.matrixL();
  Eigen::SelfAdjointEigenSolver<MatrixXd> es(A);
  double floor = std::max(es.eigenvalues().maxCoeff(), 0.0) * 1e-14 +
                 std::numeric_limits<double>::min();
  VectorXd clamped = es.eigenvalues().cwiseMax(floor);
  return es.eigenvectors() * clamped.cwiseSqrt().asDiagonal();
}
}  // namespace

int ConeDims::total() const {
  int t = nonneg;
  for (int q : soc) t += q;
  for (int p : psd) t += svec_len(p);
  return t;
}

int ConeDims::degree() const {
  int d = nonneg + static_cast<int>(soc.size());
  return std::accumulate(psd.begin(), psd.end(), d);
}

int svec_len(int order) { return order * (order + 1) / 2; }

VectorXd svec(const MatrixXd& A) {
  int p = static_cast<int>(A.rows());
  VectorXd v(svec_len(p));
  int idx = 0;
  for (int j = 0; j < p; ++j) {
    v[idx++] = A(j, j);
    for (int i = j + 1; i < p; ++i) v[idx++] = kSqrt2 * A(i, j);
  }
  return v;
}

MatrixXd smat(const VectorXd& v) {
  int p = static_cast<int>(std::round((std::sqrt(8.0 * v.size() + 1.0) - 1.0) / 2.0));
  MatrixXd A(p, p);
  int idx = 0;
  for (int j = 0; j < p; ++j) {
    A(j, j) = v[idx++];
    for (int i = j + 1; i < p; ++i) {
      A(i, j) = v[idx] / kSqrt2;
      A(j, i) = A(i, j);
      ++idx;
    }
  }
  return A;
}

ConeOps::ConeOps(ConeDims dims) : dims_(std::move(dims)) {
  int off = dims_.nonneg;
  for (int q : dims_.soc) {
    if (q < 2) throw std::invalid_argument("ConeOps: second order cone dimension must be >= 2");
    soc_off_.push_back(off);
    off += q;
  }
  for (int p : dims_.psd) {
    if (p < 1) throw std::invalid_argument("ConeOps: PSD cone order must be >= 1");
    psd_off_.push_back(off);
    off += svec_len(p);
  }
  total_ = off;
}

VectorXd ConeOps::identity() const {
  VectorXd e = VectorXd::Zero(total_);
  e.head(dims_.nonneg).setOnes();
  for (size_t i = 0; i < dims_.soc.size(); ++i) e[soc_off_[i]] = 1.0;
  for (size_t i = 0; i < dims_.psd.size(); ++i) {
    int p = dims_.psd[i];
    int idx = psd_off_[i];
    for (int j = 0; j < p; ++j) {
      e[idx] = 1.0;
      idx += p - j;
    }
  }
  return e;
}

double ConeOps::margin(const VectorXd& s) const {
  double m = std::numeric_limits<double>::infinity();
  if (dims_.nonneg > 0) m = s.head(dims_.nonneg).minCoeff();
  for (size_t i = 0; i < dims_.soc.size(); ++i)
    m = std::min(m, soc_margin(s.segment(soc_off_[i], dims_.soc[i])));
  for (size_t i = 0; i < dims_.psd.size(); ++i) {
    MatrixXd S = smat(s.segment(psd_off_[i], svec_len(dims_.psd[i])));
    Eigen::SelfAdjointEigenSolver<MatrixXd> es(S, Eigen::EigenvaluesOnly);
    m = std::min(m, es.eigenvalues().minCoeff());
  }
  return m;
}

Scaling ConeOps::compute_scaling(const VectorXd& s, const VectorXd& z) const {
  Scaling sc;
  sc.lambda.resize(total_);

  int l = dims_.nonneg;
  if ((s.head(l).array() <= 0.0).any() || (z.head(l).array() <= 0.0).any())
    throw std::runtime_error("compute_scaling: orthant point not interior");
  sc.d = (s.head(l).array() / z.head(l).array()).sqrt();
  sc.lambda.head(l) = (s.head(l).array() * z.head(l).array()).sqrt();

  for (size_t i = 0; i < dims_.soc.size(); ++i) {
    int q = dims_.soc[i];
    VectorXd sb = s.segment(soc_off_[i], q), zb = z.segment(soc_off_[i], q);
    double s2 = sb[0] * sb[0] - sb.tail(q - 1).squaredNorm();
    double z2 = zb[0] * zb[0] - zb.tail(q - 1).squaredNorm();
    if (s2 <= 0.0 || z2 <= 0.0 || sb[0] <= 0.0 || zb[0] <= 0.0)
      throw std::runtime_error("compute_scaling: second order cone point not interior");
    double gs = std::sqrt(s2), gz = std::sqrt(z2);
    VectorXd sn = sb / gs, zn = zb / gz;
    double cbar = std::sqrt((1.0 + sn.dot(zn)) / 2.0);
    // The scaling point wbar has unit hyperbolic norm; the Householder
    // vector is the half vector mapping e to wbar, so that (2vv'-J)z is
    // the scaled point.
    VectorXd wbar = (sn + reflect(zn)) / (2.0 * cbar);
    SocScaling w;
    w.eta = std::sqrt(gs / gz);
    w.v = wbar;
    w.v[0] += 1.0;
    w.v /= std::sqrt(2.0 * w.v[0]);
    sc.soc.push_back(std::move(w));
  }

  for (size_t i = 0; i < dims_.psd.size(); ++i) {
    int p = dims_.psd[i];
    MatrixXd S = smat(s.segment(psd_off_[i], svec_len(p)));
    MatrixXd Z = smat(z.segment(psd_off_[i], svec_len(p)));
    MatrixXd Ls = robust_factor(S), Lz = robust_factor(Z);
    Eigen::JacobiSVD<MatrixXd> svd(Lz.transpose() * Ls,
                                   Eigen::ComputeFullU | Eigen::ComputeFullV);
    VectorXd sig = svd.singularValues();
    if (sig.minCoeff() <= 0.0)
      throw std::runtime_error("compute_scaling: PSD cone point not interior");
    VectorXd isq = sig.cwiseSqrt().cwiseInverse();
    PsdScaling w;
    w.R = Ls * svd.matrixV() * isq.asDiagonal();
    w.Rinv = isq.asDiagonal() * svd.matrixU().transpose() * Lz.transpose();
    w.w = w.R * w.R.transpose();
    w.winv = w.Rinv.transpose() * w.Rinv;
    sc.psd.push_back(std::move(w));
    sc.lambda.segment(psd_off_[i], svec_len(p)) = svec(MatrixXd(sig.asDiagonal()));
  }

  // lambda = W z for the second order blocks
  for (size_t i = 0; i < dims_.soc.size(); ++i) {
    int q = dims_.soc[i];
    const SocScaling& w = sc.soc[i];
    VectorXd zb = z.segment(soc_off_[i], q);
    sc.lambda.segment(soc_off_[i], q) = w.eta * (2.0 * w.v * w.v.dot(zb) - reflect(zb));
  }
  return sc;
}

namespace {
enum class Op { W, WT, Winv, WinvT, Hinv };

VectorXd apply(const ConeOps& ops, const Scaling& sc, const VectorXd& u, Op op) {
  const ConeDims& dims = ops.dims();
  VectorXd out(u.size());

  int l = dims.nonneg;
  switch (op) {
    case Op::W:
    case Op::WT:
      out.head(l) = sc.d.array() * u.head(l).array();
      break;
    case Op::Winv:
    case Op::WinvT:
      out.head(l) = u.head(l).array() / sc.d.array();
      break;
    case Op::Hinv:
      out.head(l) = u.head(l).array() / sc.d.array().square();
      break;
  }

  for (size_t i = 0; i < dims.soc.size(); ++i) {
    int q = dims.soc[i];
    const SocScaling& w = sc.soc[i];
    VectorXd ub = u.segment(ops.soc_offset(static_cast<int>(i)), q);
    auto wmul = [&](const VectorXd& x) -> VectorXd {
      return (2.0 * w.v * w.v.dot(x) - reflect(x)) * w.eta;
    };
    auto winvmul = [&](const VectorXd& x) -> VectorXd {
      VectorXd jv = reflect(w.v);
      return (2.0 * jv * jv.dot(x) - reflect(x)) / w.eta;
    };
    VectorXd res;
    switch (op) {
      case Op::W:
      case Op::WT: res = wmul(ub); break;
      case Op::Winv:
      case Op::WinvT: res = winvmul(ub); break;
      case Op::Hinv: res = winvmul(winvmul(ub)); break;
    }
    out.segment(ops.soc_offset(static_cast<int>(i)), q) = res;
  }

  for (size_t i = 0; i < dims.psd.size(); ++i) {
    int p = dims.psd[i];
    int off = ops.psd_offset(static_cast<int>(i));
    const PsdScaling& w = sc.psd[i];
    MatrixXd U = smat(u.segment(off, svec_len(p)));
    MatrixXd res;
    switch (op) {
      case Op::W: res = w.R.transpose() * U * w.R; break;
      case Op::WT: res = w.R * U * w.R.transpose(); break;
      case Op::Winv: res = w.Rinv.transpose() * U * w.Rinv; break;
      case Op::WinvT: res = w.Rinv * U * w.Rinv.transpose(); break;
      case Op::Hinv: res = w.winv * U * w.winv; break;
    }
    out.segment(off, svec_len(p)) = svec((res + res.transpose()) / 2.0);
  }
  return out;
}
}  // namespace

VectorXd ConeOps::apply_W(const Scaling& sc, const VectorXd& u) const { return apply(*this, sc, u, Op::W); }
VectorXd ConeOps::apply_WT(const Scaling& sc, const VectorXd& u) const { return apply(*this, sc, u, Op::WT); }
VectorXd ConeOps::apply_Winv(const Scaling& sc, const VectorXd& u) const { return apply(*this, sc, u, Op::Winv); }
VectorXd ConeOps::apply_WinvT(const Scaling& sc, const VectorXd& u) const { return apply(*this, sc, u, Op::WinvT); }
VectorXd ConeOps::apply_Hinv(const Scaling& sc, const VectorXd& u) const { return apply(*this, sc, u, Op::Hinv); }

VectorXd ConeOps::jordan_mul(const VectorXd& a, const VectorXd& b) const {
  VectorXd out(total_);
  int l = dims_.nonneg;
  out.head(l) = a.head(l).array() * b.head(l).array();
  for (size_t i = 0; i < dims_.soc.size(); ++i) {
    int q = dims_.soc[i], off = soc_off_[i];
    VectorXd ab = a.segment(off, q), bb = b.segment(off, q);
    out[off] = ab.dot(bb);
    out.segment(off + 1, q - 1) =
        ab[0] * bb.tail(q - 1) + bb[0] * ab.tail(q - 1);
  }
  for (size_t i = 0; i < dims_.psd.size(); ++i) {
    int p = dims_.psd[i], off = psd_off_[i];
    MatrixXd A = smat(a.segment(off, svec_len(p))), B = smat(b.segment(off, svec_len(p)));
    out.segment(off, svec_len(p)) = svec((A * B + B * A) / 2.0);
  }
  return out;
}

VectorXd ConeOps::jordan_div_by_lambda(const VectorXd& lambda, const VectorXd& d) const {
  VectorXd out(total_);
  int l = dims_.nonneg;
  out.head(l) = d.head(l).array() / lambda.head(l).array();
  for (size_t i = 0; i < dims_.soc.size(); ++i) {
    int q = dims_.soc[i], off = soc_off_[i];
    VectorXd lb = lambda.segment(off, q), db = d.segment(off, q);
    double det = lb[0] * lb[0] - lb.tail(q - 1).squaredNorm();
    double u0 = (lb[0] * db[0] - lb.tail(q - 1).dot(db.tail(q - 1))) / det;
    out[off] = u0;
    out.segment(off + 1, q - 1) = (db.tail(q - 1) - u0 * lb.tail(q - 1)) / lb[0];
  }
  for (size_t i = 0; i < dims_.psd.size(); ++i) {
    int p = dims_.psd[i], off = psd_off_[i];
    // lambda block is diagonal: (Lam U + U Lam)/2 = D  =>  U_ij = 2 D_ij / (l_i + l_j)
    MatrixXd D = smat(d.segment(off, svec_len(p)));
    VectorXd diag(p);
    int idx = off;
    for (int j = 0; j < p; ++j) {
      diag[j] = lambda[idx];
      idx += p - j;
    }
    MatrixXd U(p, p);
    for (int j = 0; j < p; ++j)
      for (int i2 = 0; i2 < p; ++i2) U(i2, j) = 2.0 * D(i2, j) / (diag[i2] + diag[j]);
    out.segment(off, svec_len(p)) = svec(U);
  }
  return out;
}

double ConeOps::max_step(const VectorXd& lambda, const VectorXd& dir, double cap) const {
  double t = cap;
  for (int i = 0; i < dims_.nonneg; ++i)
    if (dir[i] < 0.0) t = std::min(t, -lambda[i] / dir[i]);

  for (size_t i = 0; i < dims_.soc.size(); ++i) {
    int q = dims_.soc[i], off = soc_off_[i];
    VectorXd lb = lambda.segment(off, q), db = dir.segment(off, q);
    // roots of (l0 + t d0)^2 - ||l1 + t d1||^2 = 0
    double a = db[0] * db[0] - db.tail(q - 1).squaredNorm();
    double b = 2.0 * (lb[0] * db[0] - lb.tail(q - 1).dot(db.tail(q - 1)));
    double c = lb[0] * lb[0] - lb.tail(q - 1).squaredNorm();
    double best = std::numeric_limits<double>::infinity();
    if (std::abs(a) < 1e-300) {
      if (b < 0.0) best = -c / b;
    } else {
      double disc = b * b - 4.0 * a * c;
      if (disc >= 0.0) {
        double sq = std::sqrt(disc);
        for (double root : {(-b - sq) / (2.0 * a), (-b + sq) / (2.0 * a)})
          if (root > 0.0) best = std::min(best, root);
      }
    }
    t = std::min(t, best);
  }

  for (size_t i = 0; i < dims_.psd.size(); ++i) {
    int p = dims_.psd[i], off = psd_off_[i];
    VectorXd diag(p);
    int idx = off;
    for (int j = 0; j < p; ++j) {
      diag[j] = lambda[idx];
      idx += p - j;
    }
    MatrixXd D = smat(dir.segment(off, svec_len(p)));
    VectorXd isq = diag.cwiseSqrt().cwiseInverse();
    MatrixXd M = isq.asDiagonal() * D * isq.asDiagonal();
    Eigen::SelfAdjointEigenSolver<MatrixXd> es((M + M.transpose()) / 2.0, Eigen::EigenvaluesOnly);
    double mineig = es.eigenvalues().minCoeff();
    if (mineig < 0.0) t = std::min(t, -1.0 / mineig);
  }
  return t;
}

}  // namespace swiptbeam::cone
