#pragma once

#include <Eigen/Dense>
#include <vector>

namespace swiptbeam::cone {

using Eigen::MatrixXd;
using Eigen::VectorXd;

// Cartesian product of a nonnegative orthant, second order cones, and
// PSD cones of symmetric matrices in scaled-vector (svec) form.
struct ConeDims {
  int nonneg = 0;
  std::vector<int> soc;  // cone dimensions, each >= 2
  std::vector<int> psd;  // matrix orders, each >= 1
  int total() const;
  int degree() const;  // barrier degree: nonneg + #soc + sum(psd)
};

int svec_len(int order);
// Column-major lower triangle with off-diagonal entries scaled by sqrt(2),
// so that svec(A).dot(svec(B)) == trace(A B) for symmetric A, B.
VectorXd svec(const MatrixXd& A);
MatrixXd smat(const VectorXd& v);

struct SocScaling {
  double eta = 1.0;  // W = eta * (2 v v' - J), v'Jv = 1, J = diag(1, -I)
  VectorXd v;
};

struct PsdScaling {
  MatrixXd R, Rinv;   // W z = svec(R' Z R)
  MatrixXd w, winv;   // w = R R', the scaling point: s = w z w
};

struct Scaling {
  VectorXd d;  // nonnegative orthant: W = diag(d)
  std::vector<SocScaling> soc;
  std::vector<PsdScaling> psd;
  VectorXd lambda;  // scaled point W^{-T} s = W z
};

class ConeOps {
 public:
  explicit ConeOps(ConeDims dims);

  const ConeDims& dims() const { return dims_; }
  int total() const { return total_; }
  int degree() const { return dims_.degree(); }
  int soc_offset(int i) const { return soc_off_[i]; }
  int psd_offset(int i) const { return psd_off_[i]; }

  VectorXd identity() const;

  // Exact additive margin to the cone boundary: min over blocks of
  // (min s_i | u0 - ||u1|| | min eig). Positive inside the interior, and
  // margin(s + t e) = margin(s) + t for the identity e.
  double margin(const VectorXd& s) const;

  // Nesterov-Todd scaling for an interior pair. Throws std::runtime_error
  // if either point is outside the cone interior.
  Scaling compute_scaling(const VectorXd& s, const VectorXd& z) const;

  VectorXd apply_W(const Scaling& sc, const VectorXd& u) const;
  VectorXd apply_WT(const Scaling& sc, const VectorXd& u) const;
  VectorXd apply_Winv(const Scaling& sc, const VectorXd& u) const;
  VectorXd apply_WinvT(const Scaling& sc, const VectorXd& u) const;
  VectorXd apply_Hinv(const Scaling& sc, const VectorXd& u) const;  // (W'W)^{-1} u

  VectorXd jordan_mul(const VectorXd& a, const VectorXd& b) const;
  // Solves lambda o u = d. The PSD blocks of lambda must be diagonal
  // matrices, which holds for every scaled point this solver produces.
  VectorXd jordan_div_by_lambda(const VectorXd& lambda, const VectorXd& d) const;

  // sup { t : lambda + t * dir in cone }, capped at cap. lambda's PSD blocks
  // must be diagonal.
  double max_step(const VectorXd& lambda, const VectorXd& dir, double cap) const;

 private:
  ConeDims dims_;
  std::vector<int> soc_off_, psd_off_;
  int total_ = 0;
};

}  // namespace swiptbeam::cone
