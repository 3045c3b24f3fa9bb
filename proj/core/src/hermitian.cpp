#include "swiptbeam/hermitian.hpp"

#include <stdexcept>

namespace swiptbeam {

double hermitian_defect(const ComplexMatrix& H) {
  if (H.rows() != H.cols()) return std::numeric_limits<double>::infinity();
  double defect = (H - H.adjoint()).cwiseAbs().maxCoeff();
  return defect / std::max(1.0, H.norm());
}

bool is_hermitian(const ComplexMatrix& H, double tol) {
  return H.rows() == H.cols() && hermitian_defect(H) <= tol;
}

void fix_eigenvector_phase(Eigen::Ref<ComplexVector> v, double rel_cut) {
  double vmax = v.cwiseAbs().maxCoeff();
  if (vmax <= 0.0) return;
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    double mag = std::abs(v[i]);
    if (mag > rel_cut * vmax) {
      v *= std::conj(v[i]) / mag;
      v[i] = Complex(std::abs(v[i]), 0.0);
      return;
    }
  }
}

EigenSystem eig_hermitian(const ComplexMatrix& H, double tol) {
  if (H.rows() != H.cols()) throw std::invalid_argument("eig_hermitian: matrix is not square");
  if (!is_hermitian(H, tol)) throw std::invalid_argument("eig_hermitian: matrix is not Hermitian within tolerance");
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es((H + H.adjoint()) / 2.0);
  if (es.info() != Eigen::Success) throw std::runtime_error("eig_hermitian: eigensolver failed to converge");
  EigenSystem out{es.eigenvalues(), es.eigenvectors()};
  for (Eigen::Index j = 0; j < out.vectors.cols(); ++j) fix_eigenvector_phase(out.vectors.col(j));
  return out;
}

ComplexMatrix null_space(const ComplexMatrix& H, double tol) {
  EigenSystem es = eig_hermitian(H);
  double scale = es.values.cwiseAbs().maxCoeff();
  int count = 0;
  for (Eigen::Index i = 0; i < es.values.size(); ++i)
    if (std::abs(es.values[i]) <= tol * scale) ++count;
  ComplexMatrix basis(H.rows(), count);
  int j = 0;
  for (Eigen::Index i = 0; i < es.values.size(); ++i)
    if (std::abs(es.values[i]) <= tol * scale) basis.col(j++) = es.vectors.col(i);
  return basis;
}

int numerical_rank(const ComplexMatrix& H, double tol) {
  EigenSystem es = eig_hermitian(H);
  double scale = es.values.cwiseAbs().maxCoeff();
  int rank = 0;
  for (Eigen::Index i = 0; i < es.values.size(); ++i)
    if (std::abs(es.values[i]) > tol * scale) ++rank;
  return rank;
}

bool is_psd(const ComplexMatrix& H, double tol) {
  EigenSystem es = eig_hermitian(H, std::max(tol, 1e-9));
  return es.values.minCoeff() >= -tol * std::max(1.0, H.norm());
}

RealMatrix real_embedding(const ComplexMatrix& H) {
  Eigen::Index n = H.rows();
  RealMatrix T(2 * n, 2 * H.cols());
  T.topLeftCorner(n, H.cols()) = H.real();
  T.topRightCorner(n, H.cols()) = -H.imag();
  T.bottomLeftCorner(n, H.cols()) = H.imag();
  T.bottomRightCorner(n, H.cols()) = H.real();
  return T;
}

ComplexMatrix complex_from_embedding(const RealMatrix& S) {
  if (S.rows() != S.cols() || S.rows() % 2 != 0)
    throw std::invalid_argument("complex_from_embedding: expected even-order square matrix");
  Eigen::Index n = S.rows() / 2;
  RealMatrix re = (S.topLeftCorner(n, n) + S.bottomRightCorner(n, n)) / 2.0;
  RealMatrix im = (S.bottomLeftCorner(n, n) - S.topRightCorner(n, n)) / 2.0;
  ComplexMatrix H = re.cast<Complex>() + Complex(0, 1) * im.cast<Complex>();
  return (H + H.adjoint()) / 2.0;
}

}  // namespace swiptbeam
