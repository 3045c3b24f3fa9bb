#pragma once

#include <Eigen/Dense>
#include <complex>

namespace swiptbeam {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;
using RealMatrix = Eigen::MatrixXd;
using RealVector = Eigen::VectorXd;

// Largest entry-wise deviation from H = H^*, relative to max(1, ||H||_F).
double hermitian_defect(const ComplexMatrix& H);

bool is_hermitian(const ComplexMatrix& H, double tol = 1e-9);

struct EigenSystem {
  RealVector values;      // ascending
  ComplexMatrix vectors;  // unit columns, first significant entry real nonnegative
};

// Rotates v so its first entry with magnitude above rel_cut * max|v_i| is
// real and nonnegative. No-op on the zero vector.
void fix_eigenvector_phase(Eigen::Ref<ComplexVector> v, double rel_cut = 1e-8);

// Throws std::invalid_argument unless H is square and Hermitian within tol.
EigenSystem eig_hermitian(const ComplexMatrix& H, double tol = 1e-9);

// Orthonormal columns spanning the eigenspaces with |eigenvalue| <= tol * max|eigenvalue|.
// 0 columns when H has full numerical rank; all columns for the zero matrix.
ComplexMatrix null_space(const ComplexMatrix& H, double tol);

// Number of eigenvalues with |eigenvalue| > tol * max|eigenvalue|.
int numerical_rank(const ComplexMatrix& H, double tol);

// Minimum eigenvalue >= -tol * max(1, ||H||_F).
bool is_psd(const ComplexMatrix& H, double tol = 1e-9);

// [[Re H, -Im H], [Im H, Re H]]. Symmetric for Hermitian H; keeps definiteness
// and doubles every eigenvalue's multiplicity.
RealMatrix real_embedding(const ComplexMatrix& H);

// Left inverse of real_embedding. Projects roundoff outside the embedded
// subspace away and returns an exactly Hermitian matrix.
ComplexMatrix complex_from_embedding(const RealMatrix& S);

}  // namespace swiptbeam
