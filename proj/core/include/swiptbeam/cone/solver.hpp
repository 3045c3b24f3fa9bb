#pragma once

#include <Eigen/Sparse>
#include <limits>

#include "swiptbeam/cone/cones.hpp"

namespace swiptbeam::cone {

// minimize    c'x
// subject to  G x + s = h,  s in K
//
// with K the cone described by Problem::dims. The dual variable z lives in
// the same cone, and an optimal pair satisfies G'z + c = 0, s'z = 0.
struct Problem {
  Eigen::SparseMatrix<double> G;
  VectorXd h;
  VectorXd c;
  ConeDims dims;

  // Throws std::invalid_argument when the shapes are inconsistent.
  void validate() const;
};

struct Settings {
  double feas_tol = 1e-8;
  double abs_tol = 1e-8;
  double rel_tol = 1e-8;
  // when progress stops, the best iterate still counts as optimal within
  // this multiple of the tolerances
  double accept_factor = 100.0;
  int max_iterations = 200;
  bool equilibrate = true;
  int equilibrate_passes = 10;
  int refine_steps = 30;  // upper bound; stops once the residual is tiny or stalls
  double step_scale = 0.99;
  bool verbose = false;
};

enum class SolveStatus {
  Optimal,
  PrimalInfeasible,  // z is a Farkas certificate scaled to h'z = -1
  DualInfeasible,    // x, s certify an unbounded objective
  MaxIterations,
  NumericalError,
};

const char* to_string(SolveStatus status);

struct Result {
  SolveStatus status = SolveStatus::NumericalError;
  VectorXd x, s, z;
  double primal_objective = std::numeric_limits<double>::quiet_NaN();
  double dual_objective = std::numeric_limits<double>::quiet_NaN();
  double gap = std::numeric_limits<double>::quiet_NaN();
  double relative_gap = std::numeric_limits<double>::quiet_NaN();
  double primal_residual = std::numeric_limits<double>::quiet_NaN();
  double dual_residual = std::numeric_limits<double>::quiet_NaN();
  int iterations = 0;
};

Result solve(const Problem& prob, const Settings& settings = {});

}  // namespace swiptbeam::cone
