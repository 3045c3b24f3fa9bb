#pragma once

#include <swiptbeam/program.hpp>
#include <vector>

namespace swiptbeam {

// Eigenvalue split of each beam covariance: ratio is the second eigenvalue
// over the first, dominant_share the first over the trace.
struct RankProfile {
  std::vector<double> ratio;
  std::vector<double> dominant_share;
  bool all_rank_one(double tol = 1e-6) const {
    for (double r : ratio)
      if (!(r <= tol)) return false;
    return true;
  }
};

RankProfile rank_profile(const std::vector<ComplexMatrix>& W);

// Stationarity residuals tying the returned multipliers to the solution.
struct KktReport {
  std::vector<double> beam_dual_residual;  // relative, per beam
  std::vector<double> rho_residual;        // |rho - closed form|; -1 = not checkable
  double complementarity = 0.0;            // worst normalized dual * slack
};

// The beam cone dual reassembled from the scalar multipliers and rate cap
// duals alone; at an optimum it matches the returned Z_k.
ComplexMatrix beam_dual_from_scalars(const ProblemInstance& inst,
                                     const DualCertificate& cert, int k);

// The split ratio the multipliers imply when both the decoded-signal and
// harvest floors bind; NaN when either multiplier vanishes.
double split_from_duals(const ProblemInstance& inst, const DualCertificate& cert,
                        int k);

KktReport check_kkt(const ProblemInstance& inst, const BeamformingSolution& sol,
                    const DualCertificate& cert);

enum class RecoveryMethod { Dominant, Resolved };

struct RecoveredBeams {
  std::vector<ComplexVector> w;  // W_k = w_k w_k^H
  ComplexMatrix V;
  std::vector<double> rho;
  double objective_w = 0.0;
  double objective_delta_rel = 0.0;  // vs the relaxation optimum
  std::vector<RecoveryMethod> method;
  FeasibilityReport feasibility;
};

// Turns the covariance solution into actual beamformers. Beams that are
// already numerically rank one keep their dominant eigenpair; the rest go
// through a re-solve restricted to the directions the dual certificate
// singles out. Throws std::runtime_error when neither route gives a
// feasible solution at the relaxation's power. A negative ratio_tol forces
// the re-solve route for every beam.
RecoveredBeams recover_rank_one(const ProblemInstance& inst,
                                const BeamformingSolution& sol,
                                const DualCertificate& cert,
                                double ratio_tol = 1e-6);

}  // namespace swiptbeam
