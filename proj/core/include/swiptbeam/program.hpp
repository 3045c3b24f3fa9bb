#pragma once

#include <string>
#include <swiptbeam/channel.hpp>
#include <swiptbeam/cone/solver.hpp>
#include <utility>
#include <vector>

namespace swiptbeam {

// One power-minimization instance: channels plus QoS targets in linear units.
struct ProblemInstance {
  int n_tx = 0;
  std::vector<ComplexVector> h;  // desired receiver channels
  std::vector<ComplexMatrix> g;  // roaming receiver channels, n_tx x n_rx
  std::vector<double> gamma_req;        // SINR floors, per desired receiver
  std::vector<double> r_eav_bits;       // leak budgets, (roaming, desired) row-major
  std::vector<double> p_min_desired_w;  // harvest floors; 0 disables the floor
  std::vector<double> p_min_roaming_w;
  double eta = 0.5;
  double sigma_ant_w = 0.0;
  double sigma_s_w = 0.0;

  int users() const { return static_cast<int>(h.size()); }
  int eavesdroppers() const { return static_cast<int>(g.size()); }
  double r_eav_at(int m, int k) const { return r_eav_bits[m * users() + k]; }

  static ProblemInstance make(const ScenarioConfig& cfg, const ChannelRealization& ch);
  std::vector<std::string> validate() const;
  void validate_or_throw() const;
};

enum class ConstraintKind {
  SinrFloor,         // per desired receiver
  UserHarvestFloor,  // per desired receiver with a positive floor
  RoamHarvestFloor,  // per roaming receiver
  SplitFloor,        // rho >= margin
  SplitCeil,         // rho <= 1 - margin
  BeamWeightSign,    // direction weights >= 0
  DecoderSplitCone,  // t rho >= 1
  HarvestSplitCone,  // s (1 - rho) >= 1
  EavRateCap,        // beam power at a roaming receiver, linear matrix cap
  NoisePsd,
  BeamPsd,
};

struct RowBlock {
  ConstraintKind kind;
  int user = -1;  // desired receiver index where it applies
  int eav = -1;   // roaming receiver index
  int row0 = 0;
  int rows = 0;
};

// Real parameterization of one Hermitian variable: either a free matrix
// (diagonal entries first, then a re/im pair per lower-triangle entry,
// column-major), or a conic combination of fixed directions d d^H with
// nonnegative weights.
struct ParamBlock {
  bool full = true;
  int dim = 0;     // complex order
  int offset = 0;  // first entry in the solver variable vector
  int count = 0;
  ComplexMatrix dirs;  // dim x count when !full
};

struct ConicProgram {
  cone::Problem problem;
  ProblemInstance inst;
  std::vector<ParamBlock> beams;
  ParamBlock noise;
  int rho_offset = 0;
  int t_offset = 0;
  std::vector<int> s_index;  // per desired receiver; -1 when no harvest floor
  std::vector<RowBlock> rows;
  double split_margin = 1e-9;  // keeps rho off 0 and 1 where the cones blow up
  double fixed_split = -1.0;   // >= 0 pins every split there; no rho/t/s variables
};

ConicProgram build_program(const ProblemInstance& inst);
// Beam covariances restricted to span{dirs[k] columns}; used by the
// fixed-direction baselines. The noise covariance stays free.
ConicProgram build_program(const ProblemInstance& inst,
                           const std::vector<ComplexMatrix>& beam_dirs);
// Same restriction with every power split pinned to fixed_split in (0, 1).
// The hyperbolic auxiliaries collapse to constants, so the program is pure
// LP + PSD over the direction weights and the noise covariance.
ConicProgram build_program(const ProblemInstance& inst,
                           const std::vector<ComplexMatrix>& beam_dirs,
                           double fixed_split);

enum class SolutionStatus { Optimal, Infeasible, NumericalFailure };
const char* to_string(SolutionStatus s);

struct BeamformingSolution {
  SolutionStatus status = SolutionStatus::NumericalFailure;
  std::vector<ComplexMatrix> W;  // exactly Hermitian, Watts
  ComplexMatrix V;
  std::vector<double> rho;
  double objective_w = 0.0;
  double gap = 0.0;
  double primal_residual = 0.0;
  double dual_residual = 0.0;
  int iterations = 0;
  double solve_ms = 0.0;
};

struct DualCertificate {
  std::vector<ComplexMatrix> Z;               // beam cone duals (full blocks only)
  ComplexMatrix Y;                            // noise cone dual
  std::vector<std::vector<ComplexMatrix>> X;  // [roaming][desired] rate cap duals
  std::vector<double> alpha;                  // SINR floor multipliers
  std::vector<double> beta;                   // harvest floor multipliers, 0 when absent
  std::vector<double> nu;                     // roaming harvest multipliers
  double duality_gap = 0.0;
};

std::pair<BeamformingSolution, DualCertificate> solve_program(
    const ConicProgram& prog, const cone::Settings& settings = {});

// Residuals of the original constraints (not the conic reformulation), each
// relative to its own floor so a value of -1e-3 means a 0.1% shortfall.
struct FeasibilityReport {
  std::vector<double> sinr_margin;      // sinr / floor - 1
  std::vector<double> harvest_margin;   // only receivers with a floor
  std::vector<double> roam_margin;      // only receivers with a positive floor
  std::vector<double> rate_cap_margin;  // (roaming, desired) row-major, / (xi - 1)
  std::vector<double> split_margin;     // min(rho, 1 - rho)
  double beam_eig_floor = 0.0;          // min eigenvalue across beams, relative
  double noise_eig_floor = 0.0;
  double worst = 0.0;
  bool feasible(double tol = 1e-7) const { return worst >= -tol; }
};

FeasibilityReport verify_primal(const ProblemInstance& inst,
                                const std::vector<ComplexMatrix>& W,
                                const ComplexMatrix& V,
                                const std::vector<double>& rho);

}  // namespace swiptbeam
