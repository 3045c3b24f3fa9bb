#include "swiptbeam/program.hpp"

#include <Eigen/Eigenvalues>
#include <chrono>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "swiptbeam/hermitian.hpp"
#include "swiptbeam/metrics.hpp"
#include "swiptbeam/units.hpp"

namespace swiptbeam {

ProblemInstance ProblemInstance::make(const ScenarioConfig& cfg,
                                      const ChannelRealization& ch) {
  cfg.validate_or_throw();
  ProblemInstance inst;
  inst.n_tx = cfg.n_tx;
  inst.h = ch.h;
  inst.g = ch.g;
  for (int k = 0; k < cfg.n_desired; ++k) {
    inst.gamma_req.push_back(db_to_linear(cfg.gamma_req_db_at(k)));
    inst.p_min_desired_w.push_back(dbm_to_watt(cfg.p_min_desired_dbm_at(k)));
  }
  for (int m = 0; m < cfg.n_roaming; ++m) {
    inst.p_min_roaming_w.push_back(dbm_to_watt(cfg.p_min_roaming_dbm_at(m)));
    for (int k = 0; k < cfg.n_desired; ++k)
      inst.r_eav_bits.push_back(cfg.r_eav_bits_at(m, k));
  }
  inst.eta = cfg.eta;
  inst.sigma_ant_w = dbm_to_watt(cfg.sigma_ant_dbm);
  inst.sigma_s_w = dbm_to_watt(cfg.sigma_s_dbm);
  return inst;
}

std::vector<std::string> ProblemInstance::validate() const {
  std::vector<std::string> bad;
  int K = users(), M = eavesdroppers();
  if (n_tx < 1) bad.push_back("n_tx: must be at least 1");
  if (K < 1) bad.push_back("h: need at least one desired receiver");
  for (int k = 0; k < K; ++k)
    if (h[k].size() != n_tx) bad.push_back("h: channel length must equal n_tx");
  for (int m = 0; m < M; ++m)
    if (g[m].rows() != n_tx || g[m].cols() < 1)
      bad.push_back("g: channel must be n_tx by n_rx");
  if (static_cast<int>(gamma_req.size()) != K)
    bad.push_back("gamma_req: one floor per desired receiver");
  else
    for (double gam : gamma_req)
      if (!(gam > 0.0)) bad.push_back("gamma_req: floors must be positive");
  if (static_cast<int>(r_eav_bits.size()) != M * K)
    bad.push_back("r_eav_bits: one budget per (roaming, desired) pair");
  else
    for (double r : r_eav_bits)
      if (!(r > 0.0)) bad.push_back("r_eav_bits: budgets must be positive");
  if (static_cast<int>(p_min_desired_w.size()) != K)
    bad.push_back("p_min_desired_w: one floor per desired receiver");
  else
    for (double p : p_min_desired_w)
      if (p < 0.0) bad.push_back("p_min_desired_w: floors must be nonnegative");
  if (static_cast<int>(p_min_roaming_w.size()) != M)
    bad.push_back("p_min_roaming_w: one floor per roaming receiver");
  else
    for (double p : p_min_roaming_w)
      if (p < 0.0) bad.push_back("p_min_roaming_w: floors must be nonnegative");
  if (!(eta > 0.0) || eta > 1.0) bad.push_back("eta: must be in (0, 1]");
  if (!(sigma_ant_w > 0.0)) bad.push_back("sigma_ant_w: must be positive");
  if (!(sigma_s_w > 0.0)) bad.push_back("sigma_s_w: must be positive");
  return bad;
}

void ProblemInstance::validate_or_throw() const {
  std::vector<std::string> bad = validate();
  if (bad.empty()) return;
  std::ostringstream msg;
  msg << "invalid problem instance:";
  for (const std::string& b : bad) msg << "\n  " << b;
  throw std::invalid_argument(msg.str());
}

const char* to_string(SolutionStatus s) {
  switch (s) {
    case SolutionStatus::Optimal: return "optimal";
    case SolutionStatus::Infeasible: return "infeasible";
    case SolutionStatus::NumericalFailure: return "numerical_failure";
  }
  return "?";
}

namespace {

// svec position of entry (i, j), i >= j, in the lower triangle of an n x n
int svec_idx(int n, int i, int j) { return j * n - j * (j - 1) / 2 + (i - j); }

// Coefficients of trace(C H) in the real parameters of a Hermitian block:
// C_ii on the diagonal entries, then 2 Re C_ij / 2 Im C_ij per pair. For a
// direction block the coefficient of each weight is d^H C d.
std::vector<double> trace_coeffs(const ParamBlock& blk, const ComplexMatrix& C) {
  std::vector<double> c(blk.count);
  if (blk.full) {
    int p = 0;
    for (int i = 0; i < blk.dim; ++i) c[p++] = C(i, i).real();
    for (int j = 0; j < blk.dim; ++j)
      for (int i = j + 1; i < blk.dim; ++i) {
        c[p++] = 2.0 * C(i, j).real();
        c[p++] = 2.0 * C(i, j).imag();
      }
    return c;
  }
  for (int d = 0; d < blk.count; ++d)
    c[d] = std::real(blk.dirs.col(d).dot(C * blk.dirs.col(d)));
  return c;
}

// G^H B_p G for every basis matrix B_p of the block, each Hermitian of the
// receive dimension.
std::vector<ComplexMatrix> congruence_coeffs(const ParamBlock& blk,
                                             const ComplexMatrix& G) {
  std::vector<ComplexMatrix> out(blk.count);
  if (!blk.full) {
    for (int d = 0; d < blk.count; ++d) {
      ComplexVector gd = G.adjoint() * blk.dirs.col(d);
      out[d] = gd * gd.adjoint();
    }
    return out;
  }
  ComplexMatrix A = G.adjoint();  // column i is G^H e_i
  int p = 0;
  for (int i = 0; i < blk.dim; ++i) out[p++] = A.col(i) * A.col(i).adjoint();
  for (int j = 0; j < blk.dim; ++j)
    for (int i = j + 1; i < blk.dim; ++i) {
      ComplexMatrix up = A.col(i) * A.col(j).adjoint();
      out[p++] = up + up.adjoint();
      out[p++] = Complex(0.0, 1.0) * (up - up.adjoint());
    }
  return out;
}

cone::VectorXd embed_svec(const ComplexMatrix& H) {
  return cone::svec(real_embedding(H));
}

// svec(T(B_p)) has exactly two nonzero entries; 0 = diagonal, 1 = re, 2 = im
void basis_embed_nnz(int n, int kind, int i, int j, int rows[2], double vals[2]) {
  const int N = 2 * n;
  const double r2 = std::sqrt(2.0);
  if (kind == 0) {
    rows[0] = svec_idx(N, i, i);
    rows[1] = svec_idx(N, n + i, n + i);
    vals[0] = vals[1] = 1.0;
  } else if (kind == 1) {
    rows[0] = svec_idx(N, i, j);
    rows[1] = svec_idx(N, n + i, n + j);
    vals[0] = vals[1] = r2;
  } else {
    rows[0] = svec_idx(N, n + i, j);
    rows[1] = svec_idx(N, n + j, i);
    vals[0] = r2;
    vals[1] = -r2;
  }
}

ComplexMatrix block_matrix(const ParamBlock& blk, const cone::VectorXd& x) {
  ComplexMatrix H = ComplexMatrix::Zero(blk.dim, blk.dim);
  if (blk.full) {
    int p = blk.offset;
    for (int i = 0; i < blk.dim; ++i) H(i, i) = x[p++];
    for (int j = 0; j < blk.dim; ++j)
      for (int i = j + 1; i < blk.dim; ++i) {
        double re = x[p++], im = x[p++];
        H(i, j) = Complex(re, im);
        H(j, i) = Complex(re, -im);
      }
    return H;
  }
  for (int d = 0; d < blk.count; ++d)
    H += x[blk.offset + d] * (blk.dirs.col(d) * blk.dirs.col(d).adjoint()).eval();
  return (H + H.adjoint()).eval() / 2.0;
}

ConicProgram build_impl(const ProblemInstance& inst,
                        const std::vector<ComplexMatrix>* dirs,
                        double fixed_split) {
  inst.validate_or_throw();
  const int K = inst.users(), M = inst.eavesdroppers(), n = inst.n_tx;
  const bool pinned = fixed_split >= 0.0;
  if (pinned && (fixed_split <= 0.0 || fixed_split >= 1.0))
    throw std::invalid_argument("build_program: fixed split must lie in (0, 1)");

  ConicProgram prog;
  prog.inst = inst;
  prog.fixed_split = fixed_split;

  int off = 0;
  for (int k = 0; k < K; ++k) {
    ParamBlock b;
    b.dim = n;
    if (dirs) {
      b.full = false;
      b.dirs = (*dirs)[k];
      b.count = static_cast<int>(b.dirs.cols());
      if (b.dirs.rows() != n || b.count < 1)
        throw std::invalid_argument("build_program: beam directions must be n_tx by >= 1");
    } else {
      b.count = n * n;
    }
    b.offset = off;
    off += b.count;
    prog.beams.push_back(std::move(b));
  }
  prog.noise.full = true;
  prog.noise.dim = n;
  prog.noise.offset = off;
  prog.noise.count = n * n;
  off += n * n;
  prog.rho_offset = -1;
  prog.t_offset = -1;
  prog.s_index.assign(K, -1);
  if (!pinned) {
    prog.rho_offset = off;
    off += K;
    prog.t_offset = off;
    off += K;
    for (int k = 0; k < K; ++k)
      if (inst.p_min_desired_w[k] > 0.0) prog.s_index[k] = off++;
  }
  const int nvar = off;

  std::vector<ComplexMatrix> hh(K);
  for (int k = 0; k < K; ++k) hh[k] = inst.h[k] * inst.h[k].adjoint();

  std::vector<Eigen::Triplet<double>> trips;
  std::vector<double> rhs;
  cone::ConeDims dims;
  int row = 0;

  auto put = [&](int r, int c, double v) {
    if (v != 0.0) trips.emplace_back(r, c, v);
  };
  auto put_trace = [&](int r, const ParamBlock& blk, const ComplexMatrix& C,
                       double scale) {
    std::vector<double> c = trace_coeffs(blk, C);
    for (int p = 0; p < blk.count; ++p) put(r, blk.offset + p, scale * c[p]);
  };
  auto tag = [&](ConstraintKind kind, int user, int eav, int nrows) {
    prog.rows.push_back({kind, user, eav, row, nrows});
    row += nrows;
  };

  // decoded-signal floors: the decoder share of the desired power beats the
  // floor times interference, AN leak, and both noise terms, with t >= 1/rho
  // standing in for the split loss on the processing noise
  for (int k = 0; k < K; ++k) {
    for (int j = 0; j < K; ++j)
      put_trace(row, prog.beams[j], hh[k], j == k ? -1.0 / inst.gamma_req[k] : 1.0);
    put_trace(row, prog.noise, hh[k], 1.0);
    if (pinned) {
      rhs.push_back(-inst.sigma_ant_w - inst.sigma_s_w / fixed_split);
    } else {
      put(row, prog.t_offset + k, inst.sigma_s_w);
      rhs.push_back(-inst.sigma_ant_w);
    }
    tag(ConstraintKind::SinrFloor, k, -1, 1);
  }

  // harvest floors at desired receivers, s >= 1/(1 - rho) linearizing the
  // harvested share
  for (int k = 0; k < K; ++k) {
    if (inst.p_min_desired_w[k] <= 0.0) continue;
    for (int j = 0; j < K; ++j) put_trace(row, prog.beams[j], hh[k], -1.0);
    put_trace(row, prog.noise, hh[k], -1.0);
    if (pinned) {
      rhs.push_back(inst.sigma_ant_w -
                    inst.p_min_desired_w[k] / (inst.eta * (1.0 - fixed_split)));
    } else {
      put(row, prog.s_index[k], inst.p_min_desired_w[k] / inst.eta);
      rhs.push_back(inst.sigma_ant_w);
    }
    tag(ConstraintKind::UserHarvestFloor, k, -1, 1);
  }

  // harvest floors at roaming receivers
  for (int m = 0; m < M; ++m) {
    ComplexMatrix gg = inst.g[m] * inst.g[m].adjoint();
    double nr = static_cast<double>(inst.g[m].cols());
    for (int j = 0; j < K; ++j) put_trace(row, prog.beams[j], gg, -1.0);
    put_trace(row, prog.noise, gg, -1.0);
    rhs.push_back(nr * inst.sigma_ant_w - inst.p_min_roaming_w[m] / inst.eta);
    tag(ConstraintKind::RoamHarvestFloor, -1, m, 1);
  }

  // rho in [margin, 1 - margin]
  if (!pinned) {
    for (int k = 0; k < K; ++k) {
      put(row, prog.rho_offset + k, -1.0);
      rhs.push_back(-prog.split_margin);
      tag(ConstraintKind::SplitFloor, k, -1, 1);
    }
    for (int k = 0; k < K; ++k) {
      put(row, prog.rho_offset + k, 1.0);
      rhs.push_back(1.0 - prog.split_margin);
      tag(ConstraintKind::SplitCeil, k, -1, 1);
    }
  }

  // direction weights stay nonnegative
  for (int k = 0; k < K; ++k) {
    if (prog.beams[k].full) continue;
    for (int d = 0; d < prog.beams[k].count; ++d) {
      put(row, prog.beams[k].offset + d, -1.0);
      rhs.push_back(0.0);
      tag(ConstraintKind::BeamWeightSign, k, -1, 1);
    }
  }
  dims.nonneg = row;

  // t rho >= 1 through the cone (t + rho, 2, t - rho)
  if (!pinned) {
    for (int k = 0; k < K; ++k) {
      put(row, prog.t_offset + k, -1.0);
      put(row, prog.rho_offset + k, -1.0);
      rhs.push_back(0.0);
      rhs.push_back(2.0);
      put(row + 2, prog.t_offset + k, -1.0);
      put(row + 2, prog.rho_offset + k, 1.0);
      rhs.push_back(0.0);
      dims.soc.push_back(3);
      tag(ConstraintKind::DecoderSplitCone, k, -1, 3);
    }

    // s (1 - rho) >= 1 through the cone (s + 1 - rho, 2, s - 1 + rho)
    for (int k = 0; k < K; ++k) {
      if (prog.s_index[k] < 0) continue;
      put(row, prog.s_index[k], -1.0);
      put(row, prog.rho_offset + k, 1.0);
      rhs.push_back(1.0);
      rhs.push_back(2.0);
      put(row + 2, prog.s_index[k], -1.0);
      put(row + 2, prog.rho_offset + k, -1.0);
      rhs.push_back(-1.0);
      dims.soc.push_back(3);
      tag(ConstraintKind::HarvestSplitCone, k, -1, 3);
    }
  }

  // beam power cap at each roaming receiver:
  // G^H W_k G <= (xi - 1)(G^H V G + (sigma_ant + sigma_s) I)
  double sigma_sum = inst.sigma_ant_w + inst.sigma_s_w;
  for (int m = 0; m < M; ++m) {
    int nr = static_cast<int>(inst.g[m].cols());
    int len = cone::svec_len(2 * nr);
    std::vector<ComplexMatrix> noise_coeff = congruence_coeffs(prog.noise, inst.g[m]);
    for (int k = 0; k < K; ++k) {
      double xim1 = std::exp2(inst.r_eav_at(m, k)) - 1.0;
      std::vector<ComplexMatrix> beam_coeff =
          congruence_coeffs(prog.beams[k], inst.g[m]);
      for (int p = 0; p < prog.noise.count; ++p) {
        cone::VectorXd col = embed_svec(noise_coeff[p]);
        for (int r = 0; r < len; ++r)
          put(row + r, prog.noise.offset + p, -xim1 * col[r]);
      }
      for (int p = 0; p < prog.beams[k].count; ++p) {
        cone::VectorXd col = embed_svec(beam_coeff[p]);
        for (int r = 0; r < len; ++r)
          put(row + r, prog.beams[k].offset + p, col[r]);
      }
      cone::VectorXd hblk =
          xim1 * sigma_sum *
          embed_svec(ComplexMatrix::Identity(nr, nr));
      for (int r = 0; r < len; ++r) rhs.push_back(hblk[r]);
      dims.psd.push_back(2 * nr);
      tag(ConstraintKind::EavRateCap, k, m, len);
    }
  }

  // the Hermitian variables themselves stay positive semidefinite
  auto psd_var_block = [&](const ParamBlock& blk, ConstraintKind kind, int user) {
    int len = cone::svec_len(2 * n);
    int p = 0;
    int rows2[2];
    double vals2[2];
    for (int i = 0; i < n; ++i, ++p) {
      basis_embed_nnz(n, 0, i, i, rows2, vals2);
      put(row + rows2[0], blk.offset + p, -vals2[0]);
      put(row + rows2[1], blk.offset + p, -vals2[1]);
    }
    for (int j = 0; j < n; ++j)
      for (int i = j + 1; i < n; ++i) {
        basis_embed_nnz(n, 1, i, j, rows2, vals2);
        put(row + rows2[0], blk.offset + p, -vals2[0]);
        put(row + rows2[1], blk.offset + p, -vals2[1]);
        ++p;
        basis_embed_nnz(n, 2, i, j, rows2, vals2);
        put(row + rows2[0], blk.offset + p, -vals2[0]);
        put(row + rows2[1], blk.offset + p, -vals2[1]);
        ++p;
      }
    for (int r = 0; r < len; ++r) rhs.push_back(0.0);
    dims.psd.push_back(2 * n);
    tag(kind, user, -1, len);
  };
  psd_var_block(prog.noise, ConstraintKind::NoisePsd, -1);
  for (int k = 0; k < K; ++k)
    if (prog.beams[k].full)
      psd_var_block(prog.beams[k], ConstraintKind::BeamPsd, k);

  cone::VectorXd c = cone::VectorXd::Zero(nvar);
  ComplexMatrix eye = ComplexMatrix::Identity(n, n);
  for (int k = 0; k < K; ++k) {
    std::vector<double> tc = trace_coeffs(prog.beams[k], eye);
    for (int p = 0; p < prog.beams[k].count; ++p) c[prog.beams[k].offset + p] = tc[p];
  }
  for (int i = 0; i < n; ++i) c[prog.noise.offset + i] = 1.0;

  prog.problem.G.resize(row, nvar);
  prog.problem.G.setFromTriplets(trips.begin(), trips.end());
  prog.problem.h = Eigen::Map<cone::VectorXd>(rhs.data(), row);
  prog.problem.c = c;
  prog.problem.dims = dims;
  prog.problem.validate();
  return prog;
}

}  // namespace

ConicProgram build_program(const ProblemInstance& inst) {
  return build_impl(inst, nullptr, -1.0);
}

ConicProgram build_program(const ProblemInstance& inst,
                           const std::vector<ComplexMatrix>& beam_dirs) {
  if (static_cast<int>(beam_dirs.size()) != inst.users())
    throw std::invalid_argument("build_program: one direction set per desired receiver");
  return build_impl(inst, &beam_dirs, -1.0);
}

ConicProgram build_program(const ProblemInstance& inst,
                           const std::vector<ComplexMatrix>& beam_dirs,
                           double fixed_split) {
  if (static_cast<int>(beam_dirs.size()) != inst.users())
    throw std::invalid_argument("build_program: one direction set per desired receiver");
  return build_impl(inst, &beam_dirs, fixed_split);
}

std::pair<BeamformingSolution, DualCertificate> solve_program(
    const ConicProgram& prog, const cone::Settings& settings) {
  auto tic = std::chrono::steady_clock::now();
  cone::Result res = cone::solve(prog.problem, settings);
  auto toc = std::chrono::steady_clock::now();

  const int K = prog.inst.users(), M = prog.inst.eavesdroppers();
  BeamformingSolution sol;
  DualCertificate cert;
  sol.solve_ms = std::chrono::duration<double, std::milli>(toc - tic).count();
  sol.iterations = res.iterations;
  sol.gap = res.gap;
  sol.primal_residual = res.primal_residual;
  sol.dual_residual = res.dual_residual;
  cert.duality_gap = res.gap;

  switch (res.status) {
    case cone::SolveStatus::Optimal: sol.status = SolutionStatus::Optimal; break;
    case cone::SolveStatus::PrimalInfeasible: sol.status = SolutionStatus::Infeasible; break;
    default: sol.status = SolutionStatus::NumericalFailure; break;
  }
  if (sol.status != SolutionStatus::Optimal) return {sol, cert};

  for (int k = 0; k < K; ++k) sol.W.push_back(block_matrix(prog.beams[k], res.x));
  sol.V = block_matrix(prog.noise, res.x);
  if (prog.fixed_split >= 0.0)
    sol.rho.assign(K, prog.fixed_split);
  else
    for (int k = 0; k < K; ++k) sol.rho.push_back(res.x[prog.rho_offset + k]);
  sol.objective_w = std::real(sol.V.trace());
  for (const ComplexMatrix& Wk : sol.W) sol.objective_w += std::real(Wk.trace());

  cert.alpha.assign(K, 0.0);
  cert.beta.assign(K, 0.0);
  cert.nu.assign(M, 0.0);
  cert.Z.assign(K, ComplexMatrix());
  cert.X.assign(M, std::vector<ComplexMatrix>(K));
  for (const RowBlock& rb : prog.rows) {
    switch (rb.kind) {
      case ConstraintKind::SinrFloor:
        cert.alpha[rb.user] = res.z[rb.row0];
        break;
      case ConstraintKind::UserHarvestFloor:
        cert.beta[rb.user] = res.z[rb.row0];
        break;
      case ConstraintKind::RoamHarvestFloor:
        cert.nu[rb.eav] = res.z[rb.row0];
        break;
      case ConstraintKind::EavRateCap:
        cert.X[rb.eav][rb.user] = 2.0 * complex_from_embedding(cone::smat(
                                            res.z.segment(rb.row0, rb.rows)));
        break;
      case ConstraintKind::NoisePsd:
        cert.Y = 2.0 * complex_from_embedding(cone::smat(res.z.segment(rb.row0, rb.rows)));
        break;
      case ConstraintKind::BeamPsd:
        cert.Z[rb.user] = 2.0 * complex_from_embedding(cone::smat(res.z.segment(rb.row0, rb.rows)));
        break;
      default: break;
    }
  }
  return {sol, cert};
}

FeasibilityReport verify_primal(const ProblemInstance& inst,
                                const std::vector<ComplexMatrix>& W,
                                const ComplexMatrix& V,
                                const std::vector<double>& rho) {
  const int K = inst.users(), M = inst.eavesdroppers();
  FeasibilityReport rep;
  rep.worst = std::numeric_limits<double>::infinity();
  auto note = [&](std::vector<double>& dst, double margin) {
    dst.push_back(margin);
    rep.worst = std::min(rep.worst, margin);
  };

  for (int k = 0; k < K; ++k) {
    double s = sinr(W, V, inst.h[k], rho[k], k, inst.sigma_ant_w, inst.sigma_s_w);
    note(rep.sinr_margin, s / inst.gamma_req[k] - 1.0);
    if (inst.p_min_desired_w[k] > 0.0) {
      double e = harvested_desired(W, V, inst.h[k], rho[k], inst.eta, inst.sigma_ant_w);
      note(rep.harvest_margin, e / inst.p_min_desired_w[k] - 1.0);
    }
    note(rep.split_margin, std::min(rho[k], 1.0 - rho[k]));
  }
  for (int m = 0; m < M; ++m) {
    if (inst.p_min_roaming_w[m] > 0.0) {
      double e = harvested_roaming(W, V, inst.g[m], inst.eta, inst.sigma_ant_w);
      note(rep.roam_margin, e / inst.p_min_roaming_w[m] - 1.0);
    }
    for (int k = 0; k < K; ++k) {
      double xim1 = std::exp2(inst.r_eav_at(m, k)) - 1.0;
      double marg = rate_cap_margin(W[k], V, inst.g[m], inst.sigma_ant_w,
                                    inst.sigma_s_w, inst.r_eav_at(m, k));
      note(rep.rate_cap_margin, marg / xim1);
    }
  }

  auto eig_floor = [](const ComplexMatrix& H) {
    Eigen::SelfAdjointEigenSolver<ComplexMatrix> es((H + H.adjoint()) / 2.0,
                                                    Eigen::EigenvaluesOnly);
    double lo = es.eigenvalues().minCoeff();
    double hi = std::abs(es.eigenvalues().maxCoeff());
    return lo / std::max(1.0, hi);
  };
  rep.beam_eig_floor = std::numeric_limits<double>::infinity();
  for (const ComplexMatrix& Wk : W)
    rep.beam_eig_floor = std::min(rep.beam_eig_floor, eig_floor(Wk));
  rep.noise_eig_floor = eig_floor(V);
  rep.worst = std::min({rep.worst, rep.beam_eig_floor, rep.noise_eig_floor});
  return rep;
}

}  // namespace swiptbeam
