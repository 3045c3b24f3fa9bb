#include "swiptbeam/verify.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>

#include "swiptbeam/metrics.hpp"
#include "swiptbeam/recovery.hpp"

namespace swiptbeam {

namespace {

ComplexMatrix random_matrix(int rows, int cols, Rng& rng) {
  ComplexMatrix M(rows, cols);
  for (int j = 0; j < cols; ++j)
    for (int i = 0; i < rows; ++i) M(i, j) = rng.cnormal();
  return M;
}

ComplexMatrix random_psd(int n, int rank, Rng& rng) {
  ComplexMatrix B = random_matrix(n, rank, rng);
  return B * B.adjoint();
}

ComplexMatrix random_unitary(int n, Rng& rng) {
  Eigen::HouseholderQR<ComplexMatrix> qr(random_matrix(n, n, rng));
  return qr.householderQ() * ComplexMatrix::Identity(n, n);
}

ProblemInstance scenario_instance(const ScenarioConfig& base, double gamma_db,
                                  uint64_t seed) {
  ScenarioConfig cfg = base;
  cfg.gamma_req_db = {gamma_db};
  ChannelRealization ch = generate_scenario(cfg, seed);
  return ProblemInstance::make(cfg, ch);
}

VerifyCheck lemma1_fuzz(uint64_t seed) {
  VerifyCheck check{.name = "lemma1-gap-fuzz"};
  Rng rng(mix_seed(seed, 101));
  check.total = 1000;
  for (int i = 0; i < check.total; ++i) {
    int n = 1 + static_cast<int>(rng.uniform() * 4.0);
    int rank = 1 + static_cast<int>(rng.uniform() * n);
    double scale = std::pow(10.0, rng.uniform(-2.0, 2.0));
    ComplexMatrix A = scale * random_psd(n, std::min(rank, n), rng);
    double gap = det_trace_gap(A);
    bool low_rank = numerical_rank(A, 1e-9) <= 1;
    bool good = gap >= -1e-9 && (low_rank ? gap <= 1e-9 : gap > 1e-9);
    check.passed += good ? 1 : 0;
  }
  check.ok = check.passed == check.total;
  return check;
}

VerifyCheck prop1_equivalence(const VerifyOptions& opt) {
  VerifyCheck check{.name = "prop1-equivalence"};
  if (opt.base.n_roaming == 0) {
    check.skipped = true;
    check.note = "no roaming receivers; rate caps vacuous";
    return check;
  }
  Rng rng(mix_seed(opt.seed, 202));
  double sa = dbm_to_watt(opt.base.sigma_ant_dbm);
  double ss = dbm_to_watt(opt.base.sigma_s_dbm);
  check.total = 1000;
  for (int i = 0; i < check.total; ++i) {
    int n = 3 + static_cast<int>(rng.uniform() * 3.0);
    int nr = 1 + static_cast<int>(rng.uniform() * 3.0);
    ComplexMatrix G = random_matrix(n, nr, rng);
    ComplexMatrix V = sa * random_psd(n, n, rng);
    ComplexVector w = random_matrix(n, 1, rng);
    ComplexMatrix W = sa * (w * w.adjoint());
    double rate = eav_rate_upper(W, V, G, sa, ss);
    if (rate < 0.05) {
      W *= 0.1 / std::max(rate, 1e-12);
      rate = eav_rate_upper(W, V, G, sa, ss);
    }
    double r_hi = rate * 1.2 + 0.01;
    double r_lo = rate * 0.8;
    bool good = rate_cap_holds(W, V, G, sa, ss, r_hi) &&
                !rate_cap_holds(W, V, G, sa, ss, r_lo);
    check.passed += good ? 1 : 0;
  }
  check.ok = check.passed == check.total;
  return check;
}

VerifyCheck prop1_counterexample(const VerifyOptions& opt) {
  VerifyCheck check{.name = "prop1-counterexample"};
  if (opt.base.n_roaming == 0) {
    check.skipped = true;
    check.note = "no roaming receivers; rate caps vacuous";
    return check;
  }
  check.total = 1;
  ComplexMatrix G = ComplexMatrix::Identity(2, 2);
  ComplexMatrix V = ComplexMatrix::Zero(2, 2);
  ComplexMatrix W = ComplexMatrix::Identity(2, 2);
  double sa = 0.5, ss = 0.5, r = 1.0;
  bool lmi = rate_cap_holds(W, V, G, sa, ss, r);
  double rate = eav_rate_upper(W, V, G, sa, ss);
  if (lmi && rate > r + 1e-6) {
    check.passed = 1;
    check.note = "rank-two beam passes the cap yet leaks 2 bits";
  }
  check.ok = check.passed == check.total;
  return check;
}

VerifyCheck homogeneity(const VerifyOptions& opt) {
  VerifyCheck check{.name = "objective-homogeneity"};
  const double c = 7.25;
  int n = std::min(opt.seeds, 20);
  for (int i = 0; i < n; ++i) {
    ProblemInstance inst = scenario_instance(
        opt.base, opt.base.gamma_req_db_at(0), mix_seed(opt.seed, 300 + i));
    auto [sol, cert] = solve_program(build_program(inst), opt.solver);
    ProblemInstance scaled = inst;
    scaled.sigma_ant_w *= c;
    scaled.sigma_s_w *= c;
    for (double& p : scaled.p_min_desired_w) p *= c;
    for (double& p : scaled.p_min_roaming_w) p *= c;
    auto [sol2, cert2] = solve_program(build_program(scaled), opt.solver);
    if (sol.status != SolutionStatus::Optimal ||
        sol2.status != SolutionStatus::Optimal)
      continue;
    ++check.total;
    double rel = std::abs(sol2.objective_w - c * sol.objective_w) /
                 (c * sol.objective_w);
    check.passed += rel <= 1e-6 ? 1 : 0;
  }
  check.ok = check.total > 0 && check.passed == check.total;
  return check;
}

VerifyCheck unitary_invariance(const VerifyOptions& opt) {
  VerifyCheck check{.name = "unitary-invariance"};
  int n = std::min(opt.seeds, 20);
  for (int i = 0; i < n; ++i) {
    ProblemInstance inst = scenario_instance(
        opt.base, opt.base.gamma_req_db_at(0), mix_seed(opt.seed, 400 + i));
    Rng rng(mix_seed(opt.seed, 500 + i));
    ComplexMatrix U = random_unitary(inst.n_tx, rng);
    ProblemInstance rotated = inst;
    for (ComplexVector& h : rotated.h) h = U * h;
    for (ComplexMatrix& g : rotated.g) g = U * g;
    auto [sol, cert] = solve_program(build_program(inst), opt.solver);
    auto [sol2, cert2] = solve_program(build_program(rotated), opt.solver);
    if (sol.status != SolutionStatus::Optimal ||
        sol2.status != SolutionStatus::Optimal)
      continue;
    ++check.total;
    double rel =
        std::abs(sol2.objective_w - sol.objective_w) / sol.objective_w;
    check.passed += rel <= 1e-6 ? 1 : 0;
  }
  check.ok = check.total > 0 && check.passed == check.total;
  return check;
}

VerifyCheck gamma_monotonicity(const VerifyOptions& opt) {
  VerifyCheck check{.name = "gamma-monotonicity"};
  const double gammas[] = {0.0, 5.0, 10.0, 15.0, 20.0};
  for (int i = 0; i < 3; ++i) {
    ScenarioConfig cfg = opt.base;
    ChannelRealization ch = generate_scenario(cfg, mix_seed(opt.seed, 600 + i));
    double prev = 0.0;
    bool monotone = true, solved_all = true;
    for (double g : gammas) {
      cfg.gamma_req_db = {g};
      auto [sol, cert] =
          solve_program(build_program(ProblemInstance::make(cfg, ch)), opt.solver);
      if (sol.status != SolutionStatus::Optimal) {
        solved_all = false;
        break;
      }
      if (sol.objective_w < prev * (1.0 - 1e-6)) monotone = false;
      prev = sol.objective_w;
    }
    if (!solved_all) continue;
    ++check.total;
    check.passed += monotone ? 1 : 0;
  }
  check.ok = check.total > 0 && check.passed == check.total;
  return check;
}

VerifyCheck reav_monotonicity(const VerifyOptions& opt) {
  VerifyCheck check{.name = "leak-budget-monotonicity"};
  if (opt.base.n_roaming == 0) {
    check.skipped = true;
    check.note = "no roaming receivers; leak budgets vacuous";
    return check;
  }
  const double budgets[] = {0.5, 1.0, 2.0};
  for (int i = 0; i < 3; ++i) {
    ScenarioConfig cfg = opt.base;
    ChannelRealization ch = generate_scenario(cfg, mix_seed(opt.seed, 700 + i));
    double prev = std::numeric_limits<double>::infinity();
    bool monotone = true, solved_all = true;
    for (double r : budgets) {
      cfg.r_eav_bits = {r};
      auto [sol, cert] =
          solve_program(build_program(ProblemInstance::make(cfg, ch)), opt.solver);
      if (sol.status != SolutionStatus::Optimal) {
        solved_all = false;
        break;
      }
      if (sol.objective_w > prev * (1.0 + 1e-6)) monotone = false;
      prev = sol.objective_w;
    }
    if (!solved_all) continue;
    ++check.total;
    check.passed += monotone ? 1 : 0;
  }
  check.ok = check.total > 0 && check.passed == check.total;
  return check;
}

VerifyCheck grid_oracle(const VerifyOptions& opt) {
  VerifyCheck check{.name = "grid-oracle"};
  check.total = 1;
  ProblemInstance inst;
  inst.n_tx = 2;
  ComplexVector h(2);
  h << 1.0, 0.0;
  inst.h = {h};
  inst.gamma_req = {1.0};
  inst.p_min_desired_w = {0.1};
  inst.eta = 0.5;
  inst.sigma_ant_w = 0.1;
  inst.sigma_s_w = 0.1;
  auto [sol, cert] = solve_program(build_program(inst), opt.solver);

  double best = std::numeric_limits<double>::infinity();
  for (int i = 1; i < 20000; ++i) {
    double rho = i / 20000.0;
    double p_sinr = (inst.sigma_ant_w + inst.sigma_s_w / rho) * inst.gamma_req[0];
    double p_harv =
        inst.p_min_desired_w[0] / (inst.eta * (1.0 - rho)) - inst.sigma_ant_w;
    best = std::min(best, std::max(p_sinr, p_harv));
  }
  if (sol.status == SolutionStatus::Optimal &&
      std::abs(sol.objective_w - best) / best <= 1e-3)
    check.passed = 1;
  check.ok = check.passed == check.total;
  return check;
}

}  // namespace

VerifySummary run_verify(const VerifyOptions& opt) {
  opt.base.validate_or_throw();
  VerifySummary summary;
  summary.checks.push_back(lemma1_fuzz(opt.seed));
  summary.checks.push_back(prop1_equivalence(opt));
  summary.checks.push_back(prop1_counterexample(opt));
  summary.checks.push_back(homogeneity(opt));
  summary.checks.push_back(unitary_invariance(opt));
  summary.checks.push_back(gamma_monotonicity(opt));
  summary.checks.push_back(reav_monotonicity(opt));

  VerifyCheck kkt{.name = "kkt-splits"};
  VerifyCheck rank{.name = "rank-one-rate"};
  VerifyCheck recovery{.name = "rank-recovery"};
  int checkable_splits = 0;
  for (int i = 0; i < opt.seeds; ++i) {
    ProblemInstance inst = scenario_instance(
        opt.base, opt.base.gamma_req_db_at(0), mix_seed(opt.seed, 1000 + i));
    auto [sol, cert] = solve_program(build_program(inst), opt.solver);
    if (sol.status != SolutionStatus::Optimal) continue;

    ++kkt.total;
    KktReport rep = check_kkt(inst, sol, cert);
    bool good = rep.complementarity <= 1e-6;
    for (double r : rep.beam_dual_residual) good = good && r <= 1e-6;
    for (double r : rep.rho_residual) {
      if (r < 0.0) continue;
      ++checkable_splits;
      good = good && r <= 1e-4;
    }
    kkt.passed += good ? 1 : 0;

    ++rank.total;
    rank.passed += rank_profile(sol.W).all_rank_one() ? 1 : 0;

    if (recovery.total < 3) {
      ++recovery.total;
      try {
        RecoveredBeams rec = recover_rank_one(inst, sol, cert, -1.0);
        if (rec.objective_delta_rel <= 1e-6 && rec.feasibility.feasible())
          ++recovery.passed;
      } catch (const std::exception&) {
      }
    }
  }
  kkt.ok = kkt.total > 0 && kkt.passed == kkt.total;
  kkt.note = std::to_string(checkable_splits) + " closed-form splits checked";
  rank.ok = rank.total > 0 &&
            rank.passed >= static_cast<int>(std::ceil(0.99 * rank.total));
  recovery.ok = recovery.total > 0 && recovery.passed == recovery.total;
  recovery.note = "re-solve route forced";
  summary.checks.push_back(kkt);
  summary.checks.push_back(rank);
  summary.checks.push_back(recovery);
  summary.checks.push_back(grid_oracle(opt));
  return summary;
}

void print_summary(const VerifySummary& summary, std::ostream& out) {
  int failed = 0;
  for (const VerifyCheck& c : summary.checks) {
    const char* tag = c.skipped ? "[SKIP]" : (c.ok ? "[ OK ]" : "[FAIL]");
    failed += !c.ok && !c.skipped ? 1 : 0;
    out << tag << ' ' << c.name;
    for (size_t i = c.name.size(); i < 28; ++i) out << ' ';
    if (!c.skipped) out << c.passed << '/' << c.total;
    if (!c.note.empty()) out << "  (" << c.note << ')';
    out << '\n';
  }
  out << "verify: " << summary.checks.size() << " checks, " << failed
      << " failed\n";
}

}  // namespace swiptbeam
