#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <swiptbeam/baselines.hpp>
#include <swiptbeam/recovery.hpp>

using namespace swiptbeam;

namespace {

ProblemInstance random_instance(int n_tx, int K, int M, int n_rx, uint64_t seed) {
  ScenarioConfig cfg;
  cfg.n_tx = n_tx;
  cfg.n_desired = K;
  cfg.n_roaming = M;
  cfg.n_rx_eav = n_rx;
  ChannelRealization ch = generate_scenario(cfg, seed);
  return ProblemInstance::make(cfg, ch);
}

// Single receiver on the first axis, one single-antenna roaming receiver on
// the same axis with gain g1. The leak budget of one bit caps the beam power
// near (sigma_ant + sigma_s) / g1^2, so the split window is decided by the
// processing-noise term and the harvest floor instead of by raw power.
ProblemInstance pinched_instance(double g1, double p_min) {
  ProblemInstance inst;
  inst.n_tx = 2;
  ComplexVector h(2);
  h << 1.0, 0.0;
  inst.h.push_back(h);
  ComplexMatrix g(2, 1);
  g << g1, 0.0;
  inst.g.push_back(g);
  inst.gamma_req = {2.0};
  inst.r_eav_bits = {1.0};
  inst.p_min_desired_w = {p_min};
  inst.p_min_roaming_w = {0.0};
  inst.eta = 0.5;
  inst.sigma_ant_w = 0.1;
  inst.sigma_s_w = 0.1;
  return inst;
}

double interference_w(const ProblemInstance& inst, const BeamformingSolution& sol) {
  double worst = 0.0;
  for (int k = 0; k < inst.users(); ++k) {
    double sum = 0.0;
    for (int j = 0; j < inst.users(); ++j)
      if (j != k) sum += std::real(inst.h[k].dot(sol.W[j] * inst.h[k]));
    worst = std::max(worst, sum);
  }
  return worst;
}

}  // namespace

TEST_CASE("zero-forcing directions null every other receiver") {
  ProblemInstance inst = random_instance(8, 3, 0, 2, 11);
  ZfDirectionSet set = zf_directions(inst.h);
  REQUIRE(set.w.size() == 3);
  CHECK(set.q == std::vector<double>(3, 0.0));
  for (int k = 0; k < 3; ++k) {
    CHECK(set.w[k].norm() == doctest::Approx(1.0));
    for (int j = 0; j < 3; ++j) {
      if (j == k) continue;
      INFO("beam ", k, " receiver ", j);
      CHECK(std::abs(inst.h[j].dot(set.w[k])) <= 1e-8 * inst.h[j].norm());
    }
  }
}

TEST_CASE("orthogonal receivers get their own matched filters") {
  ComplexVector h1(2), h2(2);
  h1 << Complex(0.6, 0.8), 0.0;
  h2 << 0.0, Complex(0.0, 2.0);
  ZfDirectionSet set = zf_directions({h1, h2});
  CHECK(std::abs(h1.dot(set.w[0])) == doctest::Approx(h1.norm()));
  CHECK(std::abs(h2.dot(set.w[1])) == doctest::Approx(h2.norm()));
}

TEST_CASE("a lone receiver falls back to matched filtering") {
  ComplexVector h(3);
  h << Complex(1.0, -1.0), 2.0, Complex(0.0, 0.5);
  ZfDirectionSet set = zf_directions({h});
  REQUIRE(set.w.size() == 1);
  CHECK(std::abs(h.dot(set.w[0])) == doctest::Approx(h.norm()));
  CHECK(set.w[0].norm() == doctest::Approx(1.0));

  ZfDirectionSet again = zf_directions({h});
  CHECK((set.w[0] - again.w[0]).norm() == 0.0);
}

TEST_CASE("more receivers than antennas is an error") {
  std::vector<ComplexVector> h(3, ComplexVector::Ones(2));
  CHECK_THROWS_AS(zf_directions(h), std::invalid_argument);
  CHECK_THROWS_AS(zf_directions({}), std::invalid_argument);
}

TEST_CASE("optimal beats baseline 1 beats baseline 2 on jointly feasible draws") {
  int paired = 0;
  for (uint64_t seed : {3u, 17u, 29u, 41u}) {
    ProblemInstance inst = random_instance(6, 2, 2, 2, seed);
    auto [opt, cert] = solve_program(build_program(inst));
    auto [b1, cert1] = solve_baseline1(inst);
    auto [b2, cert2] = solve_baseline2(inst);
    if (opt.status != SolutionStatus::Optimal || b1.status != SolutionStatus::Optimal ||
        b2.status != SolutionStatus::Optimal)
      continue;
    ++paired;
    INFO("seed ", seed);
    CHECK(opt.objective_w <= b1.objective_w * (1.0 + 1e-6));
    CHECK(b1.objective_w <= b2.objective_w * (1.0 + 1e-6));

    for (const BeamformingSolution& sol : {b1, b2}) {
      CHECK(interference_w(inst, sol) <= 1e-12);
      CHECK(rank_profile(sol.W).all_rank_one());
      FeasibilityReport rep = verify_primal(inst, sol.W, sol.V, sol.rho);
      INFO("worst margin ", rep.worst);
      CHECK(rep.feasible());
    }
    for (double r : b2.rho) CHECK(r == 0.5);
  }
  CHECK(paired >= 2);
}

TEST_CASE("matched filtering is optimal for one receiver with no roamers") {
  ProblemInstance inst = random_instance(4, 1, 0, 2, 5);
  inst.p_min_desired_w = {0.0};
  auto [opt, cert] = solve_program(build_program(inst));
  auto [b1, cert1] = solve_baseline1(inst);
  REQUIRE(opt.status == SolutionStatus::Optimal);
  REQUIRE(b1.status == SolutionStatus::Optimal);
  CHECK(b1.objective_w == doctest::Approx(opt.objective_w).epsilon(1e-5));
}

TEST_CASE("a pinched split window strands the fixed split") {
  // feasible splits are [2/3, 0.88]: below 2/3 the processing noise pushes
  // the decoded-signal floor past the leak cap, above 0.88 the harvester
  // starves. Baseline 1 settles at sqrt(2/3) where the two floors cross.
  ProblemInstance inst = pinched_instance(std::sqrt(0.4), 0.05);
  auto [b1, cert1] = solve_baseline1(inst);
  auto [b2, cert2] = solve_baseline2(inst);
  REQUIRE(b1.status == SolutionStatus::Optimal);
  double rho_star = std::sqrt(2.0 / 3.0);
  CHECK(b1.rho[0] == doctest::Approx(rho_star).epsilon(1e-3));
  CHECK(b1.objective_w == doctest::Approx(0.2 + 0.2 / rho_star).epsilon(1e-4));
  CHECK(b2.status == SolutionStatus::Infeasible);
}

TEST_CASE("both baselines coincide when the free split lands on one half") {
  // harvest floor tuned so the floors cross exactly at one half
  ProblemInstance inst = pinched_instance(0.5, 0.175);
  auto [b1, cert1] = solve_baseline1(inst);
  auto [b2, cert2] = solve_baseline2(inst);
  REQUIRE(b1.status == SolutionStatus::Optimal);
  REQUIRE(b2.status == SolutionStatus::Optimal);
  CHECK(b1.rho[0] == doctest::Approx(0.5).epsilon(1e-3));
  CHECK(b1.objective_w == doctest::Approx(0.6).epsilon(1e-4));
  CHECK(b2.objective_w == doctest::Approx(0.6).epsilon(1e-4));
  FeasibilityReport rep = verify_primal(inst, b2.W, b2.V, b2.rho);
  CHECK(rep.feasible());
}
