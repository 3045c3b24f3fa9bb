#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <Eigen/Eigenvalues>
#include <swiptbeam/cone/solver.hpp>
#include <vector>

using namespace swiptbeam::cone;
using Eigen::MatrixXd;
using Eigen::VectorXd;
using Triplet = Eigen::Triplet<double>;

namespace {

Problem make_problem(int m, int n, const std::vector<Triplet>& trip, VectorXd h, VectorXd c,
                     ConeDims dims) {
  Problem p;
  p.G.resize(m, n);
  p.G.setFromTriplets(trip.begin(), trip.end());
  p.h = std::move(h);
  p.c = std::move(c);
  p.dims = std::move(dims);
  return p;
}

}  // namespace

TEST_CASE("one variable bound from below") {
  // min x subject to x >= 1
  Problem p = make_problem(1, 1, {{0, 0, -1.0}}, -VectorXd::Ones(1), VectorXd::Ones(1),
                           ConeDims{1, {}, {}});
  Result r = solve(p);
  REQUIRE(r.status == SolveStatus::Optimal);
  CHECK(r.x[0] == doctest::Approx(1.0).epsilon(1e-7));
  CHECK(r.primal_objective == doctest::Approx(1.0).epsilon(1e-7));
  CHECK(r.z[0] == doctest::Approx(1.0).epsilon(1e-6));  // sensitivity of the bound
}

TEST_CASE("two variable box LP") {
  // max x + y with x <= 1, y <= 2, x, y >= 0
  std::vector<Triplet> t{{0, 0, 1.0}, {1, 1, 1.0}, {2, 0, -1.0}, {3, 1, -1.0}};
  VectorXd h(4);
  h << 1, 2, 0, 0;
  VectorXd c(2);
  c << -1, -1;
  Result r = solve(make_problem(4, 2, t, h, c, ConeDims{4, {}, {}}));
  REQUIRE(r.status == SolveStatus::Optimal);
  CHECK(r.primal_objective == doctest::Approx(-3.0).epsilon(1e-7));
  CHECK(r.x[0] == doctest::Approx(1.0).epsilon(1e-6));
  CHECK(r.x[1] == doctest::Approx(2.0).epsilon(1e-6));
  CHECK(std::abs(r.gap) < 1e-6);
}

TEST_CASE("linear objective over the unit ball") {
  // min c'x subject to ||x|| <= 1: optimum -||c|| at -c/||c||
  std::vector<Triplet> t{{1, 0, -1.0}, {2, 1, -1.0}, {3, 2, -1.0}};
  VectorXd h = VectorXd::Zero(4);
  h[0] = 1.0;
  VectorXd c(3);
  c << 1.0, -2.0, 0.5;
  Result r = solve(make_problem(4, 3, t, h, c, ConeDims{0, {4}, {}}));
  REQUIRE(r.status == SolveStatus::Optimal);
  CHECK(r.primal_objective == doctest::Approx(-c.norm()).epsilon(1e-7));
  CHECK((r.x + c / c.norm()).norm() < 1e-6);
}

TEST_CASE("hyperbolic constraint through a rotated cone") {
  // min t subject to t*rho >= 1, rho <= 1/2: optimum t = 2
  // orthant row for the bound, then the second order block (t + rho, 2, t - rho)
  VectorXd c(2);
  c << 1, 0;
  std::vector<Triplet> t2{{0, 1, 1.0}, {1, 0, -1.0}, {1, 1, -1.0}, {3, 0, -1.0}, {3, 1, 1.0}};
  VectorXd h2(4);
  h2 << 0.5, 0, 2, 0;
  Result r2 = solve(make_problem(4, 2, t2, h2, c, ConeDims{1, {3}, {}}));
  REQUIRE(r2.status == SolveStatus::Optimal);
  CHECK(r2.x[0] == doctest::Approx(2.0).epsilon(1e-6));
  CHECK(r2.x[1] == doctest::Approx(0.5).epsilon(1e-6));
}

TEST_CASE("largest eigenvalue as a semidefinite program") {
  // min t subject to t I - A >= 0
  MatrixXd A(3, 3);
  A << 2, 1, 0, 1, -1, 0.5, 0, 0.5, 1;
  VectorXd sA = svec(A), sI = svec(MatrixXd::Identity(3, 3));
  std::vector<Triplet> t;
  for (int i = 0; i < 6; ++i)
    if (sI[i] != 0.0) t.push_back({i, 0, -sI[i]});
  Result r = solve(make_problem(6, 1, t, -sA, VectorXd::Ones(1), ConeDims{0, {}, {3}}));
  REQUIRE(r.status == SolveStatus::Optimal);
  Eigen::SelfAdjointEigenSolver<MatrixXd> es(A);
  CHECK(r.x[0] == doctest::Approx(es.eigenvalues().maxCoeff()).epsilon(1e-7));
}

TEST_CASE("minimal trace with a quadratic form floor, duals included") {
  // min tr(X) subject to h'Xh >= 1, X >= 0 over real symmetric X.
  // Optimum h h'/||h||^4 with value 1/||h||^2; dual of the floor is 1/||h||^2
  // and the semidefinite dual is I - h h'/||h||^2.
  VectorXd hh(3);
  hh << 1.0, 2.0, -0.5;
  MatrixXd Hh = hh * hh.transpose();
  VectorXd sH = svec(Hh);
  std::vector<Triplet> t;
  for (int i = 0; i < 6; ++i) {
    if (sH[i] != 0.0) t.push_back({0, i, -sH[i]});
    t.push_back({1 + i, i, -1.0});
  }
  VectorXd h = VectorXd::Zero(7);
  h[0] = -1.0;
  Result r = solve(make_problem(7, 6, t, h, svec(MatrixXd::Identity(3, 3)), ConeDims{1, {}, {3}}));
  REQUIRE(r.status == SolveStatus::Optimal);
  double n2 = hh.squaredNorm();
  CHECK(r.primal_objective == doctest::Approx(1.0 / n2).epsilon(1e-7));
  CHECK((smat(r.x) - Hh / (n2 * n2)).norm() < 1e-6);
  CHECK(r.z[0] == doctest::Approx(1.0 / n2).epsilon(1e-5));
  MatrixXd Z = smat(r.z.segment(1, 6));
  CHECK((Z - (MatrixXd::Identity(3, 3) - Hh / n2)).norm() < 1e-5);
  // complementary slackness
  CHECK((Z * smat(r.x)).norm() < 1e-7);
}

TEST_CASE("conflicting bounds produce a primal infeasibility certificate") {
  // x >= 1 and x <= -1
  std::vector<Triplet> t{{0, 0, -1.0}, {1, 0, 1.0}};
  VectorXd h(2);
  h << -1, -1;
  Result r = solve(make_problem(2, 1, t, h, VectorXd::Ones(1), ConeDims{2, {}, {}}));
  REQUIRE(r.status == SolveStatus::PrimalInfeasible);
  // certificate: z >= 0, G'z ~ 0, h'z = -1
  CHECK(r.z.minCoeff() >= -1e-12);
  CHECK(std::abs(h.dot(r.z) + 1.0) < 1e-8);
  CHECK(std::abs(-r.z[0] + r.z[1]) < 1e-6);
}

TEST_CASE("unbounded objective is flagged as dual infeasible") {
  // min -x subject to x >= 0
  Result r = solve(make_problem(1, 1, {{0, 0, -1.0}}, VectorXd::Zero(1), -VectorXd::Ones(1),
                                ConeDims{1, {}, {}}));
  CHECK(r.status == SolveStatus::DualInfeasible);
}

TEST_CASE("mixed cone problem") {
  // min t + u subject to t I - A >= 0, ||(x1,x2)|| <= u, x1 >= 3, x2 = free >= 1
  MatrixXd A(2, 2);
  A << 1, 0.3, 0.3, 0.5;
  // vars: t, u, x1, x2
  std::vector<Triplet> t;
  VectorXd h = VectorXd::Zero(2 + 3 + 3);
  // orthant: x1 >= 3, x2 >= 1
  t.push_back({0, 2, -1.0});
  h[0] = -3.0;
  t.push_back({1, 3, -1.0});
  h[1] = -1.0;
  // soc: (u, x1, x2)
  t.push_back({2, 1, -1.0});
  t.push_back({3, 2, -1.0});
  t.push_back({4, 3, -1.0});
  // psd: t I - A
  VectorXd sI = svec(MatrixXd::Identity(2, 2)), sA = svec(A);
  for (int i = 0; i < 3; ++i) {
    if (sI[i] != 0.0) t.push_back({5 + i, 0, -sI[i]});
    h[5 + i] = -sA[i];
  }
  VectorXd c = VectorXd::Zero(4);
  c[0] = 1.0;
  c[1] = 1.0;
  Result r = solve(make_problem(8, 4, t, h, c, ConeDims{2, {3}, {2}}));
  REQUIRE(r.status == SolveStatus::Optimal);
  Eigen::SelfAdjointEigenSolver<MatrixXd> es(A);
  double expect = es.eigenvalues().maxCoeff() + std::hypot(3.0, 1.0);
  CHECK(r.primal_objective == doctest::Approx(expect).epsilon(1e-7));
}

TEST_CASE("equilibration copes with badly scaled data") {
  // x >= 5 written with a 1e-8 row and x <= 7 written with a 1e+6 row
  std::vector<Triplet> t{{0, 0, -1e-8}, {1, 0, 1e6}};
  VectorXd h(2);
  h << -5e-8, 7e6;
  Result r = solve(make_problem(2, 1, t, h, VectorXd::Ones(1), ConeDims{2, {}, {}}));
  REQUIRE(r.status == SolveStatus::Optimal);
  CHECK(r.x[0] == doctest::Approx(5.0).epsilon(1e-6));
}

TEST_CASE("solves are deterministic") {
  MatrixXd A(3, 3);
  A << 2, 1, 0, 1, -1, 0.5, 0, 0.5, 1;
  VectorXd sA = svec(A), sI = svec(MatrixXd::Identity(3, 3));
  std::vector<Triplet> t;
  for (int i = 0; i < 6; ++i)
    if (sI[i] != 0.0) t.push_back({i, 0, -sI[i]});
  Problem p = make_problem(6, 1, t, -sA, VectorXd::Ones(1), ConeDims{0, {}, {3}});
  Result a = solve(p), b = solve(p);
  CHECK((a.x - b.x).norm() == 0.0);
  CHECK(a.iterations == b.iterations);
}
