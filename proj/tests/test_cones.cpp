#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <swiptbeam/channel.hpp>
#include <swiptbeam/cone/cones.hpp>

using namespace swiptbeam;
using namespace swiptbeam::cone;

namespace {

ConeDims mixed_dims() {
  ConeDims d;
  d.nonneg = 4;
  d.soc = {3, 5};
  d.psd = {3, 4};
  return d;
}

// random strictly interior point of the cone
VectorXd interior_point(const ConeOps& ops, Rng& rng) {
  const ConeDims& d = ops.dims();
  VectorXd v(ops.total());
  for (int i = 0; i < d.nonneg; ++i) v[i] = 0.1 + std::abs(rng.normal());
  for (size_t i = 0; i < d.soc.size(); ++i) {
    int q = d.soc[i], off = ops.soc_offset(static_cast<int>(i));
    for (int j = 1; j < q; ++j) v[off + j] = rng.normal();
    v[off] = v.segment(off + 1, q - 1).norm() + 0.1 + std::abs(rng.normal());
  }
  for (size_t i = 0; i < d.psd.size(); ++i) {
    int p = d.psd[i], off = ops.psd_offset(static_cast<int>(i));
    MatrixXd A(p, p);
    for (int c = 0; c < p; ++c)
      for (int r = 0; r < p; ++r) A(r, c) = rng.normal();
    MatrixXd S = A * A.transpose() + 0.1 * MatrixXd::Identity(p, p);
    v.segment(off, svec_len(p)) = svec(S);
  }
  return v;
}

VectorXd random_direction(int n, Rng& rng) {
  VectorXd v(n);
  for (int i = 0; i < n; ++i) v[i] = rng.normal();
  return v;
}

}  // namespace

TEST_CASE("svec and smat are inverse isometries") {
  Rng rng(5);
  MatrixXd A(4, 4), B(4, 4);
  for (int j = 0; j < 4; ++j)
    for (int i = 0; i < 4; ++i) {
      A(i, j) = rng.normal();
      B(i, j) = rng.normal();
    }
  A = (A + A.transpose()).eval();
  B = (B + B.transpose()).eval();
  CHECK((smat(svec(A)) - A).norm() < 1e-14);
  CHECK(svec(A).dot(svec(B)) == doctest::Approx((A * B).trace()).epsilon(1e-12));
  CHECK(svec_len(4) == 10);
}

TEST_CASE("identity has unit margin in every block") {
  ConeOps ops(mixed_dims());
  VectorXd e = ops.identity();
  CHECK(ops.margin(e) == doctest::Approx(1.0));
  CHECK(ops.margin(VectorXd::Zero(ops.total())) == doctest::Approx(0.0));
  // margin is exactly additive along the identity
  Rng rng(9);
  VectorXd s = interior_point(ops, rng);
  CHECK(ops.margin(s + 2.5 * e) == doctest::Approx(ops.margin(s) + 2.5).epsilon(1e-10));
  CHECK(ops.degree() == 4 + 2 + 3 + 4);
}

TEST_CASE("Nesterov-Todd scaling maps both points to the same scaled point") {
  ConeOps ops(mixed_dims());
  Rng rng(13);
  for (int trial = 0; trial < 10; ++trial) {
    VectorXd s = interior_point(ops, rng), z = interior_point(ops, rng);
    Scaling sc = ops.compute_scaling(s, z);
    CHECK((ops.apply_W(sc, z) - sc.lambda).norm() < 1e-8 * sc.lambda.norm());
    CHECK((ops.apply_WinvT(sc, s) - sc.lambda).norm() < 1e-8 * sc.lambda.norm());
    // H z = W'W z = s and the inverse undoes it
    VectorXd Hz = ops.apply_WT(sc, ops.apply_W(sc, z));
    CHECK((Hz - s).norm() < 1e-8 * s.norm());
    CHECK((ops.apply_Hinv(sc, s) - z).norm() < 1e-8 * z.norm());
    // <s, z> = <lambda, lambda>
    CHECK(s.dot(z) == doctest::Approx(sc.lambda.squaredNorm()).epsilon(1e-10));
  }
}

TEST_CASE("W round trips with its inverse") {
  ConeOps ops(mixed_dims());
  Rng rng(17);
  VectorXd s = interior_point(ops, rng), z = interior_point(ops, rng);
  Scaling sc = ops.compute_scaling(s, z);
  VectorXd u = random_direction(ops.total(), rng);
  CHECK((ops.apply_Winv(sc, ops.apply_W(sc, u)) - u).norm() < 1e-9 * u.norm());
  CHECK((ops.apply_WinvT(sc, ops.apply_WT(sc, u)) - u).norm() < 1e-9 * u.norm());
}

TEST_CASE("scaling rejects points outside the cone interior") {
  ConeOps ops(mixed_dims());
  Rng rng(19);
  VectorXd s = interior_point(ops, rng), z = interior_point(ops, rng);
  VectorXd bad = s;
  bad[0] = -1.0;
  CHECK_THROWS_AS(ops.compute_scaling(bad, z), std::runtime_error);
}

TEST_CASE("Jordan multiplication and division by the scaled point invert") {
  ConeOps ops(mixed_dims());
  Rng rng(23);
  VectorXd s = interior_point(ops, rng), z = interior_point(ops, rng);
  Scaling sc = ops.compute_scaling(s, z);
  VectorXd d = random_direction(ops.total(), rng);
  VectorXd u = ops.jordan_div_by_lambda(sc.lambda, d);
  CHECK((ops.jordan_mul(sc.lambda, u) - d).norm() < 1e-9 * d.norm());
  // identity is neutral
  CHECK((ops.jordan_mul(ops.identity(), d) - d).norm() < 1e-14);
}

TEST_CASE("max_step lands exactly on the cone boundary") {
  ConeOps ops(mixed_dims());
  Rng rng(29);
  for (int trial = 0; trial < 20; ++trial) {
    VectorXd s = interior_point(ops, rng), z = interior_point(ops, rng);
    Scaling sc = ops.compute_scaling(s, z);
    VectorXd dir = random_direction(ops.total(), rng);
    double cap = 1e6;
    double t = ops.max_step(sc.lambda, dir, cap);
    if (t < cap) {
      CHECK(std::abs(ops.margin(sc.lambda + t * dir)) < 1e-6);
      CHECK(ops.margin(sc.lambda + 0.99 * t * dir) > 0.0);
    } else {
      CHECK(ops.margin(sc.lambda + cap * dir) > 0.0);
    }
  }
}
