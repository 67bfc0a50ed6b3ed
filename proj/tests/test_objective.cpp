#include <doctest.h>

#include "helpers.hpp"
#include "oracles.hpp"

using namespace fisher;

namespace {
const double kLog2 = std::log(2.0);
}

TEST_CASE("F on the 1x1 linear market at mu = 0") {
  auto inst = make_instance(Kind::Linear, {{1.0}}, {1.0});
  CHECK(eval_F(inst, {0.0}) == doctest::Approx(1.0));
}

TEST_CASE("F includes the outside option for quasi-linear buyers") {
  auto inst = make_instance(Kind::QuasiLinear, {{0.5}}, {1.0});
  // max{log 0.5 - log 0.5, 0} = 0, so F = p = 0.5
  CHECK(eval_F(inst, {std::log(0.5)}) == doctest::Approx(0.5));
}

TEST_CASE("F on the symmetric 2x2 cross market") {
  auto inst = make_instance(Kind::Linear, {{2.0, 1.0}, {1.0, 2.0}}, {1.0, 1.0});
  CHECK(eval_F(inst, {0.0, 0.0}) == doctest::Approx(2.0 + 2.0 * kLog2));
}

TEST_CASE("F_delta collapses to F for a single term") {
  auto inst = make_instance(Kind::Linear, {{1.0}}, {1.0});
  PriceBounds b = price_bounds(inst);
  auto smooth = make_smoothed(inst, b, 1.0, 1.0);
  CHECK(eval_F_delta(inst, smooth, {0.0}) == doctest::Approx(1.0));
}

TEST_CASE("F_delta hand evaluation with two tied goods") {
  auto inst = make_instance(Kind::Linear, {{1.0, 1.0}}, {1.0});
  PriceBounds b = price_bounds(inst);
  auto smooth = make_smoothed(inst, b, 0.5, 1.0);
  CHECK(eval_F_delta(inst, smooth, {0.0, 0.0}) == doctest::Approx(2.0 + 0.5 * kLog2));
}

TEST_CASE("sandwich: 0 <= F_delta - F <= delta log(m+1) ||B||_1") {
  testutil::Rng rng(11);
  for (int trial = 0; trial < 200; ++trial) {
    Kind kind = trial % 2 ? Kind::QuasiLinear : Kind::Linear;
    auto inst = testutil::random_instance(rng, rng.uniform_int(1, 6), rng.uniform_int(1, 6),
                                          kind);
    PriceBounds b = price_bounds(inst);
    const double delta = rng.uniform(1e-3, 1.0);
    auto smooth = make_smoothed(inst, b, delta, 1.0);
    auto mu = testutil::random_mu(rng, b, inst.goods());
    const double f = eval_F(inst, mu);
    const double fd = eval_F_delta(inst, smooth, mu);
    const double bound = delta * std::log(double(inst.goods()) + 1.0) * inst.budget_total();
    const double slack = 1e-12 * (1.0 + std::fabs(f));
    CHECK(fd >= f - slack);
    CHECK(fd <= f + bound + slack);
  }
}

TEST_CASE("gradient vanishes at the 1x1 stationary point") {
  auto inst = make_instance(Kind::Linear, {{1.0}}, {1.0});
  PriceBounds b = price_bounds(inst);
  for (double delta : {1.0, 0.1, 1e-3}) {
    auto smooth = make_smoothed(inst, b, delta, 1.0);
    auto g = grad_F_delta(inst, smooth, {0.0});
    CHECK(std::fabs(g[0]) < 1e-15);
  }
}

TEST_CASE("gradient matches central finite differences") {
  testutil::Rng rng(13);
  double worst = 0.0;
  for (int trial = 0; trial < 20; ++trial) {
    Kind kind = trial % 2 ? Kind::QuasiLinear : Kind::Linear;
    auto inst = testutil::random_instance(rng, rng.uniform_int(2, 6), rng.uniform_int(2, 6),
                                          kind);
    PriceBounds b = price_bounds(inst);
    auto smooth = make_smoothed(inst, b, rng.uniform(0.05, 0.8), 1.0);
    auto mu = testutil::random_mu(rng, b, inst.goods());
    auto g = grad_F_delta(inst, smooth, mu);
    auto fd = oracle::fd_gradient(inst, smooth, mu);
    for (int j = 0; j < inst.goods(); ++j) {
      const double rel = std::fabs(g[j] - fd[j]) / (1.0 + std::fabs(fd[j]));
      worst = std::max(worst, rel);
    }
  }
  CHECK(worst <= 1e-5);
}

TEST_CASE("gradient approaches the equal-split subgradient as delta -> 0") {
  testutil::Rng rng(17);
  for (int trial = 0; trial < 20; ++trial) {
    Kind kind = trial % 2 ? Kind::QuasiLinear : Kind::Linear;
    auto inst = testutil::random_instance(rng, rng.uniform_int(2, 5), rng.uniform_int(2, 5),
                                          kind);
    PriceBounds b = price_bounds(inst);
    auto mu = testutil::random_mu(rng, b, inst.goods());
    // random box points have unique per-buyer argmaxes almost surely
    auto smooth = make_smoothed(inst, b, 1e-9, 1.0);
    auto g = grad_F_delta(inst, smooth, mu);
    auto sg = subgrad_F(inst, mu);
    CHECK(testutil::linf(g, sg) <= 1e-6);
  }
}

TEST_CASE("subgradient splits tied budgets equally") {
  auto inst = make_instance(Kind::Linear, {{1.0, 1.0}}, {1.0});
  auto g = subgrad_F(inst, {0.0, 0.0});
  CHECK(g[0] == doctest::Approx(0.5));
  CHECK(g[1] == doctest::Approx(0.5));

  auto one = make_instance(Kind::Linear, {{1.0}}, {1.0});
  auto g1 = subgrad_F(one, {0.0});
  CHECK(std::fabs(g1[0]) < 1e-15);
}

TEST_CASE("box projection clamps and is idempotent") {
  CHECK(project_box({5.0}, 0.0, 1.0)[0] == doctest::Approx(1.0));
  CHECK(project_box({0.5}, 0.0, 1.0)[0] == doctest::Approx(0.5));
  testutil::Rng rng(19);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<double> mu(5);
    for (auto& x : mu) x = rng.uniform(-10.0, 10.0);
    auto once = project_box(mu, -1.0, 2.0);
    auto twice = project_box(once, -1.0, 2.0);
    CHECK(testutil::linf(once, twice) == 0.0);
  }
}

TEST_CASE("strong convexity and smoothness moduli hold on the relaxed box") {
  testutil::Rng rng(23);
  for (int trial = 0; trial < 60; ++trial) {
    Kind kind = trial % 2 ? Kind::QuasiLinear : Kind::Linear;
    auto inst = testutil::random_instance(rng, rng.uniform_int(1, 5), rng.uniform_int(1, 5),
                                          kind);
    PriceBounds b = price_bounds(inst);
    auto smooth = make_smoothed(inst, b, rng.uniform(0.05, 1.0), 1.0);
    auto x = testutil::random_mu(rng, b, inst.goods(), 1.0);
    auto y = testutil::random_mu(rng, b, inst.goods(), 1.0);
    auto gx = grad_F_delta(inst, smooth, x);
    auto gy = grad_F_delta(inst, smooth, y);

    double inner = 0.0, dist2 = 0.0, gdiff2 = 0.0;
    for (int j = 0; j < inst.goods(); ++j) {
      inner += gx[j] * (y[j] - x[j]);
      dist2 += (y[j] - x[j]) * (y[j] - x[j]);
      gdiff2 += (gx[j] - gy[j]) * (gx[j] - gy[j]);
    }
    const double fx = eval_F_delta(inst, smooth, x);
    const double fy = eval_F_delta(inst, smooth, y);
    CHECK(fy >= fx + inner + 0.5 * smooth.sigma * dist2 - 1e-9);
    CHECK(std::sqrt(gdiff2) <= smooth.L * std::sqrt(dist2) + 1e-9);
  }
}

TEST_CASE("demand weight rows sum to the budget") {
  testutil::Rng rng(29);
  for (int trial = 0; trial < 40; ++trial) {
    Kind kind = trial % 2 ? Kind::QuasiLinear : Kind::Linear;
    auto inst = testutil::random_instance(rng, rng.uniform_int(1, 6), rng.uniform_int(1, 6),
                                          kind);
    PriceBounds b = price_bounds(inst);
    auto smooth = make_smoothed(inst, b, rng.uniform(0.01, 1.0), 1.0);
    auto mu = testutil::random_mu(rng, b, inst.goods());
    std::vector<double> g;
    DemandWeights w;
    grad_F_delta(inst, smooth, mu, g, &w);
    for (int i = 0; i < inst.buyers(); ++i) {
      double row = w.d0[i];
      for (int j = 0; j < inst.goods(); ++j) {
        row += w.at(i, j);
        CHECK(w.at(i, j) >= 0.0);
      }
      CHECK(row / inst.budget(i) == doctest::Approx(1.0).epsilon(1e-12));
    }
  }
}
