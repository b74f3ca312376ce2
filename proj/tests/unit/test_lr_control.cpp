#include <doctest.h>

#include <cmath>
#include <limits>
#include <vector>

#include "svi/lr_control.hpp"
#include "test_support.hpp"

using namespace svi;
using Eigen::VectorXd;
using svi::testing::Gen;

namespace {

VectorXd scalar(double x) { return VectorXd::Constant(1, x); }

SnrWindow window_of(const std::vector<double> &values) {
  SnrWindow w(1);
  for (const double v : values) w.accumulate(scalar(v));
  return w;
}

} // namespace

TEST_CASE("accumulate") {
  SnrWindow w(2);
  CHECK(w.k() == -1);
  w.accumulate(VectorXd::Constant(2, 3.5));
  CHECK(w.k() == 0);
  CHECK(w.c()[0] == 0.0L);
  CHECK(w.a()[0] == 0.0L);

  const SnrWindow hand = window_of({0, 2, 2});
  CHECK(hand.k() == 2);
  CHECK(hand.a()[0] == 4.0L);
  CHECK(hand.b()[0] == 8.0L);
  CHECK(hand.c()[0] == 6.0L);

  const SnrWindow constant = window_of({7.25, 7.25, 7.25});
  CHECK(constant.a()[0] == 0.0L);
  CHECK(constant.b()[0] == 0.0L);
  CHECK(constant.c()[0] == 0.0L);

  CHECK_THROWS_AS(w.accumulate(VectorXd::Zero(3)), std::invalid_argument);
  CHECK_THROWS_AS(w.accumulate(VectorXd::Constant(2, std::numeric_limits<double>::infinity())),
                  std::invalid_argument);
}

TEST_CASE("rho examples") {
  CHECK(window_of({0, 2, 2}).rho()[0] == doctest::Approx(3.0));
  CHECK(window_of({0, 1, 0}).rho()[0] == 0.0);
  CHECK(window_of({0, 1, 2}).rho()[0] == std::numeric_limits<double>::infinity());
  CHECK(std::isnan(window_of({4, 4, 4}).rho()[0]));
  CHECK_THROWS_AS(window_of({1, 2}).rho(), std::logic_error);
}

TEST_CASE("mean_snr") {
  const double nan = std::numeric_limits<double>::quiet_NaN();
  const double inf = std::numeric_limits<double>::infinity();
  VectorXd rho(3);
  rho << 1.0, nan, 3.0;
  CHECK(*mean_snr(rho) == 2.0);
  rho << 1.0, inf, nan;
  CHECK(*mean_snr(rho) == inf);
  rho << nan, nan, nan;
  CHECK_FALSE(mean_snr(rho).has_value());
}

TEST_CASE("rho matches the Pearson oracle") {
  Gen gen(13);
  for (int t = 0; t < 500; ++t) {
    const int n = gen.integer(3, 200);
    const double slope = gen.normal(0.0, 0.05), noise = gen.uniform(0.1, 2.0);
    const double base = gen.normal(0.0, 10.0);
    std::vector<double> y;
    SnrWindow w(1);
    for (int j = 0; j < n; ++j) {
      y.push_back(base + slope * j + gen.normal(0.0, noise));
      w.accumulate(scalar(y.back()));
    }
    const double expected = svi::testing::snr_from_pearson(svi::testing::pearson_against_index(y));
    REQUIRE(std::abs(w.rho()[0] - expected) <= 1e-8 * std::max(1.0, std::abs(expected)));
  }
}

TEST_CASE("streaming sums equal batch sums") {
  Gen gen(14);
  const int n = 300;
  std::vector<VectorXd> points;
  SnrWindow w(3);
  for (int j = 0; j < n; ++j) {
    points.push_back(gen.vector(3, 5.0));
    w.accumulate(points.back());
  }
  for (Eigen::Index i = 0; i < 3; ++i) {
    long double a = 0, b = 0, c = 0;
    for (int j = 0; j < n; ++j) {
      const long double x = static_cast<long double>(points[static_cast<std::size_t>(j)][i]) -
                            static_cast<long double>(points[0][i]);
      a += x;
      b += x * x;
      c += static_cast<long double>(j) * x;
    }
    const auto k = static_cast<std::size_t>(i);
    CHECK(w.a()[k] == a);
    CHECK(w.b()[k] == b);
    CHECK(w.c()[k] == c);
  }
}

TEST_CASE("rho is invariant to shift and scale") {
  Gen gen(15);
  for (int t = 0; t < 50; ++t) {
    std::vector<double> y;
    for (int j = 0; j < 40; ++j) y.push_back(0.02 * j + gen.normal());
    const double base = window_of(y).rho()[0];

    std::vector<double> shifted = y, scaled = y;
    for (double &v : shifted) v += 1e6;
    for (double &v : scaled) v *= -3.7;
    CHECK(window_of(shifted).rho()[0] == doctest::Approx(base).epsilon(1e-8));
    CHECK(window_of(scaled).rho()[0] == doctest::Approx(base).epsilon(1e-10));
  }
}

TEST_CASE("dlrd decays on oscillation at the first check") {
  DlrdController dlrd(1e-2, 1);
  CHECK_FALSE(dlrd.step(scalar(1.0)).decayed);
  CHECK_FALSE(dlrd.step(scalar(1.1)).decayed);
  const LrDecision third = dlrd.step(scalar(1.0));
  CHECK(third.decayed);
  CHECK(*third.mean_rho == 0.0);
  CHECK(third.eta == doctest::Approx(1e-3));
  CHECK(dlrd.k_min() == 2);
  CHECK(dlrd.window().k() == -1);
  CHECK(dlrd.decay_count() == 1);
}

TEST_CASE("dlrd never decays on a clean ramp") {
  DlrdController dlrd(1e-2, 2);
  VectorXd lambda(2);
  for (int i = 0; i < 10000; ++i) {
    lambda << 0.5 * i, -2.0 * i + 3.0;
    REQUIRE_FALSE(dlrd.step(lambda).decayed);
  }
  CHECK(dlrd.eta() == 1e-2);
}

TEST_CASE("after a decay at k the next check needs k+1 accumulations") {
  DlrdController dlrd(1.0, 1, {0.5, 1.0});
  // A clean ramp keeps rho infinite; the point -392 at k = 50 zeroes the
  // fitted slope exactly, so the first decay lands there.
  for (int j = 0; j < 50; ++j) REQUIRE_FALSE(dlrd.step(scalar(j)).decayed);
  const LrDecision at50 = dlrd.step(scalar(-392.0));
  REQUIRE(at50.decayed);
  CHECK(*at50.mean_rho == 0.0);
  CHECK(dlrd.k_min() == 50);

  int accumulations = 0;
  bool decayed = false;
  while (!decayed) {
    decayed = dlrd.step(scalar(accumulations % 2 ? 1.0 : -1.0)).decayed;
    ++accumulations;
    REQUIRE(accumulations <= 51);
  }
  CHECK(accumulations == 51);
  CHECK(dlrd.eta() == decayed_eta(1.0, 0.5, 2));
}

TEST_CASE("eta is always eta0 * alpha^decays") {
  Gen gen(17);
  DlrdController dlrd(3e-2, 4);
  double previous = dlrd.eta();
  for (int i = 0; i < 5000; ++i) {
    const LrDecision d = dlrd.step(gen.vector(4));
    CHECK(d.eta <= previous);
    CHECK(d.eta == decayed_eta(3e-2, 0.1, dlrd.decay_count()));
    previous = d.eta;
  }
  CHECK(dlrd.decay_count() > 0);
}

TEST_CASE("schedule_eta") {
  LrPolicy power{PolicyKind::PowerDecay, 1e-2, 1.0, {}};
  CHECK(schedule_eta(power, 9) == doctest::Approx(1e-3).epsilon(1e-15));
  power.zeta = 0.5;
  CHECK(schedule_eta(power, 3) == doctest::Approx(5e-3).epsilon(1e-15));
  const LrPolicy fixed{PolicyKind::Static, 4e-3, 1.0, {}};
  CHECK(schedule_eta(fixed, 0) == 4e-3);
  CHECK(schedule_eta(fixed, 123456) == 4e-3);
  CHECK_THROWS_AS(schedule_eta(LrPolicy{PolicyKind::Dlrd, 1e-2, 1.0, {}}, 0), std::logic_error);
}

TEST_CASE("power schedule satisfies the Robbins-Monro pair") {
  // For 0.5 < zeta <= 1: sum eta_i diverges, sum eta_i^2 converges.
  // Partial sums over n terms of (i+1)^-s are bracketed by integrals.
  for (const double zeta : {0.75, 1.0}) {
    const LrPolicy p{PolicyKind::PowerDecay, 1.0, zeta, {}};
    long double s1 = 0, s2 = 0;
    const int n = 1000000;
    for (int i = 0; i < n; ++i) {
      const long double e = schedule_eta(p, i);
      s1 += e;
      s2 += e * e;
    }
    const double nn = n;
    const double lower1 = zeta == 1.0 ? std::log(nn + 1) : (std::pow(nn + 1, 1 - zeta) - 1) / (1 - zeta);
    CHECK(static_cast<double>(s1) >= lower1);
    // sum (i+1)^-2zeta <= 1 + 1 / (2 zeta - 1).
    CHECK(static_cast<double>(s2) <= 1.0 + 1.0 / (2 * zeta - 1));
  }
}

TEST_CASE("policy validation") {
  CHECK_THROWS_AS((LrPolicy{PolicyKind::PowerDecay, 1e-2, 0.0, {}}.validate()), std::invalid_argument);
  CHECK_THROWS_AS((LrPolicy{PolicyKind::PowerDecay, 1e-2, 1.5, {}}.validate()), std::invalid_argument);
  CHECK_THROWS_AS((LrPolicy{PolicyKind::Dlrd, 1e-2, 1.0, {1.0, 1.0}}.validate()), std::invalid_argument);
  CHECK_THROWS_AS((LrPolicy{PolicyKind::Dlrd, 1e-2, 1.0, {0.1, 0.0}}.validate()), std::invalid_argument);
  CHECK_THROWS_AS((LrPolicy{PolicyKind::Static, -1.0, 1.0, {}}.validate()), std::invalid_argument);
  CHECK_NOTHROW((LrPolicy{PolicyKind::Dlrd, 1e-2, 1.0, {}}.validate()));
  CHECK(parse_policy_kind("power") == PolicyKind::PowerDecay);
  CHECK_THROWS_AS(parse_policy_kind("cosine"), std::invalid_argument);
}

TEST_CASE("LrController dispatches by kind") {
  LrController power({PolicyKind::PowerDecay, 1e-2, 1.0, {}}, 2);
  CHECK(power.next(9, VectorXd::Zero(2)).eta == doctest::Approx(1e-3).epsilon(1e-15));
  CHECK_FALSE(power.dlrd().has_value());
  LrController dlrd({PolicyKind::Dlrd, 1e-2, 1.0, {}}, 2);
  REQUIRE(dlrd.dlrd().has_value());
  CHECK(dlrd.next(0, VectorXd::Zero(2)).eta == 1e-2);
  CHECK(dlrd.dlrd()->window().k() == 0);
}
