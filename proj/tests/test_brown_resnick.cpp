#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "brown_resnick.hpp"
#include "error.hpp"
#include "oracles.hpp"

using namespace hrcorr;
using oracle::rel;

namespace {
const QuadratureSpec kQ = QuadratureSpec::headline();
MarginPowerSpec M(double eta, double tau, double xi, int beta) {
  return {GevParams(eta, tau, xi), IntegerPower(beta)};
}
const MarginPowerSpec kCase = M(25.71, 3.03, -0.12, 10);
BrownResnickSpec case_study(double psi = 0.81) { return {SemivariogramModel::power(3.39, psi), kCase}; }
}  // namespace

TEST_CASE("h is sqrt(2 gamma)") {
  const auto pw = SemivariogramModel::power(3.39, 0.81);
  for (double d : {0.0, 0.5, 3.39, 10.0, 120.0}) {
    CAPTURE(d);
    const double g = std::pow(d / 3.39, 0.81);
    CHECK(pw.gamma({d, 0}) == doctest::Approx(g).epsilon(1e-15));
    CHECK(lag_to_h({0, d}, pw) == doctest::Approx(std::sqrt(2 * g)).epsilon(1e-15));
  }
  const auto sm = SemivariogramModel::smith(2.0, 0.5, 1.0);
  // Sigma^{-1} = [[1, -0.5], [-0.5, 2]] / 1.75
  const double x = 0.7, y = -1.3;
  const double q = (x * x - x * y + 2 * y * y) / 1.75;
  CHECK(rel(sm.gamma({x, y}), q / 2) < 1e-15);
  CHECK(rel(lag_to_h({x, y}, sm), std::sqrt(q)) < 1e-15);
}

TEST_CASE("scale identity D(kappa, d) = D(1, d / kappa)") {
  for (double kappa : {0.7, 3.39, 25.0}) {
    const BrownResnickSpec a{SemivariogramModel::power(kappa, 0.81), kCase};
    const BrownResnickSpec b{SemivariogramModel::power(1.0, 0.81), kCase};
    for (int i = 1; i <= 20; ++i) {
      const double d = 0.75 * i;
      CAPTURE(kappa);
      CAPTURE(d);
      CHECK(rel(dependence_measure(a, {0, 0}, {d, 0}, kQ), dependence_measure(b, {0, 0}, {d / kappa, 0}, kQ)) <
            1e-12);
    }
  }
}

TEST_CASE("isotropic Smith model equals the power model with psi = 2") {
  const BrownResnickSpec smith{SemivariogramModel::smith(1.0, 0.0, 1.0), kCase};
  const BrownResnickSpec power{SemivariogramModel::power(std::sqrt(2.0), 2.0), kCase};
  CHECK(smith.model.isotropic());
  for (Vec2 lag : {Vec2{0.3, 0.0}, Vec2{1.0, 1.0}, Vec2{-2.0, 0.5}}) {
    CHECK(rel(lag_to_h(lag, smith.model), lag_to_h(lag, power.model)) < 1e-15);
    CHECK(rel(dependence_measure(smith, {1, 1}, {1 + lag[0], 1 + lag[1]}, kQ),
              dependence_measure(power, {0, 0}, lag, kQ)) < 1e-13);
  }
}

TEST_CASE("anisotropic Smith model depends on direction") {
  const BrownResnickSpec s{SemivariogramModel::smith(4.0, 0.0, 1.0), kCase};
  CHECK_FALSE(s.model.isotropic());
  CHECK(dependence_measure(s, {0, 0}, {1, 0}, kQ) > dependence_measure(s, {0, 0}, {0, 1}, kQ));
  CHECK(rel(dependence_measure(s, {0, 0}, {2, 0}, kQ), dependence_measure(s, {0, 0}, {0, 1}, kQ)) < 1e-13);
}

TEST_CASE("dependence measure edge cases") {
  const auto spec = case_study();
  CHECK(dependence_measure(spec, {2, 3}, {2, 3}, kQ) == 1.0);
  CHECK(dependence_measure_h(kCase, HrParams::independent(), kQ) == 0.0);
  CHECK(rel(dependence_measure(spec, {0, 0}, {3, 4}, kQ), dependence_measure(spec, {0, 0}, {5, 0}, kQ)) < 1e-14);
}

TEST_CASE("correlation curve") {
  std::vector<double> d;
  for (int i = 0; i <= 24; ++i) d.push_back(0.5 * i);
  const auto one = correlation_curve(case_study(), d, kQ, 1);
  const auto four = correlation_curve(case_study(), d, kQ, 4);
  CHECK(one.values == four.values);
  CHECK(one.values.front() == 1.0);
  for (std::size_t i = 1; i < d.size(); ++i) CHECK(one.values[i] < one.values[i - 1]);
  CHECK(rel(one.values[10], 0.6532348447070742) < 1e-12);
  CHECK(rel(one.values[20], 0.4802895596637607) < 1e-12);
}

TEST_CASE("threshold distances") {
  const double t081 = threshold_distance(case_study(0.81), 0.1, kQ);
  const double t2 = threshold_distance(case_study(2.0), 0.1, kQ);
  CHECK(t081 == doctest::Approx(43.60).epsilon(0.5 / 43.60));
  CHECK(t2 == doctest::Approx(9.54).epsilon(0.3 / 9.54));
  CHECK(std::fabs(dependence_measure(case_study(0.81), {0, 0}, {t081, 0}, kQ) - 0.1) < 1e-9);
  CHECK(std::fabs(dependence_measure(case_study(2.0), {0, 0}, {t2, 0}, kQ) - 0.1) < 1e-9);
  CHECK_THROWS_AS(threshold_distance(case_study(), 1.0, kQ), Error);
  CHECK_THROWS_AS(threshold_distance(case_study(), 0.0, kQ), Error);
}

TEST_CASE("different margins at the two sites") {
  const auto model = SemivariogramModel::power(3.39, 0.81);
  const SiteMargin a{{0, 0}, kCase};
  const SiteMargin b{{5, 0}, kCase};
  CHECK(rel(corr_nonstationary(model, a, b, kQ), dependence_measure(case_study(), {0, 0}, {5, 0}, kQ)) < 1e-12);
  const SiteMargin c{{5, 0}, M(20.0, 3.5, -0.1, 8)};
  const double ac = corr_nonstationary(model, a, c, kQ);
  CHECK(rel(ac, corr_nonstationary(model, c, a, kQ)) < 1e-12);
  CHECK(ac > 0.0);
  CHECK(ac < 1.0);
}

TEST_CASE("power-distance surface") {
  const auto s = power_distance_surface(case_study(), {1.0, 5.0}, {1, 10, 12}, QuadratureSpec::sweep(), 2);
  REQUIRE(s.values.size() == 6);
  CHECK(rel(s.at(1, 1), 0.6532348447070742) < 1e-5);
  for (std::size_t j = 0; j < 3; ++j) CHECK(s.at(0, j) > s.at(1, j));
}

TEST_CASE("model validation") {
  CHECK_THROWS_AS(SemivariogramModel::power(0.0, 1.0), Error);
  CHECK_THROWS_AS(SemivariogramModel::power(1.0, 0.0), Error);
  CHECK_THROWS_AS(SemivariogramModel::power(1.0, 2.1), Error);
  CHECK_NOTHROW(SemivariogramModel::power(1.0, 2.0));
  CHECK_THROWS_AS(SemivariogramModel::smith(1.0, 1.0, 1.0), Error);
  CHECK_THROWS_AS(SemivariogramModel::smith(-1.0, 0.0, 1.0), Error);
}
