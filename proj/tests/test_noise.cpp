#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>

#include "stablim/noise.hpp"

using namespace stablim;
using doctest::Approx;

namespace {
template <class F>
double frequency(int n, std::uint64_t seed, F&& pred, const NoiseSpec& noise) {
  int hits = 0;
  for (int i = 0; i < n; ++i) {
    IndexedStream r(seed, streams::primary, static_cast<std::uint64_t>(i));
    if (pred(draw(noise, r))) ++hits;
  }
  return static_cast<double>(hits) / n;
}
}  // namespace

TEST_CASE("one-sided Pareto draws never fall below the scale") {
  const NoiseSpec noise = TwoSidedPareto{1.0, 1.0, 0.0, 1.0};
  for (std::uint64_t i = 0; i < 20000; ++i) {
    IndexedStream r(3, streams::primary, i);
    REQUIRE(draw(noise, r) >= 1.0);
  }
}

TEST_CASE("two-sided Pareto tails carry mass p and q") {
  const NoiseSpec noise = TwoSidedPareto{0.8, 0.7, 0.3, 1.0};
  constexpr int n = 200000;
  const double x = 5.0;
  const double right = frequency(n, 4, [x](double v) { return v > x; }, noise);
  const double left = frequency(n, 4, [x](double v) { return v < -x; }, noise);
  const double pr = 0.7 * std::pow(x, -0.8), pl = 0.3 * std::pow(x, -0.8);
  CHECK(std::abs(right - pr) < 5.0 * std::sqrt(pr / n));
  CHECK(std::abs(left - pl) < 5.0 * std::sqrt(pl / n));
  CHECK(*tail_constant(noise) == Approx(1.0));
  CHECK(tail_balance(noise)->first == Approx(0.7));
}

TEST_CASE("Student-t tail constants match the tail integral") {
  // x^v P(|T| > x) at x = 1e6 evaluated by quadrature in tests/oracles/oracles.py.
  CHECK(*tail_constant(StudentT{3.0}) == Approx(2.2053155816871681).epsilon(1e-13));
  CHECK(*tail_constant(StudentT{1.5}) == Approx(0.75417048640324927).epsilon(1e-13));
  CHECK(*tail_index(StudentT{1.5}) == 1.5);
  CHECK(is_symmetric(StudentT{3.0}));
}

TEST_CASE("absolute moments") {
  CHECK(*abs_moment(StandardNormal{}, 1.0) == Approx(std::sqrt(2.0 / std::numbers::pi)).epsilon(1e-14));
  CHECK(*abs_moment(StandardNormal{}, 1.5) == Approx(0.86003998732451954).epsilon(1e-13));
  CHECK(*abs_moment(StudentT{5.0}, 1.5) == Approx(1.1821770112539698).epsilon(1e-13));
  CHECK(*abs_moment(StudentT{5.0}, 2.0) == Approx(5.0 / 3.0).epsilon(1e-13));
}

TEST_CASE("light tails have no tail index") {
  CHECK_FALSE(tail_index(StandardNormal{}).has_value());
  CHECK_FALSE(tail_constant(StandardNormal{}).has_value());
}

TEST_CASE("means exist only above tail index one") {
  CHECK_FALSE(mean(TwoSidedPareto{0.8, 0.5, 0.5}).has_value());
  CHECK(*mean(TwoSidedPareto{1.5, 0.5, 0.5}) == 0.0);
  CHECK(*mean(TwoSidedPareto{1.5, 1.0, 0.0}) == Approx(3.0));
  CHECK_FALSE(mean(StudentT{1.0}).has_value());
}

TEST_CASE("noise validation names the constraint") {
  CHECK_THROWS_WITH_AS(validate(NoiseSpec{TwoSidedPareto{0.8, 0.7, 0.7}}), doctest::Contains("p + q = 1"),
                       std::invalid_argument);
  CHECK_THROWS_AS(validate(NoiseSpec{StudentT{-1.0}}), std::invalid_argument);
}

TEST_CASE("power moments of the coefficient laws") {
  CHECK(*power_moment(LogNormalLaw{-0.5, 1.0}, 1.0) == Approx(1.0));
  CHECK(*power_moment(LogNormalLaw{-0.5, 1.0}, 2.0) == Approx(std::exp(1.0)));
  CHECK(*power_moment(ConstantLaw{0.5}, 2.0) == Approx(0.25));
  CHECK(*power_moment(ScaledSquareLaw{0.5, 0.0, StandardNormal{}}, 0.7) ==
        Approx(0.51802124040108806).epsilon(1e-13));
  CHECK_FALSE(power_moment(ScaledSquareLaw{0.5, 0.3, StandardNormal{}}, 0.7).has_value());
  CHECK(law_mean(ScaledSquareLaw{0.5, 0.3, StandardNormal{}}) == Approx(0.8));
}

TEST_CASE("scaled-square draws have the stated mean") {
  const PositiveLaw law = ScaledSquareLaw{0.5, 0.3, StandardNormal{}};
  double s = 0.0;
  constexpr int n = 200000;
  for (int i = 0; i < n; ++i) {
    IndexedStream r(6, streams::primary, static_cast<std::uint64_t>(i));
    s += draw(law, r);
  }
  CHECK(std::abs(s / n - 0.8) < 5.0 * 0.5 * std::sqrt(2.0 / n));
}
