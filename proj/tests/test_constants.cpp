#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "stablim/constants.hpp"

using namespace stablim;
using doctest::Approx;

TEST_CASE("Kesten index of a lognormal multiplier is closed form") {
  const KestenResult r = kesten_index(LogNormalLaw{-0.3, 0.4}, 0, 1e-10, 1);
  CHECK(r.closed_form);
  CHECK(r.alpha == Approx(1.5));
  CHECK(std::abs(r.residual) < 1e-9);
  CHECK(r.convex);
}

TEST_CASE("Kesten index of an ARCH(1) multiplier") {
  const PositiveLaw a = ScaledSquareLaw{0.5, 0.0, StandardNormal{}};
  const KestenResult exact = kesten_index(a, 0, 1e-10, 1);
  CHECK(exact.closed_form);
  CHECK(exact.alpha == Approx(2.3651496649764734).epsilon(1e-9));
  const KestenResult mc = kesten_index(a, 400000, 1e-10, 2, KestenMethod::MonteCarlo);
  CHECK_FALSE(mc.closed_form);
  CHECK(mc.alpha == Approx(exact.alpha).epsilon(0.05));
  CHECK(std::abs(mc.residual) < 1e-8);
}

TEST_CASE("Kesten index rejects laws without a crossing") {
  CHECK_THROWS_AS(kesten_index(ConstantLaw{0.5}, 1000, 1e-10, 1), std::runtime_error);
  CHECK_THROWS_AS(kesten_index(LogNormalLaw{0.2, 1.0}, 0, 1e-10, 1), std::runtime_error);
  CHECK_THROWS_AS(kesten_index(ScaledSquareLaw{0.5, 0.2, StandardNormal{}}, 0, 1e-10, 1, KestenMethod::ClosedForm),
                  std::invalid_argument);
}

TEST_CASE("window sums match a brute-force convolution") {
  const std::vector<double> c{1.0, -0.5, 2.0};
  for (std::size_t d : {1u, 2u, 5u}) {
    const auto s = window_sums(c, d);
    REQUIRE(s.size() == c.size() + d - 1);
    for (std::size_t k = 0; k < s.size(); ++k) {
      double brute = 0.0;
      for (std::size_t t = 0; t < d; ++t)
        if (k >= t && k - t < c.size()) brute += c[k - t];
      CHECK(s[k] == Approx(brute));
    }
  }
  CHECK_THROWS(window_sums({}, 2));
  CHECK_THROWS(window_sums(c, 0));
}

TEST_CASE("two-sided mass of stable moving averages") {
  CHECK(b_plus_sas({1.0, 1.0}, 1.2, 1) == Approx(1.0));
  CHECK(b_plus_sas({1.0, 1.0}, 1.2, 2) == Approx(2.148698354997035).epsilon(1e-13));
  CHECK(b_plus_sas({1.0, 1.0}, 1.2, 4) == Approx(4.446095064991105).epsilon(1e-13));
  CHECK(b_plus_sas({3.0}, 0.7, 6) == Approx(6.0));
  CHECK_THROWS(b_plus_sas({0.0, 0.0}, 1.2, 1));
  CHECK_THROWS(b_plus_sas({1.0}, 1.2, 1.5));
}

TEST_CASE("moving-average b values") {
  const std::vector<double> ma{1.0, 1.0};
  CHECK(b_moving_average(ma, 0.8, 1.0, 0.0, 1).first == Approx(1.0));
  CHECK(b_moving_average(ma, 0.8, 1.0, 0.0, 2).first == Approx(1.8705505632961241).epsilon(1e-13));
  CHECK(b_moving_average(ma, 0.8, 1.0, 0.0, 3).first == Approx(2.7411011265922483).epsilon(1e-13));
  CHECK(b_moving_average(ma, 0.8, 1.0, 0.0, 16).first == Approx(14.058258449441862).epsilon(1e-13));
  CHECK(b_moving_average(ma, 0.8, 1.0, 0.0, 16).second == 0.0);
  const auto [bp, bm] = b_moving_average({1.0, -0.5, 2.0}, 1.3, 0.6, 0.4, 2);
  CHECK(bp == Approx(0.86274643112933972).epsilon(1e-13));
  CHECK(bm == Approx(0.57516428741955981).epsilon(1e-13));
}

TEST_CASE("differencing cancels to half the mass on each side") {
  for (std::size_t d : {1u, 4u, 16u}) {
    const auto [bp, bm] = b_moving_average({1.0, -1.0}, 0.8, 0.7, 0.3, d);
    CHECK(bp == Approx(0.5));
    CHECK(bm == Approx(0.5));
  }
}

TEST_CASE("recurrence constants at exact special cases") {
  // A = 0 gives T = 0, so the functional is identically one.
  const TInfinityEstimate zero = c_plus_sre(ConstantLaw{0.0}, 1.3, 1000, 1e-6, 3);
  CHECK(zero.mean_functional == Approx(1.0));
  CHECK(zero.se == Approx(0.0));
  // At alpha = 1 each draw of (1 + T) - T equals one up to rounding.
  const TInfinityEstimate one = c_plus_sre(LogNormalLaw{-0.5, 1.0}, 1.0, 2000, 1e-6, 4);
  CHECK(one.mean_functional == Approx(1.0).epsilon(1e-9));
  CHECK(one.truncation_bound < 1e-6);
  // ARCH(1) squares with alpha1 = 1 have index 1 and the same cancellation.
  const TInfinityEstimate arch = c_plus_garch_sq(1.0, 1.0, 0.0, StandardNormal{}, 1.0, 2000, 1e-6, 5);
  CHECK(std::abs(arch.mean_functional - 1.0) < 5.0 * arch.se + 1e-9);
}

TEST_CASE("recurrence constants refuse a mismatched index") {
  CHECK_THROWS_AS(c_plus_sre(LogNormalLaw{-0.5, 1.0}, 1.5, 100, 1e-6, 1), std::invalid_argument);
  CHECK_THROWS_AS(c_plus_garch(1.0, 0.5, 0.3, StandardNormal{}, 1.2, 100, 1e-6, 1), std::invalid_argument);
}

TEST_CASE("stochastic volatility constants are the noise tail balance") {
  const auto [p, q] = c_sv(TwoSidedPareto{1.5, 0.8, 0.2});
  CHECK(p == Approx(0.8));
  CHECK(q == Approx(0.2));
  CHECK_THROWS(c_sv(StandardNormal{}));
}

TEST_CASE("records list every intermediate quantity") {
  const std::string k = to_record(kesten_index(LogNormalLaw{-0.3, 0.4}, 0, 1e-10, 1));
  for (const char* key : {"alpha: ", "method: closed_form", "residual: ", "g_half_alpha: ", "convex: "})
    CHECK(k.find(key) != std::string::npos);
  const std::string t = to_record(c_plus_sre(ConstantLaw{0.0}, 1.3, 1000, 1e-6, 3));
  for (const char* key : {"estimate: ", "se: ", "truncation: ", "truncation_bound: ", "kappa: ", "rho: "})
    CHECK(t.find(key) != std::string::npos);
}
