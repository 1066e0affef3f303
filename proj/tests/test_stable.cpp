#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "stablim/parallel.hpp"
#include "stablim/stable.hpp"
#include "stablim/stats.hpp"

using namespace stablim;
using doctest::Approx;

namespace {
void check_complex(std::complex<double> got, double re, double im, double eps = 1e-13) {
  CHECK(got.real() == Approx(re).epsilon(eps));
  CHECK(got.imag() == Approx(im).epsilon(eps));
}
}  // namespace

TEST_CASE("chi agrees with high-precision reference values") {
  // Reference values from tests/oracles/oracles.py.
  check_complex(chi(0.8, 1.3, 0.7, 0.3), 1.4186487255269969, -1.7464607310356372);
  check_complex(chi(0.8, -1.3, 0.7, 0.3), 1.4186487255269969, 1.7464607310356372);
  check_complex(chi(1.5, 2.0, 1.0, 0.3), 3.2586167570203007, 1.7546397922417004);
  check_complex(chi(1.0, 2.0, 0.7, 0.3), 1.5707963267948966, 0.27725887222397812);
  check_complex(chi(1.0, -0.5, 0.2, 0.6), 1.2566370614359173, -0.27725887222397812);
}

TEST_CASE("chi rejects alpha outside (0,2) and the point x = 0 at alpha = 1") {
  CHECK_THROWS_AS(chi(2.0, 1.0, 0.5, 0.5), std::domain_error);
  CHECK_THROWS_AS(chi(0.0, 1.0, 0.5, 0.5), std::domain_error);
  CHECK_THROWS_AS(chi(1.0, 0.0, 0.5, 0.5), std::domain_error);
}

TEST_CASE("limit characteristic function values") {
  check_complex(stable_cf(StableLimitParams(0.8, 0.7, 0.3), 1.0), -0.042299630786092013, 0.23831600655014456, 1e-12);
  check_complex(stable_cf(StableLimitParams(1.5, 1.0, 0.3), -0.5), 0.25709862180568351, 0.18368433810685118, 1e-12);
  CHECK(stable_cf(StableLimitParams(1.0, 0.5, 0.2), 0.0) == std::complex<double>(1.0, 0.0));
  CHECK(stable_cf(StableLimitParams(0.7, 0.0, 0.0), 3.0) == std::complex<double>(1.0, 0.0));
}

TEST_CASE("the limit CF is Hermitian and bounded by one") {
  for (double alpha : {0.3, 0.8, 1.0, 1.2, 1.9}) {
    const StableLimitParams p(alpha, 0.9, 0.2);
    for (double x : {0.1, 0.7, 2.0, 5.0}) {
      const auto a = stable_cf(p, x), b = stable_cf(p, -x);
      CHECK(a.real() == Approx(b.real()).epsilon(1e-15));
      CHECK(a.imag() == Approx(-b.imag()).epsilon(1e-15));
      CHECK(std::abs(a) <= 1.0);
    }
  }
}

TEST_CASE("standard parameters match reference values") {
  auto s = to_standard_params(StableLimitParams(0.5, 1.0, 0.0));
  CHECK(s.sigma == Approx(1.5707963267948966).epsilon(1e-13));
  CHECK(s.beta == Approx(1.0));
  s = to_standard_params(StableLimitParams(1.5, 1.0, 0.3));
  CHECK(s.sigma == Approx(2.1979721789178352).epsilon(1e-13));
  CHECK(s.beta == Approx(0.53846153846153846).epsilon(1e-14));
  s = to_standard_params(StableLimitParams(1.0, 0.5, 0.5));
  CHECK(s.sigma == Approx(1.5707963267948966).epsilon(1e-14));
  CHECK(s.beta == Approx(0.0));
  CHECK(s.mu == 0.0);
}

TEST_CASE("the scale is positive on both sides of alpha = 1") {
  for (double alpha : {0.2, 0.9, 0.999, 1.001, 1.1, 1.99}) {
    const auto s = to_standard_params(StableLimitParams(alpha, 0.4, 0.6));
    CHECK(s.sigma > 0.0);
    CHECK(s.beta == Approx(-0.2));
  }
}

TEST_CASE("the standard CF reproduces the limit CF") {
  for (double alpha : {0.5, 0.8, 1.0, 1.5, 1.8}) {
    const StableLimitParams p(alpha, 1.0, 0.3);
    const auto s = to_standard_params(p);
    for (double x : {-4.0, -1.0, -0.25, 0.25, 1.0, 4.0}) {
      const auto a = stable_cf(p, x), b = standard_cf(s, x);
      CHECK(std::abs(a - b) < 1e-12);
    }
  }
}

TEST_CASE("invalid limit parameters are rejected") {
  CHECK_THROWS_AS(StableLimitParams(0.0, 1.0, 0.0), std::domain_error);
  CHECK_THROWS_AS(StableLimitParams(2.0, 1.0, 0.0), std::domain_error);
  CHECK_THROWS_AS(StableLimitParams(1.2, -0.1, 0.5), std::domain_error);
  CHECK(StableLimitParams(1.2, 0.0, 0.0).degenerate());
}

TEST_CASE("sampling is reproducible and independent of the thread count") {
  const StableLimitParams p(1.3, 0.6, 0.4);
  const std::size_t saved = thread_count();
  set_thread_count(1);
  const Eigen::VectorXd a = sample_stable(p, 40000, 77);
  set_thread_count(4);
  const Eigen::VectorXd b = sample_stable(p, 40000, 77);
  set_thread_count(saved);
  CHECK((a.array() == b.array()).all());
  CHECK((sample_stable(p, 10, 78).array() != a.head(10).array()).any());
}

TEST_CASE("sampled laws have the predicted characteristic function") {
  constexpr std::size_t n = 200000;
  for (auto [alpha, cp, cm] : {std::tuple{0.5, 1.0, 0.0}, std::tuple{1.0, 0.3, 0.7}, std::tuple{1.7, 0.5, 0.5}}) {
    const StableLimitParams p(alpha, cp, cm);
    const Eigen::VectorXd x = sample_stable(p, n, 5);
    Eigen::VectorXd grid(4);
    grid << 0.25, 0.5, 1.0, 2.0;
    const Eigen::VectorXcd emp = empirical_cf(x, grid);
    for (Eigen::Index i = 0; i < grid.size(); ++i) {
      const auto psi = stable_cf(p, grid[i]);
      const double se = std::sqrt((1.0 - std::norm(psi)) / n);
      CHECK(std::abs(emp[i] - psi) < 5.0 * se + 1e-9);
    }
  }
}

TEST_CASE("Lévy tail") {
  const auto [r, l] = levy_tail(StableLimitParams(0.5, 0.7, 0.3), 4.0);
  CHECK(r == Approx(0.35));
  CHECK(l == Approx(0.15));
  CHECK_THROWS(levy_tail(StableLimitParams(0.5, 0.7, 0.3), 0.0));
}
