#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "stablim/stats.hpp"

using namespace stablim;
using doctest::Approx;

namespace {
Eigen::VectorXd vec(std::initializer_list<double> v) {
  Eigen::VectorXd out(static_cast<Eigen::Index>(v.size()));
  Eigen::Index i = 0;
  for (double x : v) out[i++] = x;
  return out;
}
}  // namespace

TEST_CASE("compensated summation recovers cancelled low-order bits") {
  CompensatedSum s;
  s.add(1e16);
  for (int i = 0; i < 1000; ++i) s.add(1.0);
  s.add(-1e16);
  CHECK(s.value() == 1000.0);
  CompensatedSum a, b;
  a.add(0.1);
  b.add(0.2);
  a.add(b);
  CHECK(a.value() == Approx(0.3).epsilon(1e-16));
}

TEST_CASE("empirical CF of simple samples") {
  const Eigen::VectorXd grid = vec({-2.0, 0.5, 1.0});
  const Eigen::VectorXcd zero = empirical_cf(vec({0.0, 0.0, 0.0}), grid);
  for (Eigen::Index i = 0; i < grid.size(); ++i) CHECK(zero[i] == std::complex<double>(1.0, 0.0));
  const Eigen::VectorXcd pair = empirical_cf(vec({0.7, -0.7}), grid);
  for (Eigen::Index i = 0; i < grid.size(); ++i) {
    CHECK(pair[i].real() == Approx(std::cos(0.7 * grid[i])));
    CHECK(pair[i].imag() == Approx(0.0));
  }
  const Eigen::VectorXcd one = empirical_cf(vec({1.0}), vec({2.0, -2.0}));
  CHECK(one[0].imag() == Approx(std::sin(2.0)));
  CHECK(one[1] == std::conj(one[0]));
  CHECK_THROWS(empirical_cf(Eigen::VectorXd(0), grid));
}

TEST_CASE("two-sample KS statistic on small samples") {
  CHECK(ks_two_sample(vec({1, 2, 3}), vec({1, 2, 3})) == 0.0);
  CHECK(ks_two_sample(vec({1, 2, 3}), vec({4, 5, 6})) == 1.0);
  CHECK(ks_two_sample(vec({1, 2, 3, 4}), vec({3, 4, 5, 6})) == Approx(0.5));
  // Ties across samples are stepped together.
  CHECK(ks_two_sample(vec({0, 0, 1, 1}), vec({0, 1})) == 0.0);
  CHECK(ks_two_sample(vec({0, 0, 0, 1}), vec({0, 1})) == Approx(0.25));
  CHECK_THROWS(ks_two_sample(Eigen::VectorXd(0), vec({1})));
}

TEST_CASE("KS critical value") {
  CHECK(ks_critical_value(100, 100, 1e-3) == Approx(1.9494746035204052 * std::sqrt(0.02)).epsilon(1e-14));
  CHECK(ks_critical_value(1000, 4000, 1e-3) == Approx(1.9494746035204052 * std::sqrt(5000.0 / 4e6)).epsilon(1e-14));
}

TEST_CASE("nearest-rank quantile") {
  const Eigen::VectorXd x = vec({5, 1, 4, 2, 3});
  CHECK(quantile(x, 0.2) == 1.0);
  CHECK(quantile(x, 0.21) == 2.0);
  CHECK(quantile(x, 0.5) == 3.0);
  CHECK(quantile(x, 1.0) == 5.0);
  CHECK(quantile(x, 0.01) == 1.0);
  CHECK_THROWS(quantile(x, 0.0));
  CHECK_THROWS(quantile(Eigen::VectorXd(0), 0.5));
}
