#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <sstream>

#include "stablim/models.hpp"
#include "stablim/stable.hpp"
#include "stablim/stats.hpp"

using namespace stablim;
using doctest::Approx;

TEST_CASE("GARCH validation names the beta1 constraint") {
  const ModelSpec spec{Garch11{1.0, 0.1, 1.2}};
  CHECK_THROWS_WITH_AS(validate(spec), doctest::Contains("[0,1)"), std::invalid_argument);
}

TEST_CASE("non-stationary recurrences are rejected by the Monte Carlo certificate") {
  // E log(3 Z^2) > 0.
  CHECK_THROWS_AS(validate(ModelSpec{Garch11{1.0, 3.0, 0.5}}), std::invalid_argument);
  CHECK_THROWS_AS(validate(ModelSpec{Sre{LogNormalLaw{0.1, 1.0}, ConstantLaw{1.0}}}), std::invalid_argument);
  CHECK_NOTHROW(validate(ModelSpec{Garch11{1.0, 0.5, 0.3}}));
}

TEST_CASE("causality of the log-volatility ARMA") {
  CHECK(roots_outside_unit_disc({0.5}));
  CHECK_FALSE(roots_outside_unit_disc({1.2}));
  CHECK(roots_outside_unit_disc({0.5, 0.3}));
  CHECK_FALSE(roots_outside_unit_disc({0.5, 0.6}));
  CHECK(roots_outside_unit_disc({}));
  CHECK_THROWS_AS(validate(ModelSpec{StochVol{{1.1}, {}, 1.0, TwoSidedPareto{1.5, 0.5, 0.5}}}),
                  std::invalid_argument);
}

TEST_CASE("log-volatility variance of an ARMA(1,1)") {
  const StochVol sv{{0.6}, {0.3}, 0.5, TwoSidedPareto{1.5, 0.5, 0.5}};
  CHECK(log_vol_variance(sv) == Approx(0.56640625).epsilon(1e-10));
}

TEST_CASE("paths are reproducible and match the chain") {
  const ModelSpec spec{Garch11{1.0, 0.5, 0.3}, 500};
  const Eigen::VectorXd a = generate(spec, 1000, 9);
  const Eigen::VectorXd b = generate(spec, 1000, 9);
  CHECK((a.array() == b.array()).all());
  Chain chain(spec, 9);
  for (Eigen::Index i = 0; i < 10; ++i) CHECK(chain.next() == a[i]);
  CHECK((generate(spec, 10, 10).array() != a.head(10).array()).any());
}

TEST_CASE("a single-coefficient moving average is the iid sequence") {
  const NoiseSpec noise = TwoSidedPareto{0.8, 0.7, 0.3};
  const Eigen::VectorXd iid = gen_iid_rv(noise, 500, 4);
  const Eigen::VectorXd ma = gen_m_dependent(noise, {1.0}, 500, 4);
  CHECK((iid.array() == ma.array()).all());
}

TEST_CASE("differenced partial sums telescope") {
  const NoiseSpec noise = TwoSidedPareto{1.5, 0.5, 0.5};
  const Eigen::VectorXd y = gen_iid_rv(noise, 1001, 8);
  const Eigen::VectorXd x = gen_differenced(noise, 1000, 8);
  for (Eigen::Index n : {1, 10, 1000}) {
    const double s = x.head(n).sum();
    CHECK(s == Approx(y[n] - y[0]).epsilon(1e-9));
  }
}

TEST_CASE("model means") {
  CHECK(*model_mean(ModelSpec{Garch11{1.0, 0.5, 0.3, StandardNormal{}, GarchOutput::Squares}}) == Approx(5.0));
  CHECK(*model_mean(ModelSpec{Garch11{1.0, 0.5, 0.3}}) == 0.0);
  CHECK(*model_mean(ModelSpec{IidRV{TwoSidedPareto{1.5, 1.0, 0.0}}}) == Approx(3.0));
  CHECK(*model_mean(ModelSpec{Differenced{TwoSidedPareto{1.5, 1.0, 0.0}}}) == 0.0);
}

TEST_CASE("GARCH squares have the stationary mean") {
  const ModelSpec spec{Garch11{1.0, 0.2, 0.3, StandardNormal{}, GarchOutput::Squares}};
  const Eigen::VectorXd x = generate(spec, 400000, 3);
  // alpha1 + beta1 = 0.5 keeps the fourth moment finite, so the mean is well estimated.
  CHECK(x.mean() == Approx(2.0).epsilon(0.03));
}

TEST_CASE("independence lags and burn-in") {
  CHECK(*independence_lag(ModelSpec{IidRV{TwoSidedPareto{1.5, 0.5, 0.5}}}) == 0);
  CHECK(*independence_lag(ModelSpec{MDependent{TwoSidedPareto{1.5, 0.5, 0.5}, {1.0, 2.0, 3.0}}}) == 2);
  CHECK_FALSE(independence_lag(ModelSpec{Garch11{1.0, 0.5, 0.3}}).has_value());
  CHECK(effective_burn_in(ModelSpec{IidRV{TwoSidedPareto{1.5, 0.5, 0.5}}, 5000}) == 0);
  CHECK(effective_burn_in(ModelSpec{Garch11{1.0, 0.5, 0.3}, 5000}) == 5000);
}

TEST_CASE("a one-coefficient stable moving average is exactly stable") {
  const Eigen::VectorXd x = gen_sas_ma({1.0}, 1.2, 20000, 2);
  const Eigen::VectorXd ref = sample_stable(StableLimitParams(1.2, 0.5, 0.5), 20000, derive_seed(2, 99));
  CHECK(ks_two_sample(x, ref) < ks_critical_value(20000, 20000, 1e-3));
}

TEST_CASE("path CSV has a header naming model and seed") {
  std::ostringstream os;
  Eigen::VectorXd p(2);
  p << 0.5, -1.25;
  write_path_csv(os, p, "iid", 17);
  CHECK(os.str() == "iid seed=17\n0.5\n-1.25\n");
}

TEST_CASE("model catalog names") {
  CHECK(model_name(ModelSpec{Sre{LogNormalLaw{-0.5, 1.0}, ConstantLaw{1.0}}}).size() > 0);
  CHECK(describe(ModelSpec{Garch11{1.0, 0.5, 0.3}}).find("0.5") != std::string::npos);
}
