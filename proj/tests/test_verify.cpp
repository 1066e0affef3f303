#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <sstream>

#include "stablim/stats.hpp"
#include "stablim/verify.hpp"

using namespace stablim;
using doctest::Approx;

TEST_CASE("a point mass at zero sits at CF distance zero from a degenerate limit") {
  const Eigen::VectorXd zeros = Eigen::VectorXd::Zero(500);
  const CfDistance d = cf_distance(zeros, StableLimitParams(0.8, 0.0, 0.0));
  CHECK(d.distance == 0.0);
  CHECK(d.mc_se == 0.0);
  CHECK(d.threshold == 0.02);
  CHECK(d.pass);
  CHECK(d.points.size() == 10);
  const KsResult ks = ks_distance(zeros, StableLimitParams(0.8, 0.0, 0.0), 0, 1);
  CHECK(ks.statistic == 0.0);
  CHECK(ks.pass);
  CHECK(ks.n_ref == 0);
}

TEST_CASE("the CF distance separates different indices") {
  const Eigen::VectorXd x = sample_stable(StableLimitParams(0.5, 1.0, 0.0), 100000, 3);
  const CfDistance right = cf_distance(x, StableLimitParams(0.5, 1.0, 0.0));
  CHECK(right.pass);
  const CfDistance wrong = cf_distance(x, StableLimitParams(1.5, 1.0, 0.0));
  CHECK_FALSE(wrong.pass);
  // The exact sup gap over the grid is 0.6387; sampling noise is about 0.003.
  CHECK(wrong.distance == Approx(0.63866816510051603).epsilon(0.02));
}

TEST_CASE("KS against fresh reference draws") {
  const StableLimitParams p(1.3, 0.6, 0.4);
  const Eigen::VectorXd x = sample_stable(p, 20000, 12);
  const KsResult same = ks_distance(x, p, 20000, 12);
  CHECK(same.statistic > 0.0);
  CHECK(same.pass);
  CHECK(same.critical_value == Approx(ks_critical_value(20000, 20000, kKsLevel)));
  const Eigen::VectorXd shifted = (x.array() + 1.0).matrix();
  CHECK_FALSE(ks_distance(shifted, p, 20000, 12).pass);
}

TEST_CASE("centering rules follow the tail index") {
  const ModelSpec centered{IidRV{TwoSidedPareto{1.5, 0.5, 0.5}}};
  const ModelSpec shifted{IidRV{TwoSidedPareto{1.5, 1.0, 0.0}}};
  CHECK_NOTHROW(validate_centering(Centering::None, 1.5, centered));
  CHECK_THROWS_AS(validate_centering(Centering::None, 1.5, shifted), std::invalid_argument);
  CHECK_NOTHROW(validate_centering(Centering::Mean, 1.5, shifted));
  CHECK_THROWS_AS(validate_centering(Centering::Mean, 0.8, shifted), std::invalid_argument);
  CHECK_NOTHROW(validate_centering(Centering::SineEmpirical, 1.05, shifted));
  CHECK_THROWS_AS(validate_centering(Centering::SineEmpirical, 1.5, shifted), std::invalid_argument);
  CHECK_NOTHROW(validate_centering(Centering::None, 0.8, shifted));
}

TEST_CASE("stationary mean uses the closed form when there is one") {
  const StationaryMean m = stationary_mean(ModelSpec{Garch11{1.0, 0.5, 0.3, StandardNormal{}, GarchOutput::Squares}}, 1);
  CHECK(m.exact);
  CHECK(m.value == Approx(5.0));
}

TEST_CASE("sums of a stable moving average with one coefficient are exactly stable") {
  const ModelSpec spec{SasMa{{1.0}, 1.2}};
  const SumExperiment exp{spec, 10, 20000, Centering::None, 1.2};
  const PartialSums sums = partial_sum_sample(exp, Normalization::closed_form(*closed_form_tail(spec)), 21);
  CHECK(sums.a_n == Approx(std::pow(10.0, 1.0 / 1.2)));
  CHECK(sums.centering_per_step == 0.0);
  const ConvergenceReport r = check_convergence(sums, StableLimitParams(1.2, 0.5, 0.5), 22);
  CHECK(r.ks.pass);
  CHECK(r.cf.pass);
  CHECK(r.verdict);
  CHECK(r.note == "stable limit confirmed");
}

TEST_CASE("differenced sums collapse onto zero") {
  const ModelSpec spec{Differenced{TwoSidedPareto{0.8, 0.7, 0.3}}};
  const SumExperiment exp{spec, 10000, 500, Centering::None, 0.8};
  const PartialSums sums = partial_sum_sample(exp, Normalization::closed_form(*closed_form_tail(spec)), 5);
  const ConvergenceReport r = check_convergence(sums, StableLimitParams(0.8, 0.0, 0.0), 6);
  CHECK(r.degenerate);
  CHECK(r.abs_q99 < 0.05);
  CHECK(r.verdict);
  CHECK(r.note == "degenerate limit confirmed");
}

TEST_CASE("partial sums refuse a centering that does not suit the index") {
  const ModelSpec spec{IidRV{TwoSidedPareto{0.8, 0.7, 0.3}}};
  const SumExperiment exp{spec, 100, 10, Centering::Mean, 0.8};
  CHECK_THROWS_AS(partial_sum_sample(exp, Normalization::closed_form(*closed_form_tail(spec)), 1),
                  std::invalid_argument);
}

TEST_CASE("iid exceedances do not cluster") {
  const ModelSpec spec{IidRV{TwoSidedPareto{1.5, 0.5, 0.5}}};
  const Normalization norm = Normalization::closed_form(*closed_form_tail(spec));
  const AnticlusterResult r = anticluster_diag(spec, norm, 1, 10, 1.0, 1000, 3000, 4);
  CHECK(r.anchors > 2000);
  CHECK(r.independent_reference == Approx(1.0 - std::pow(1.0 - 1e-3, 10.0)).epsilon(0.1));
  CHECK(std::abs(r.probability - r.independent_reference) < 4.0 * r.se);
  CHECK_THROWS(anticluster_diag(spec, norm, 10, 10, 1.0, 1000, 10, 4));
}

TEST_CASE("iid block characteristic functions factorize") {
  const ModelSpec spec{IidRV{TwoSidedPareto{1.5, 0.5, 0.5}}};
  const Normalization norm = Normalization::closed_form(*closed_form_tail(spec));
  Eigen::VectorXd grid(3);
  grid << 0.5, 1.0, 2.0;
  const MixingResult r = mixing_block_diag(spec, norm, 1000, 10, grid, 20000, 7);
  CHECK(r.k_n == 100);
  for (const MixingPoint& p : r.points) CHECK(p.gap < p.band);
}

TEST_CASE("block sums of iid Pareto have the limiting Lévy tail") {
  const ModelSpec spec{IidRV{TwoSidedPareto{1.0, 1.0, 0.0}}};
  const Normalization norm = Normalization::closed_form(*closed_form_tail(spec));
  const LevyTailResult r = levy_tail_check(spec, norm, 4, 10000, {1.0, 2.0}, 2000000, 9, 1.0, 1.0, 0.0);
  REQUIRE(r.points.size() == 2);
  CHECK(r.points[0].empirical == Approx(1.0).epsilon(0.2));
  CHECK(r.points[1].empirical == Approx(0.5).epsilon(0.2));
  CHECK(r.pass);
  std::ostringstream os;
  write_levy_csv(os, r);
  CHECK(os.str().rfind("n,m,k_n,x,count,empirical,se,theory,theory_se,within\n", 0) == 0);
}

TEST_CASE("Lévy-tail check fails against the wrong constant") {
  const ModelSpec spec{IidRV{TwoSidedPareto{1.0, 1.0, 0.0}}};
  const Normalization norm = Normalization::closed_form(*closed_form_tail(spec));
  CHECK_FALSE(levy_tail_check(spec, norm, 4, 10000, {1.0, 2.0}, 2000000, 9, 1.0, 2.0, 0.0).pass);
}
