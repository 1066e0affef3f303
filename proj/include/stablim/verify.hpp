#pragma once

#include <complex>
#include <cstddef>
#include <cstdint>
#include <ostream>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "stablim/models.hpp"
#include "stablim/stable.hpp"
#include "stablim/tail.hpp"

namespace stablim {

enum class Centering { None, Mean, SineEmpirical };

std::string to_string(Centering c);

// Throws std::invalid_argument when the centering does not suit a model
// with tail index alpha: Mean needs alpha > 1, the sine rule needs alpha
// within 0.1 of 1, and no centering at alpha > 1 needs a centered model.
void validate_centering(Centering c, double alpha, const ModelSpec& model);

struct StationaryMean {
  double value;
  bool exact;  // false for the Monte Carlo fallback
};

// E X_t in closed form when known, else averaged over 10^7 stationary draws.
StationaryMean stationary_mean(const ModelSpec& model, std::uint64_t seed);

struct SumExperiment {
  ModelSpec model;
  std::size_t n;
  std::size_t replicates;
  Centering centering = Centering::None;
  // Tail index used to police the centering choice.
  double alpha;
};

struct PartialSums {
  Eigen::VectorXd values;  // a_n^-1 (S_n - b_n), one per replicate
  double a_n;
  // b_n / n for Mean centering, E sin(X / a_n) * a_n for the sine rule.
  double centering_per_step;
  bool centering_exact;
};

// One normalized sum per independent replicate chain. Mean centering uses
// the closed-form mean when the model has one, else a Monte Carlo mean over
// 10^7 stationary draws.
PartialSums partial_sum_sample(const SumExperiment& exp, const Normalization& norm, std::uint64_t seed);

Eigen::VectorXd default_cf_grid();

struct CfPoint {
  double x;
  std::complex<double> empirical;
  std::complex<double> theory;
  double gap;
};

struct CfDistance {
  double distance;
  double mc_se;      // largest per-point standard error of the empirical CF
  double threshold;  // max(floor, 5 mc_se)
  bool pass;
  std::vector<CfPoint> points;
};

CfDistance cf_distance(const Eigen::Ref<const Eigen::VectorXd>& samples, const StableLimitParams& params,
                       const Eigen::Ref<const Eigen::VectorXd>& grid, double floor = 0.02);
CfDistance cf_distance(const Eigen::Ref<const Eigen::VectorXd>& samples, const StableLimitParams& params);

struct KsResult {
  double statistic;
  double critical_value;
  bool pass;
  std::size_t n;
  std::size_t n_ref;  // zero when compared against the point mass at 0
};

inline constexpr double kKsLevel = 1e-3;

// Two-sample KS against n_ref fresh draws from the limit law. The reference
// draws use a seed derived from `seed`, so they never coincide with a sample
// drawn directly from the same seed.
KsResult ks_distance(const Eigen::Ref<const Eigen::VectorXd>& samples, const StableLimitParams& params,
                     std::size_t n_ref, std::uint64_t seed, double level = kKsLevel);

struct ConvergenceReport {
  CfDistance cf;
  KsResult ks;
  bool degenerate;
  double abs_q99;  // 99% quantile of |normalized sum|
  bool verdict;
  std::string note;
};

// Degenerate limits are judged by concentration (abs_q99 < 0.05) together
// with the CF distance; the KS statistic is reported but cannot pass
// against a point mass.
ConvergenceReport check_convergence(const PartialSums& sums, const StableLimitParams& params, std::uint64_t seed);

struct AnticlusterResult {
  double probability;
  double se;
  std::uint64_t anchors;
  std::uint64_t hits;
  double independent_reference;  // same probability if the sequence were iid
};

// Scans stationary paths of length n for anchors |X_t| > x a_n and records
// whether max_{d <= i <= m} |X_{t+i}| also exceeds the level.
AnticlusterResult anticluster_diag(const ModelSpec& model, const Normalization& norm, std::size_t d, std::size_t m,
                                   double x, std::size_t n, std::size_t replicates, std::uint64_t seed);

struct MixingPoint {
  double x;
  std::complex<double> phi_n;
  std::complex<double> phi_m_power;
  double gap;
  double band;  // three Monte Carlo standard errors of the gap
};

struct MixingResult {
  std::size_t n;
  std::size_t m;
  std::size_t k_n;
  std::vector<MixingPoint> points;
};

// |phi_n(x) - phi_m(x)^k_n| from two independent replicate sets.
MixingResult mixing_block_diag(const ModelSpec& model, const Normalization& norm, std::size_t n, std::size_t m,
                               const Eigen::Ref<const Eigen::VectorXd>& x_grid, std::size_t replicates,
                               std::uint64_t seed, double centering_per_step = 0.0);

struct LevyPoint {
  double x;
  double empirical;  // k_n P(S_m > x a_n)
  double se;
  double theory;     // c_plus x^-alpha
  double theory_se;
  std::uint64_t count;
  bool included;
  bool within;
};

struct LevyTailResult {
  std::size_t n;
  std::size_t m;
  std::size_t k_n;
  std::vector<LevyPoint> points;
  bool pass;
};

LevyTailResult levy_tail_check(const ModelSpec& model, const Normalization& norm, std::size_t m, std::size_t n,
                               const std::vector<double>& x_grid, std::size_t replicates, std::uint64_t seed,
                               double alpha, double c_plus, double c_plus_se);

void write_cf_csv(std::ostream& os, const CfDistance& cf);
void write_mixing_csv(std::ostream& os, const MixingResult& r);
void write_levy_csv(std::ostream& os, const LevyTailResult& r);

}  // namespace stablim
