#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "stablim/models.hpp"

namespace stablim {

// P(|X| > x) ~ constant * x^-alpha.
struct PowerTail {
  double alpha;
  double constant;
};

// Closed-form tail of the marginal law, when the model admits one.
std::optional<PowerTail> closed_form_tail(const ModelSpec& spec);

inline constexpr std::size_t kDefaultReferenceFactor = 1000;
inline constexpr std::size_t kMinimumReferenceFactor = 100;

// The map n -> a_n with n P(|X| > a_n) ~ 1.
class Normalization {
 public:
  // a_n = (constant * n)^(1/alpha).
  static Normalization closed_form(PowerTail tail);

  // Empirical (1 - 1/n)-quantile of |X| over factor * n_min stationary
  // draws. Valid for n_min <= n <= factor * n_min / 100.
  static Normalization empirical(const ModelSpec& spec, std::size_t n_min, std::uint64_t seed,
                                 std::size_t factor = kDefaultReferenceFactor);

  double a_n(std::size_t n) const;
  // Relative standard error that the normalization carries into
  // n P(. > a_n); zero for the closed form.
  double relative_se(std::size_t n) const;
  bool is_closed_form() const { return tail_.has_value(); }
  std::optional<PowerTail> tail() const { return tail_; }
  std::size_t reference_size() const { return reference_size_; }
  std::string describe() const;

 private:
  std::size_t exceedances(std::size_t n) const;

  std::optional<PowerTail> tail_;
  std::size_t reference_size_ = 0;
  std::size_t n_min_ = 0;
  std::vector<double> top_;            // largest |X| values, descending
  std::vector<std::uint16_t> top_chain_;  // reference chain of each entry in top_
};

// Throws std::invalid_argument when the model has no closed-form tail.
double select_a_n(const ModelSpec& spec, std::size_t n);
double select_a_n(const Normalization& norm, std::size_t n);

struct HillEstimate {
  double alpha_hat;
  double se;
};

// Hill estimator on the top-k order statistics of |sample|.
HillEstimate hill_alpha(const Eigen::Ref<const Eigen::VectorXd>& sample, std::size_t k);

struct TailProfile {
  HillEstimate alpha;
  double p_hat;
  double q_hat;
  std::size_t k;
  std::size_t sample_size;
  Normalization a_fn;
};

// Hill index with k = n^(2/3) and tail balance from the same exceedances.
TailProfile estimate_tail_profile(const Eigen::Ref<const Eigen::VectorXd>& sample, Normalization a_fn);
double select_a_n(const TailProfile& profile, std::size_t n);

struct BRow {
  std::size_t d;
  double b_plus;
  double b_minus;
  double se_plus;
  double se_minus;
  std::uint64_t count_plus;
  std::uint64_t count_minus;
  std::uint64_t replicates;
};

struct BTable {
  std::vector<BRow> rows;
  std::size_t n;
  double x;
  double alpha;
  double a_n;
  std::size_t gap;
  const BRow& at(std::size_t d) const;
};

struct BConfig {
  std::vector<std::size_t> depths;
  std::size_t n = 10000;
  double x = 1.0;
  std::size_t replicates = 1000000;
  std::uint64_t seed = 0;
  double alpha = 1.0;
};

// b_plus(d) = n P(S_d > x a_n) x^alpha, counted over `replicates` disjoint
// blocks. Every depth is read off the prefix sums of the same blocks. Blocks
// come from independent chains and are separated by a gap long enough to
// decouple them.
BTable estimate_b_table(const ModelSpec& spec, const BConfig& config, const Normalization& norm);
BRow estimate_b(const ModelSpec& spec, std::size_t d, const BConfig& config, const Normalization& norm);

struct Difference {
  std::size_t d;
  double value;
  double se;
};

struct CEstimate {
  double c_plus;
  double c_minus;
  double se_plus;
  double se_minus;
  std::size_t d_max;
  std::vector<Difference> differences;
  bool converged;
  bool noisy;
};

// Primary estimate b(d_max)/d_max; successive differences serve as a
// convergence diagnostic.
CEstimate estimate_c(const BTable& table);

void write_btable_csv(std::ostream& os, const BTable& table);

// Number of independent chains that replicate-parallel loops split work into.
inline constexpr std::size_t kChains = 64;

// Standard error of the pooled fraction sum(hits) / sum(trials) from
// per-chain counts. Batch means across the independent chains capture
// clustering within a chain; the result never drops below the binomial value.
double clustered_fraction_se(const std::vector<std::uint64_t>& hits, const std::vector<std::uint64_t>& trials);

}  // namespace stablim
