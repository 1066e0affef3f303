#pragma once

#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <ostream>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include <Eigen/Dense>

#include "stablim/noise.hpp"

namespace stablim {

struct IidRV {
  NoiseSpec noise;
};

// X_t = Y_t - Y_{t-1} for iid Y.
struct Differenced {
  NoiseSpec noise;
};

// Finite moving average X_t = sum_j coeffs[j] Y_{t-j}.
struct MDependent {
  NoiseSpec noise;
  std::vector<double> coeffs;
};

// X_t = A_t X_{t-1} + B_t.
struct Sre {
  PositiveLaw a;
  PositiveLaw b;
};

enum class GarchOutput { Returns, Squares };

// sigma_t^2 = alpha0 + (alpha1 Z_{t-1}^2 + beta1) sigma_{t-1}^2 and X_t = sigma_t Z_t.
// Student-t noise with more than two degrees of freedom is rescaled to unit
// variance inside the recursion.
struct Garch11 {
  double alpha0;
  double alpha1;
  double beta1;
  NoiseSpec noise = StandardNormal{};
  GarchOutput output = GarchOutput::Returns;
};

// X_t = exp(h_t) Z_t where h is a causal Gaussian ARMA driven by N(0, vol_sd^2).
struct StochVol {
  std::vector<double> ar;
  std::vector<double> ma;
  double vol_sd = 1.0;
  NoiseSpec noise;
};

// Finite moving average of iid symmetric stable innovations whose Lévy
// constants are c_plus = c_minus = 1/2, so P(|eps| > x) ~ x^-alpha.
struct SasMa {
  std::vector<double> coeffs;
  double alpha;
};

using ModelVariant = std::variant<IidRV, Differenced, MDependent, Sre, Garch11, StochVol, SasMa>;

inline constexpr std::size_t kDefaultBurnIn = 10000;

struct ModelSpec {
  ModelVariant variant;
  std::size_t burn_in = kDefaultBurnIn;
};

// Checks every parameter constraint, including the Monte Carlo stationarity
// certificate for recurrences. Throws std::invalid_argument naming the
// violated constraint.
void validate(const ModelSpec& spec);

std::string model_name(const ModelSpec& spec);
std::string describe(const ModelSpec& spec);

// Burn-in actually applied: zero for models started exactly in stationarity.
std::size_t effective_burn_in(const ModelSpec& spec);

// Lag beyond which the sequence is independent, when there is one.
std::optional<std::size_t> independence_lag(const ModelSpec& spec);

// E X_t when known in closed form.
std::optional<double> model_mean(const ModelSpec& spec);

// A stationary path generator positioned after burn-in. Step t consumes
// randomness at counter position t only.
class Chain {
 public:
  Chain(const ModelSpec& spec, std::uint64_t seed);
  ~Chain();
  Chain(Chain&&) noexcept;
  Chain& operator=(Chain&&) noexcept;

  double next();
  void skip(std::size_t steps);
  // Squared volatility belonging to the last value from next(); GARCH only.
  double volatility2() const;

  class Impl;

 private:
  std::unique_ptr<Impl> impl_;
};

Eigen::VectorXd generate(const ModelSpec& spec, std::size_t n, std::uint64_t seed);

Eigen::VectorXd gen_iid_rv(const NoiseSpec& noise, std::size_t n, std::uint64_t seed);
Eigen::VectorXd gen_differenced(const NoiseSpec& noise, std::size_t n, std::uint64_t seed);
Eigen::VectorXd gen_m_dependent(const NoiseSpec& noise, const std::vector<double>& coeffs, std::size_t n,
                                std::uint64_t seed);
Eigen::VectorXd gen_sre(const PositiveLaw& a, const PositiveLaw& b, std::size_t n, std::size_t burn_in,
                        std::uint64_t seed);
// Returns (X_t, sigma_t^2).
std::pair<Eigen::VectorXd, Eigen::VectorXd> gen_garch11(double alpha0, double alpha1, double beta1,
                                                        const NoiseSpec& noise, std::size_t n,
                                                        std::size_t burn_in, std::uint64_t seed);
Eigen::VectorXd gen_sv(const std::vector<double>& ar, const std::vector<double>& ma, const NoiseSpec& noise,
                       std::size_t n, std::size_t burn_in, std::uint64_t seed);
Eigen::VectorXd gen_sas_ma(const std::vector<double>& coeffs, double alpha, std::size_t n, std::uint64_t seed);

// True when every root of 1 - c_1 z - ... - c_p z^p lies outside the unit disc.
bool roots_outside_unit_disc(const std::vector<double>& c);

// Variance of the stationary log-volatility of a StochVol model.
double log_vol_variance(const StochVol& sv);

// Sample E log A from `draws` draws as (mean, standard error).
std::pair<double, double> mc_mean_log(const PositiveLaw& a, std::size_t draws, std::uint64_t seed);

// Garch noise as seen by the recursion (unit variance when it exists).
double garch_noise_draw(const Garch11& g, IndexedStream& rng);
// The law of alpha1 Z^2 + beta1 for the recursion's noise.
PositiveLaw garch_multiplier(const Garch11& g);

void write_path_csv(std::ostream& os, const Eigen::VectorXd& path, const std::string& model, std::uint64_t seed);

}  // namespace stablim
