#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "stablim/models.hpp"
#include "stablim/noise.hpp"

namespace stablim {

enum class KestenMethod { Auto, MonteCarlo, ClosedForm };

struct KestenResult {
  double alpha;
  double residual;  // g(alpha) - 1 for the function actually solved
  double g_se;      // Monte Carlo se of g at alpha, zero for closed forms
  bool closed_form;
  std::size_t draws;
  // g at alpha/2, alpha, 3 alpha/2 and whether they look convex.
  double g_half;
  double g_at;
  double g_three_halves;
  bool convex;
};

// Positive root of E A^kappa = 1. The Monte Carlo path bisects one fixed set
// of draws (common random numbers); Auto takes a closed form when the law
// has one. Throws std::runtime_error when no bracket exists.
KestenResult kesten_index(const PositiveLaw& a, std::size_t mc_draws, double tolerance, std::uint64_t seed,
                          KestenMethod method = KestenMethod::Auto);

struct GoldieResult {
  double c0;
  double se;
  double numerator;
  double numerator_se;
  double denominator;
  double denominator_se;
};

// Tail constant of the SRE marginal, P(X > x) ~ c0 x^-alpha.
GoldieResult goldie_c0(const PositiveLaw& a, const PositiveLaw& b, double alpha, std::size_t mc_draws,
                       std::size_t burn_in, std::uint64_t seed);

struct TInfinityEstimate {
  double mean_functional;
  double se;
  std::size_t truncation;    // number of series terms kept
  double truncation_bound;   // bound on E|discarded tail|^kappa
  double kappa;
  double rho;                // per-step geometric factor of the bound
};

// E[(1 + T)^alpha - T^alpha] with T the sum of partial products of A.
TInfinityEstimate c_plus_sre(const PositiveLaw& a, double alpha, std::size_t mc_draws, double truncation_tolerance,
                             std::uint64_t seed);

// Right Lévy constant for the squared GARCH(1,1) process; alpha is the index
// of the squares.
TInfinityEstimate c_plus_garch_sq(double alpha0, double alpha1, double beta1, const NoiseSpec& noise, double alpha,
                                  std::size_t mc_draws, double truncation_tolerance, std::uint64_t seed);

// Lévy constant (both sides) for GARCH(1,1) returns; alpha is the index of
// the squares, so the returns have index 2 alpha.
TInfinityEstimate c_plus_garch(double alpha0, double alpha1, double beta1, const NoiseSpec& noise, double alpha,
                               std::size_t mc_draws, double truncation_tolerance, std::uint64_t seed);

// (p, q) tail balance of the noise, which are the Lévy constants of the
// stochastic volatility limit.
std::pair<double, double> c_sv(const NoiseSpec& noise);

// sum_j |s_j(d)|^alpha / sum_j |c_j|^alpha over the coefficient sums of a
// length-d window. For symmetric stable innovations this is the two-sided
// mass lim n P(|S_d| > a_n), which equals b_plus(d) + b_minus(d).
double b_plus_sas(const std::vector<double>& coeffs, double alpha, double d);

// Window sums s_j(d) of the coefficients for a block of length d.
std::vector<double> window_sums(const std::vector<double>& coeffs, std::size_t d);

// Exact b_plus(d), b_minus(d) of a finite moving average over noise with
// tail balance (p, q): every window sum carries one big jump.
std::pair<double, double> b_moving_average(const std::vector<double>& coeffs, double alpha, double p, double q,
                                           std::size_t d);

std::string to_record(const KestenResult& r);
std::string to_record(const GoldieResult& r);
std::string to_record(const TInfinityEstimate& r);

}  // namespace stablim
