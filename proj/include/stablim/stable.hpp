#pragma once

#include <complex>
#include <cstddef>
#include <cstdint>
#include <utility>

#include <Eigen/Dense>

#include "stablim/rng.hpp"

namespace stablim {

// The stable limit law described by its tail index and its two Lévy-tail
// constants: the right tail of the Lévy measure is c_plus * x^-alpha.
// c_plus + c_minus == 0 is the point mass at zero.
class StableLimitParams {
 public:
  StableLimitParams(double alpha, double c_plus, double c_minus);

  double alpha() const { return alpha_; }
  double c_plus() const { return c_plus_; }
  double c_minus() const { return c_minus_; }
  bool degenerate() const { return c_plus_ + c_minus_ == 0.0; }

 private:
  double alpha_;
  double c_plus_;
  double c_minus_;
};

// Conventional 1-parametrization: exp(-sigma^a |x|^a (1 - i beta sgn(x) tan(pi a / 2)))
// for a != 1 and exp(-sigma |x| (1 + i beta (2/pi) sgn(x) log|x|)) for a == 1.
struct StandardStableParams {
  double alpha;
  double sigma;
  double beta;
  double mu;
};

// Exponent chi of the limit characteristic function psi(x) = exp(-|x|^a chi).
// Throws std::domain_error for alpha outside (0,2) and at (alpha=1, x=0).
std::complex<double> chi(double alpha, double x, double c_plus, double c_minus);

std::complex<double> stable_cf(const StableLimitParams& params, double x);

StandardStableParams to_standard_params(const StableLimitParams& params);

std::complex<double> standard_cf(const StandardStableParams& params, double x);

// One Chambers-Mallows-Stuck draw consuming one uniform and one exponential.
double draw_standard_stable(const StandardStableParams& params, IndexedStream& rng);

// Draw i depends on (seed, i) only, so the parallel fill is bit-identical
// to a sequential one.
Eigen::VectorXd sample_stable(const StableLimitParams& params, std::size_t n, std::uint64_t seed);

// (c_plus x^-alpha, c_minus x^-alpha); throws std::domain_error for x <= 0.
std::pair<double, double> levy_tail(const StableLimitParams& params, double x);

}  // namespace stablim
