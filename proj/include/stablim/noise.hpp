#pragma once

#include <optional>
#include <string>
#include <utility>
#include <variant>

#include "stablim/rng.hpp"

namespace stablim {

// Exact Pareto tails: P(Y > y) = p (y/scale)^-alpha and P(Y < -y) = q (y/scale)^-alpha
// for y >= scale, with no mass in (-scale, scale).
struct TwoSidedPareto {
  double alpha;
  double p;
  double q;
  double scale = 1.0;
};

struct StudentT {
  double dof;
};

struct StandardNormal {};

// |Y| Pareto(alpha, scale) with an independent fair sign.
struct SymmetrizedPareto {
  double alpha;
  double scale = 1.0;
};

using NoiseSpec = std::variant<TwoSidedPareto, StudentT, StandardNormal, SymmetrizedPareto>;

void validate(const NoiseSpec& noise);
double draw(const NoiseSpec& noise, IndexedStream& rng);
std::string describe(const NoiseSpec& noise);

// Tail index of the law, empty for light tails.
std::optional<double> tail_index(const NoiseSpec& noise);
// (p, q) with P(Y > x) / P(|Y| > x) -> p; empty for light tails.
std::optional<std::pair<double, double>> tail_balance(const NoiseSpec& noise);
// C with P(|Y| > x) ~ C x^-alpha; empty for light tails.
std::optional<double> tail_constant(const NoiseSpec& noise);
// Exact power-law tail above some level with no slowly varying correction.
bool has_exact_pareto_tail(const NoiseSpec& noise);
bool is_symmetric(const NoiseSpec& noise);
std::optional<double> mean(const NoiseSpec& noise);
// E|Y|^s in closed form when available.
std::optional<double> abs_moment(const NoiseSpec& noise, double s);

// Positive-valued laws for the random coefficients of a recurrence.
struct ConstantLaw {
  double value;
};

struct LogNormalLaw {
  double mu;
  double sigma2;
};

// scale * Y^2 + shift for a noise draw Y.
struct ScaledSquareLaw {
  double scale;
  double shift;
  NoiseSpec noise;
};

using PositiveLaw = std::variant<ConstantLaw, LogNormalLaw, ScaledSquareLaw>;

void validate(const PositiveLaw& law);
double draw(const PositiveLaw& law, IndexedStream& rng);
std::string describe(const PositiveLaw& law);
// E A^kappa in closed form when available.
std::optional<double> power_moment(const PositiveLaw& law, double kappa);
// E A, possibly +infinity.
double law_mean(const PositiveLaw& law);

}  // namespace stablim
