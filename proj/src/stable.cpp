#include "stablim/stable.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

#include "stablim/parallel.hpp"

namespace stablim {

namespace {

constexpr double kPi = std::numbers::pi;

void check_alpha(double alpha) {
  if (!(alpha > 0.0 && alpha < 2.0))
    throw std::domain_error("tail index alpha must lie in (0,2), got " + std::to_string(alpha));
}

double sign(double x) { return (x > 0.0) - (x < 0.0); }

}  // namespace

StableLimitParams::StableLimitParams(double alpha, double c_plus, double c_minus)
    : alpha_(alpha), c_plus_(c_plus), c_minus_(c_minus) {
  check_alpha(alpha);
  if (!(c_plus >= 0.0) || !(c_minus >= 0.0) || !std::isfinite(c_plus) || !std::isfinite(c_minus))
    throw std::domain_error("Lévy-tail constants must be finite and non-negative");
}

std::complex<double> chi(double alpha, double x, double c_plus, double c_minus) {
  check_alpha(alpha);
  const double total = c_plus + c_minus;
  const double diff = c_plus - c_minus;
  if (alpha == 1.0) {
    if (x == 0.0) throw std::domain_error("chi at alpha = 1 is undefined at x = 0");
    return {0.5 * kPi * total, sign(x) * diff * std::log(std::abs(x))};
  }
  const double k = std::tgamma(2.0 - alpha) / (1.0 - alpha);
  return {k * total * std::cos(kPi * alpha / 2.0), -k * sign(x) * diff * std::sin(kPi * alpha / 2.0)};
}

std::complex<double> stable_cf(const StableLimitParams& p, double x) {
  if (x == 0.0 || p.degenerate()) return {1.0, 0.0};
  return std::exp(-std::pow(std::abs(x), p.alpha()) * chi(p.alpha(), x, p.c_plus(), p.c_minus()));
}

StandardStableParams to_standard_params(const StableLimitParams& p) {
  const double a = p.alpha();
  if (p.degenerate()) return {a, 0.0, 0.0, 0.0};
  const double total = p.c_plus() + p.c_minus();
  const double beta = (p.c_plus() - p.c_minus()) / total;
  if (a == 1.0) return {a, 0.5 * kPi * total, beta, 0.0};
  const double sigma_a = total * std::tgamma(2.0 - a) * std::cos(kPi * a / 2.0) / (1.0 - a);
  return {a, std::pow(sigma_a, 1.0 / a), beta, 0.0};
}

std::complex<double> standard_cf(const StandardStableParams& s, double x) {
  if (x == 0.0 || s.sigma == 0.0) return std::exp(std::complex<double>(0.0, s.mu * x));
  const double ax = std::abs(x);
  std::complex<double> exponent;
  if (s.alpha == 1.0) {
    exponent = -s.sigma * ax * std::complex<double>(1.0, s.beta * (2.0 / kPi) * sign(x) * std::log(ax));
  } else {
    exponent = -std::pow(s.sigma * ax, s.alpha) *
               std::complex<double>(1.0, -s.beta * sign(x) * std::tan(kPi * s.alpha / 2.0));
  }
  return std::exp(exponent + std::complex<double>(0.0, s.mu * x));
}

double draw_standard_stable(const StandardStableParams& s, IndexedStream& rng) {
  if (s.sigma == 0.0) return s.mu;
  const double v = kPi * (rng.uniform() - 0.5);
  const double w = rng.exponential();
  const double a = s.alpha;
  if (a == 1.0) {
    const double h = kPi / 2.0 + s.beta * v;
    const double x = (2.0 / kPi) * (h * std::tan(v) - s.beta * std::log((kPi / 2.0) * w * std::cos(v) / h));
    return s.sigma * x + (2.0 / kPi) * s.beta * s.sigma * std::log(s.sigma) + s.mu;
  }
  const double t = s.beta * std::tan(kPi * a / 2.0);
  const double b = std::atan(t) / a;
  const double scale = std::pow(1.0 + t * t, 1.0 / (2.0 * a));
  const double x = scale * std::sin(a * (v + b)) / std::pow(std::cos(v), 1.0 / a) *
                   std::pow(std::cos(v - a * (v + b)) / w, (1.0 - a) / a);
  return s.sigma * x + s.mu;
}

Eigen::VectorXd sample_stable(const StableLimitParams& params, std::size_t n, std::uint64_t seed) {
  Eigen::VectorXd out = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n));
  if (params.degenerate()) return out;
  const StandardStableParams s = to_standard_params(params);
  constexpr std::size_t kChunk = 1u << 14;
  const std::size_t chunks = (n + kChunk - 1) / kChunk;
  parallel_for(chunks, [&](std::size_t c) {
    const std::size_t end = std::min(n, (c + 1) * kChunk);
    for (std::size_t i = c * kChunk; i < end; ++i) {
      IndexedStream rng(seed, streams::primary, i);
      out[static_cast<Eigen::Index>(i)] = draw_standard_stable(s, rng);
    }
  });
  return out;
}

std::pair<double, double> levy_tail(const StableLimitParams& p, double x) {
  if (!(x > 0.0)) throw std::domain_error("Lévy tail requires x > 0");
  const double t = std::pow(x, -p.alpha());
  return {p.c_plus() * t, p.c_minus() * t};
}

}  // namespace stablim
