#include "stablim/noise.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace stablim {

namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

constexpr double kInf = std::numeric_limits<double>::infinity();

void require(bool ok, const std::string& message) {
  if (!ok) throw std::invalid_argument(message);
}

double pareto_magnitude(double alpha, double scale, IndexedStream& rng) {
  return scale * std::pow(rng.uniform(), -1.0 / alpha);
}

std::string fmt(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

}  // namespace

void validate(const NoiseSpec& noise) {
  std::visit(Overloaded{
                 [](const TwoSidedPareto& n) {
                   require(n.alpha > 0.0 && std::isfinite(n.alpha), "pareto alpha must be positive");
                   require(n.p >= 0.0 && n.q >= 0.0 && std::abs(n.p + n.q - 1.0) < 1e-12,
                           "pareto tail balance needs p, q >= 0 with p + q = 1");
                   require(n.scale > 0.0 && std::isfinite(n.scale), "pareto scale must be positive");
                 },
                 [](const StudentT& n) { require(n.dof > 0.0 && std::isfinite(n.dof), "student dof must be positive"); },
                 [](const StandardNormal&) {},
                 [](const SymmetrizedPareto& n) {
                   require(n.alpha > 0.0 && std::isfinite(n.alpha), "pareto alpha must be positive");
                   require(n.scale > 0.0 && std::isfinite(n.scale), "pareto scale must be positive");
                 },
             },
             noise);
}

double draw(const NoiseSpec& noise, IndexedStream& rng) {
  return std::visit(Overloaded{
                        [&](const TwoSidedPareto& n) {
                          const double side = rng.uniform();
                          const double m = pareto_magnitude(n.alpha, n.scale, rng);
                          return side < n.p ? m : -m;
                        },
                        [&](const StudentT& n) {
                          const double z = rng.normal();
                          const double chi2 = 2.0 * rng.gamma(0.5 * n.dof);
                          return z / std::sqrt(chi2 / n.dof);
                        },
                        [&](const StandardNormal&) { return rng.normal(); },
                        [&](const SymmetrizedPareto& n) {
                          const double side = rng.uniform();
                          const double m = pareto_magnitude(n.alpha, n.scale, rng);
                          return side < 0.5 ? m : -m;
                        },
                    },
                    noise);
}

std::string describe(const NoiseSpec& noise) {
  return std::visit(Overloaded{
                        [](const TwoSidedPareto& n) {
                          return "pareto(alpha=" + fmt(n.alpha) + ", p=" + fmt(n.p) + ", q=" + fmt(n.q) +
                                 ", scale=" + fmt(n.scale) + ")";
                        },
                        [](const StudentT& n) { return "student_t(dof=" + fmt(n.dof) + ")"; },
                        [](const StandardNormal&) { return std::string("normal"); },
                        [](const SymmetrizedPareto& n) {
                          return "symmetric_pareto(alpha=" + fmt(n.alpha) + ", scale=" + fmt(n.scale) + ")";
                        },
                    },
                    noise);
}

std::optional<double> tail_index(const NoiseSpec& noise) {
  return std::visit(Overloaded{
                        [](const TwoSidedPareto& n) -> std::optional<double> { return n.alpha; },
                        [](const StudentT& n) -> std::optional<double> { return n.dof; },
                        [](const StandardNormal&) -> std::optional<double> { return std::nullopt; },
                        [](const SymmetrizedPareto& n) -> std::optional<double> { return n.alpha; },
                    },
                    noise);
}

std::optional<std::pair<double, double>> tail_balance(const NoiseSpec& noise) {
  return std::visit(Overloaded{
                        [](const TwoSidedPareto& n) -> std::optional<std::pair<double, double>> {
                          return std::pair{n.p, n.q};
                        },
                        [](const StandardNormal&) -> std::optional<std::pair<double, double>> { return std::nullopt; },
                        [](const auto&) -> std::optional<std::pair<double, double>> { return std::pair{0.5, 0.5}; },
                    },
                    noise);
}

std::optional<double> tail_constant(const NoiseSpec& noise) {
  return std::visit(Overloaded{
                        [](const TwoSidedPareto& n) -> std::optional<double> {
                          return std::pow(n.scale, n.alpha) * (n.p + n.q);
                        },
                        [](const StudentT& n) -> std::optional<double> {
                          const double v = n.dof;
                          return 2.0 * std::tgamma(0.5 * (v + 1.0)) * std::pow(v, 0.5 * v - 1.0) /
                                 (std::sqrt(std::numbers::pi) * std::tgamma(0.5 * v));
                        },
                        [](const StandardNormal&) -> std::optional<double> { return std::nullopt; },
                        [](const SymmetrizedPareto& n) -> std::optional<double> { return std::pow(n.scale, n.alpha); },
                    },
                    noise);
}

bool has_exact_pareto_tail(const NoiseSpec& noise) {
  return std::holds_alternative<TwoSidedPareto>(noise) || std::holds_alternative<SymmetrizedPareto>(noise);
}

bool is_symmetric(const NoiseSpec& noise) {
  if (const auto* n = std::get_if<TwoSidedPareto>(&noise)) return n->p == n->q;
  return true;
}

std::optional<double> mean(const NoiseSpec& noise) {
  return std::visit(Overloaded{
                        [](const TwoSidedPareto& n) -> std::optional<double> {
                          if (n.alpha <= 1.0) return std::nullopt;
                          if (n.p == n.q) return 0.0;
                          return n.scale * n.alpha / (n.alpha - 1.0) * (n.p - n.q);
                        },
                        [](const StudentT& n) -> std::optional<double> {
                          if (n.dof <= 1.0) return std::nullopt;
                          return 0.0;
                        },
                        [](const StandardNormal&) -> std::optional<double> { return 0.0; },
                        [](const SymmetrizedPareto& n) -> std::optional<double> {
                          if (n.alpha <= 1.0) return std::nullopt;
                          return 0.0;
                        },
                    },
                    noise);
}

std::optional<double> abs_moment(const NoiseSpec& noise, double s) {
  const double sqrt_pi = std::sqrt(std::numbers::pi);
  return std::visit(Overloaded{
                        [&](const TwoSidedPareto& n) -> std::optional<double> {
                          if (s >= n.alpha) return kInf;
                          return std::pow(n.scale, s) * n.alpha / (n.alpha - s);
                        },
                        [&](const StudentT& n) -> std::optional<double> {
                          if (s >= n.dof) return kInf;
                          return std::pow(n.dof, 0.5 * s) * std::tgamma(0.5 * (s + 1.0)) *
                                 std::tgamma(0.5 * (n.dof - s)) / (sqrt_pi * std::tgamma(0.5 * n.dof));
                        },
                        [&](const StandardNormal&) -> std::optional<double> {
                          return std::pow(2.0, 0.5 * s) * std::tgamma(0.5 * (s + 1.0)) / sqrt_pi;
                        },
                        [&](const SymmetrizedPareto& n) -> std::optional<double> {
                          if (s >= n.alpha) return kInf;
                          return std::pow(n.scale, s) * n.alpha / (n.alpha - s);
                        },
                    },
                    noise);
}

void validate(const PositiveLaw& law) {
  std::visit(Overloaded{
                 [](const ConstantLaw& c) { require(c.value >= 0.0 && std::isfinite(c.value), "constant law must be >= 0"); },
                 [](const LogNormalLaw& l) {
                   require(std::isfinite(l.mu), "lognormal mu must be finite");
                   require(l.sigma2 > 0.0 && std::isfinite(l.sigma2), "lognormal sigma2 must be positive");
                 },
                 [](const ScaledSquareLaw& s) {
                   require(s.scale >= 0.0 && s.shift >= 0.0, "scaled-square law needs scale, shift >= 0");
                   validate(s.noise);
                 },
             },
             law);
}

double draw(const PositiveLaw& law, IndexedStream& rng) {
  return std::visit(Overloaded{
                        [](const ConstantLaw& c) { return c.value; },
                        [&](const LogNormalLaw& l) { return std::exp(l.mu + std::sqrt(l.sigma2) * rng.normal()); },
                        [&](const ScaledSquareLaw& s) {
                          const double y = draw(s.noise, rng);
                          return s.scale * y * y + s.shift;
                        },
                    },
                    law);
}

std::string describe(const PositiveLaw& law) {
  return std::visit(Overloaded{
                        [](const ConstantLaw& c) { return "constant(" + fmt(c.value) + ")"; },
                        [](const LogNormalLaw& l) { return "lognormal(mu=" + fmt(l.mu) + ", sigma2=" + fmt(l.sigma2) + ")"; },
                        [](const ScaledSquareLaw& s) {
                          return fmt(s.scale) + "*" + describe(s.noise) + "^2+" + fmt(s.shift);
                        },
                    },
                    law);
}

std::optional<double> power_moment(const PositiveLaw& law, double kappa) {
  return std::visit(Overloaded{
                        [&](const ConstantLaw& c) -> std::optional<double> { return std::pow(c.value, kappa); },
                        [&](const LogNormalLaw& l) -> std::optional<double> {
                          return std::exp(kappa * l.mu + 0.5 * kappa * kappa * l.sigma2);
                        },
                        [&](const ScaledSquareLaw& s) -> std::optional<double> {
                          if (s.shift != 0.0) return std::nullopt;
                          const auto m = abs_moment(s.noise, 2.0 * kappa);
                          if (!m) return std::nullopt;
                          return std::pow(s.scale, kappa) * *m;
                        },
                    },
                    law);
}

double law_mean(const PositiveLaw& law) {
  return std::visit(Overloaded{
                        [](const ConstantLaw& c) { return c.value; },
                        [](const LogNormalLaw& l) { return std::exp(l.mu + 0.5 * l.sigma2); },
                        [](const ScaledSquareLaw& s) {
                          const auto m2 = abs_moment(s.noise, 2.0);
                          return s.scale * m2.value_or(kInf) + s.shift;
                        },
                    },
                    law);
}

}  // namespace stablim
