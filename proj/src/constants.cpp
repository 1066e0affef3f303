#include "stablim/constants.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <optional>
#include <sstream>
#include <stdexcept>

#include "stablim/parallel.hpp"
#include "stablim/rng.hpp"
#include "stablim/stats.hpp"
#include "stablim/tail.hpp"

namespace stablim {

namespace {

constexpr std::size_t kMaxTruncation = 1000000;
constexpr std::size_t kAuxiliaryDraws = 100000;

struct MeanSe {
  double mean;
  double se;
};

// Mean and iid standard error of f(i) over i in [0, draws), reduced in a
// fixed chunk order so the result does not depend on the worker count.
MeanSe mc_mean(std::size_t draws, const std::function<double(std::size_t)>& f) {
  if (draws < 2) throw std::invalid_argument("Monte Carlo needs at least two draws");
  std::vector<CompensatedSum> s1(kChains), s2(kChains);
  parallel_for(kChains, [&](std::size_t k) {
    const Range r = chunk_range(draws, kChains, k);
    for (std::size_t i = r.begin; i < r.end; ++i) {
      const double v = f(i);
      s1[k].add(v);
      s2[k].add(v * v);
    }
  });
  CompensatedSum t1, t2;
  for (std::size_t k = 0; k < kChains; ++k) {
    t1.add(s1[k]);
    t2.add(s2[k]);
  }
  const double n = static_cast<double>(draws);
  const double m = t1.value() / n;
  const double var = std::max(0.0, (t2.value() / n - m * m) * n / (n - 1.0));
  return {m, std::sqrt(var / n)};
}

// (base + add)^alpha - base^alpha without cancellation for large base.
double power_increment(double base, double add, double alpha) {
  if (base <= 0.0) return std::pow(add, alpha);
  return std::pow(base, alpha) * std::expm1(alpha * std::log1p(add / base));
}

// |w + z|^s - |w|^s without cancellation for large |w|.
double signed_power_increment(double w, double z, double s) {
  if (w == 0.0) return std::pow(std::abs(z), s);
  const double r = z / w;
  const double log_ratio = r > -1.0 ? std::log1p(r) : std::log(std::abs(1.0 + r));
  return std::pow(std::abs(w), s) * std::expm1(s * log_ratio);
}

// Positive root of g(kappa) = 1 for convex g with g(0) = 1, bisected down
// to a bracket narrower than `width`.
double solve_unit_root(const std::function<double(double)>& g, double width) {
  double hi = 1.0;
  int steps = 0;
  while (!(g(hi) > 1.0)) {
    hi *= 2.0;
    if (++steps > 12) throw std::runtime_error("Kesten index: no bracket, E A^kappa <= 1 up to kappa = 4096");
  }
  double lo = hi / 2.0;
  steps = 0;
  while (!(g(lo) < 1.0)) {
    lo /= 2.0;
    if (++steps > 60) throw std::runtime_error("Kesten index: no bracket, E A^kappa >= 1 near kappa = 0");
  }
  for (int i = 0; i < 200 && hi - lo > width; ++i) {
    const double mid = 0.5 * (lo + hi);
    (g(mid) < 1.0 ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

double draw_positive(const PositiveLaw& a, IndexedStream& rng) {
  const double v = draw(a, rng);
  if (!(v > 0.0)) throw std::runtime_error("Kesten index: non-positive draw of A");
  return v;
}

// E A^kappa from the closed form when there is one, else an upper 3-sigma
// Monte Carlo bound.
double power_moment_bound(const PositiveLaw& a, double kappa, std::uint64_t seed) {
  if (const auto m = power_moment(a, kappa)) return *m;
  const MeanSe g = mc_mean(kAuxiliaryDraws, [&](std::size_t i) {
    IndexedStream rng(seed, streams::tertiary, i);
    return std::pow(draw(a, rng), kappa);
  });
  return g.mean + 3.0 * g.se;
}

void check_moment_equation(const PositiveLaw& a, double alpha, std::uint64_t seed) {
  if (!(alpha > 0.0)) throw std::invalid_argument("alpha must be positive");
  if (const auto m = power_moment(a, alpha)) {
    if (std::abs(*m - 1.0) > 1e-2) throw std::invalid_argument("E A^alpha = 1 does not hold for the given alpha");
    return;
  }
  const MeanSe g = mc_mean(kAuxiliaryDraws, [&](std::size_t i) {
    IndexedStream rng(seed, streams::tertiary, i);
    return std::pow(draw(a, rng), alpha);
  });
  if (std::abs(g.mean - 1.0) > std::max(1e-2, 4.0 * g.se))
    throw std::invalid_argument("E A^alpha = 1 does not hold for the given alpha (Monte Carlo " +
                                std::to_string(g.mean) + ")");
}

// Smallest N >= first with prefactor * rho^(N + 1 - first) / (1 - rho) below tolerance.
std::pair<std::size_t, double> truncation_for(double rho, double prefactor, double tolerance, std::size_t first) {
  if (!(rho < 1.0)) throw std::runtime_error("truncation: geometric factor E A^kappa is not below 1");
  if (!(tolerance > 0.0)) throw std::invalid_argument("truncation tolerance must be positive");
  if (rho <= 0.0) return {first, 0.0};
  for (std::size_t n = first; n <= kMaxTruncation; ++n) {
    const double bound = prefactor * std::pow(rho, static_cast<double>(n + 1 - first)) / (1.0 - rho);
    if (bound < tolerance) return {n, bound};
  }
  throw std::runtime_error("truncation bound exceeds requested tolerance at the maximal cutoff");
}

Garch11 garch_spec(double alpha0, double alpha1, double beta1, const NoiseSpec& noise) {
  Garch11 g{alpha0, alpha1, beta1, noise, GarchOutput::Squares};
  validate(ModelSpec{g, 0});
  return g;
}

// E|Z|^s for the unit-variance noise of the recursion.
double garch_abs_moment(const Garch11& g, double s) {
  double f = 1.0;
  if (const auto* t = std::get_if<StudentT>(&g.noise)) f = std::sqrt((t->dof - 2.0) / t->dof);
  const auto m = abs_moment(g.noise, s);
  if (!m || !std::isfinite(*m)) throw std::invalid_argument("noise moment E|Z|^" + std::to_string(s) + " is infinite");
  return std::pow(f, s) * *m;
}

std::string num(double v) {
  std::ostringstream os;
  os.precision(17);
  os << v;
  return os.str();
}

}  // namespace

KestenResult kesten_index(const PositiveLaw& a, std::size_t mc_draws, double tolerance, std::uint64_t seed,
                          KestenMethod method) {
  validate(a);
  if (const auto* c = std::get_if<ConstantLaw>(&a))
    throw std::runtime_error("Kesten index: no bracket, g(kappa) = " + num(c->value) +
                             "^kappa never crosses 1 (g is log-linear)");
  const double width = std::max(tolerance, 1e-15) * 1e-3;
  KestenResult r{};
  if (method != KestenMethod::MonteCarlo) {
    if (const auto* l = std::get_if<LogNormalLaw>(&a)) {
      if (!(l->mu < 0.0)) throw std::runtime_error("Kesten index: no bracket, lognormal mu must be negative");
      r.alpha = -2.0 * l->mu / l->sigma2;
      r.closed_form = true;
    } else if (const auto* s = std::get_if<ScaledSquareLaw>(&a); s && s->shift == 0.0 && power_moment(a, 1.0)) {
      r.alpha = solve_unit_root([&](double k) { return *power_moment(a, k); }, width);
      r.closed_form = true;
    } else if (method == KestenMethod::ClosedForm) {
      throw std::invalid_argument("Kesten index: no closed form for " + describe(a));
    }
  }
  if (r.closed_form) {
    r.g_half = *power_moment(a, 0.5 * r.alpha);
    r.g_at = *power_moment(a, r.alpha);
    r.g_three_halves = *power_moment(a, 1.5 * r.alpha);
    r.residual = r.g_at - 1.0;
    r.convex = r.g_at <= 0.5 * (r.g_half + r.g_three_halves);
    return r;
  }
  if (mc_draws < 2) throw std::invalid_argument("Kesten index needs mc_draws >= 2");
  std::vector<double> logs(mc_draws);
  parallel_for(kChains, [&](std::size_t k) {
    const Range rg = chunk_range(mc_draws, kChains, k);
    for (std::size_t i = rg.begin; i < rg.end; ++i) {
      IndexedStream rng(seed, streams::primary, i);
      logs[i] = std::log(draw_positive(a, rng));
    }
  });
  auto g = [&](double kappa) { return mc_mean(mc_draws, [&](std::size_t i) { return std::exp(kappa * logs[i]); }); };
  r.alpha = solve_unit_root([&](double k) { return g(k).mean; }, width);
  const MeanSe at = g(r.alpha);
  const MeanSe half = g(0.5 * r.alpha);
  const MeanSe three = g(1.5 * r.alpha);
  r.draws = mc_draws;
  r.g_at = at.mean;
  r.g_se = at.se;
  r.residual = at.mean - 1.0;
  r.g_half = half.mean;
  r.g_three_halves = three.mean;
  r.convex = r.g_at <= 0.5 * (half.mean + three.mean) + 3.0 * (at.se + half.se + three.se);
  return r;
}

GoldieResult goldie_c0(const PositiveLaw& a, const PositiveLaw& b, double alpha, std::size_t mc_draws,
                       std::size_t burn_in, std::uint64_t seed) {
  const ModelSpec spec{Sre{a, b}, burn_in};
  validate(spec);
  if (!(alpha > 0.0)) throw std::invalid_argument("alpha must be positive");
  if (mc_draws < 2 * kChains) throw std::invalid_argument("goldie_c0 needs at least 128 draws");

  // Numerator: consecutive stationary states are correlated, so the se comes
  // from batch means over independent chains.
  std::vector<CompensatedSum> chain_sums(kChains);
  parallel_for(kChains, [&](std::size_t k) {
    const Range r = chunk_range(mc_draws, kChains, k);
    const std::uint64_t chain_seed = derive_seed(seed, k);
    Chain chain(spec, chain_seed);
    for (std::size_t i = r.begin; i < r.end; ++i) {
      const double x0 = chain.next();
      IndexedStream rng(chain_seed, streams::tertiary, i);
      const double a1 = draw(a, rng);
      const double b1 = draw(b, rng);
      chain_sums[k].add(power_increment(a1 * x0, b1, alpha));
    }
  });
  CompensatedSum total;
  std::vector<double> batch(kChains);
  for (std::size_t k = 0; k < kChains; ++k) {
    total.add(chain_sums[k]);
    const Range r = chunk_range(mc_draws, kChains, k);
    batch[k] = chain_sums[k].value() / static_cast<double>(r.end - r.begin);
  }
  const double num_mean = total.value() / static_cast<double>(mc_draws);
  double ss = 0.0;
  for (double v : batch) ss += (v - num_mean) * (v - num_mean);
  const double kc = static_cast<double>(kChains);
  const double num_se = std::sqrt(ss / (kc - 1.0) / kc);

  const MeanSe den = mc_mean(mc_draws, [&](std::size_t i) {
    IndexedStream rng(seed, streams::secondary, i);
    const double v = draw(a, rng);
    return v > 0.0 ? std::pow(v, alpha) * std::log(v) : 0.0;
  });
  if (std::abs(den.mean) <= 3.0 * den.se)
    throw std::runtime_error("goldie_c0: E A^alpha log A = " + num(den.mean) + " is within 3 se of zero");
  GoldieResult r{};
  r.numerator = num_mean;
  r.numerator_se = num_se;
  r.denominator = den.mean;
  r.denominator_se = den.se;
  r.c0 = num_mean / (alpha * den.mean);
  const double rel_den = den.se / std::abs(den.mean);
  r.se = num_mean != 0.0 ? std::abs(r.c0) * std::hypot(num_se / std::abs(num_mean), rel_den)
                         : num_se / (alpha * std::abs(den.mean));
  return r;
}

TInfinityEstimate c_plus_sre(const PositiveLaw& a, double alpha, std::size_t mc_draws, double truncation_tolerance,
                             std::uint64_t seed) {
  validate(a);
  TInfinityEstimate e{};
  e.kappa = 0.9 * std::min(alpha, 1.0);
  const bool zero = std::holds_alternative<ConstantLaw>(a) && std::get<ConstantLaw>(a).value == 0.0;
  if (!zero) check_moment_equation(a, alpha, seed);
  e.rho = zero ? 0.0 : power_moment_bound(a, e.kappa, seed);
  std::tie(e.truncation, e.truncation_bound) = truncation_for(e.rho, 1.0, truncation_tolerance, 0);
  const std::size_t n_terms = e.truncation;
  const MeanSe m = mc_mean(mc_draws, [&](std::size_t i) {
    IndexedStream rng(seed, streams::primary, i);
    double prod = 1.0, t = 0.0;
    for (std::size_t s = 0; s < n_terms; ++s) {
      prod *= draw(a, rng);
      t += prod;
    }
    return power_increment(t, 1.0, alpha);
  });
  e.mean_functional = m.mean;
  e.se = m.se;
  return e;
}

TInfinityEstimate c_plus_garch_sq(double alpha0, double alpha1, double beta1, const NoiseSpec& noise, double alpha,
                                  std::size_t mc_draws, double truncation_tolerance, std::uint64_t seed) {
  const Garch11 g = garch_spec(alpha0, alpha1, beta1, noise);
  const PositiveLaw mult = garch_multiplier(g);
  check_moment_equation(mult, alpha, seed);
  TInfinityEstimate e{};
  e.kappa = 0.9 * std::min(alpha, 1.0);
  e.rho = power_moment_bound(mult, e.kappa, seed);
  // The discarded terms are Z_t^2 Pi_t with E(Z_t^2 Pi_t)^kappa = E|Z|^(2 kappa) rho^t.
  const double prefactor = garch_abs_moment(g, 2.0 * e.kappa);
  std::tie(e.truncation, e.truncation_bound) = truncation_for(e.rho, prefactor, truncation_tolerance, 0);
  const std::size_t n_terms = e.truncation;
  const MeanSe m = mc_mean(mc_draws, [&](std::size_t i) {
    IndexedStream rng(seed, streams::primary, i);
    const double z0 = garch_noise_draw(g, rng);
    double prev = z0, prod = 1.0, t = 0.0;
    for (std::size_t s = 1; s <= n_terms; ++s) {
      prod *= g.alpha1 * prev * prev + g.beta1;
      const double z = garch_noise_draw(g, rng);
      t += z * z * prod;
      prev = z;
    }
    return power_increment(t, z0 * z0, alpha);
  });
  const double denom = garch_abs_moment(g, 2.0 * alpha);
  e.mean_functional = m.mean / denom;
  e.se = m.se / denom;
  return e;
}

TInfinityEstimate c_plus_garch(double alpha0, double alpha1, double beta1, const NoiseSpec& noise, double alpha,
                               std::size_t mc_draws, double truncation_tolerance, std::uint64_t seed) {
  const Garch11 g = garch_spec(alpha0, alpha1, beta1, noise);
  if (!is_symmetric(noise)) throw std::invalid_argument("c_plus_garch requires symmetric noise");
  if (!(2.0 * alpha > 0.0 && 2.0 * alpha < 2.0))
    throw std::invalid_argument("c_plus_garch requires the return index 2 alpha in (0,2)");
  const PositiveLaw mult = garch_multiplier(g);
  const bool zero = g.alpha1 == 0.0 && g.beta1 == 0.0;
  if (!zero) check_moment_equation(mult, alpha, seed);
  TInfinityEstimate e{};
  e.kappa = 0.9 * std::min(2.0 * alpha, 1.0);
  e.rho = zero ? 0.0 : power_moment_bound(mult, 0.5 * e.kappa, seed);
  // Term t of the signed series has E|.|^kappa = E|Z|^kappa rho^(t-1).
  const double prefactor = garch_abs_moment(g, e.kappa);
  std::tie(e.truncation, e.truncation_bound) = truncation_for(e.rho, prefactor, truncation_tolerance, 1);
  const std::size_t n_terms = e.truncation;
  const double s = 2.0 * alpha;
  const MeanSe m = mc_mean(mc_draws, [&](std::size_t i) {
    IndexedStream rng(seed, streams::primary, i);
    const double z0 = garch_noise_draw(g, rng);
    double root_prod = 1.0, t = 0.0;
    for (std::size_t k = 1; k <= n_terms; ++k) {
      const double z = garch_noise_draw(g, rng);
      t += z * root_prod;
      root_prod *= std::sqrt(g.alpha1 * z * z + g.beta1);
    }
    const double w = std::sqrt(g.alpha1 * z0 * z0 + g.beta1) * t;
    return signed_power_increment(w, z0, s);
  });
  const double denom = 2.0 * garch_abs_moment(g, s);
  e.mean_functional = m.mean / denom;
  e.se = m.se / denom;
  return e;
}

std::pair<double, double> c_sv(const NoiseSpec& noise) {
  const auto tb = tail_balance(noise);
  if (!tb) throw std::invalid_argument("noise " + describe(noise) + " has no tail-balance parameters");
  return *tb;
}

std::vector<double> window_sums(const std::vector<double>& coeffs, std::size_t d) {
  if (coeffs.empty()) throw std::invalid_argument("empty coefficient list");
  if (d == 0) throw std::invalid_argument("window length must be >= 1");
  const std::size_t q = coeffs.size();
  std::vector<double> s(q + d - 1, 0.0);
  for (std::size_t i = 0; i < d; ++i)
    for (std::size_t j = 0; j < q; ++j) s[i + j] += coeffs[j];
  return s;
}

double b_plus_sas(const std::vector<double>& coeffs, double alpha, double d) {
  if (std::none_of(coeffs.begin(), coeffs.end(), [](double c) { return c != 0.0; }))
    throw std::invalid_argument("b_plus_sas: all-zero coefficients");
  if (!(d >= 1.0) || d != std::floor(d)) throw std::invalid_argument("b_plus_sas: d must be a positive integer");
  double num = 0.0, den = 0.0;
  for (double s : window_sums(coeffs, static_cast<std::size_t>(d))) num += std::pow(std::abs(s), alpha);
  for (double c : coeffs) den += std::pow(std::abs(c), alpha);
  return num / den;
}

std::pair<double, double> b_moving_average(const std::vector<double>& coeffs, double alpha, double p, double q,
                                           std::size_t d) {
  double den = 0.0;
  for (double c : coeffs) den += std::pow(std::abs(c), alpha);
  den *= p + q;
  double bp = 0.0, bm = 0.0;
  for (double s : window_sums(coeffs, d)) {
    const double w = std::pow(std::abs(s), alpha);
    if (s > 0.0) {
      bp += p * w;
      bm += q * w;
    } else if (s < 0.0) {
      bp += q * w;
      bm += p * w;
    }
  }
  return {bp / den, bm / den};
}

std::string to_record(const KestenResult& r) {
  std::ostringstream os;
  os << "alpha: " << num(r.alpha) << '\n'
     << "method: " << (r.closed_form ? "closed_form" : "monte_carlo") << '\n'
     << "draws: " << r.draws << '\n'
     << "residual: " << num(r.residual) << '\n'
     << "g_se: " << num(r.g_se) << '\n'
     << "g_half_alpha: " << num(r.g_half) << '\n'
     << "g_alpha: " << num(r.g_at) << '\n'
     << "g_three_halves_alpha: " << num(r.g_three_halves) << '\n'
     << "convex: " << (r.convex ? "yes" : "no") << '\n';
  return os.str();
}

std::string to_record(const GoldieResult& r) {
  std::ostringstream os;
  os << "c0: " << num(r.c0) << '\n'
     << "se: " << num(r.se) << '\n'
     << "numerator: " << num(r.numerator) << '\n'
     << "numerator_se: " << num(r.numerator_se) << '\n'
     << "denominator: " << num(r.denominator) << '\n'
     << "denominator_se: " << num(r.denominator_se) << '\n';
  return os.str();
}

std::string to_record(const TInfinityEstimate& r) {
  std::ostringstream os;
  os << "estimate: " << num(r.mean_functional) << '\n'
     << "se: " << num(r.se) << '\n'
     << "truncation: " << r.truncation << '\n'
     << "truncation_bound: " << num(r.truncation_bound) << '\n'
     << "kappa: " << num(r.kappa) << '\n'
     << "rho: " << num(r.rho) << '\n';
  return os.str();
}

}  // namespace stablim
