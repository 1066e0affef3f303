#include "stablim/verify.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>

#include "stablim/parallel.hpp"
#include "stablim/stats.hpp"

namespace stablim {

namespace {

constexpr std::size_t kMeanDraws = 10000000;

// Stationary average of f(X) over kMeanDraws draws split across chains.
double stationary_average(const ModelSpec& model, std::uint64_t seed, const std::function<double(double)>& f) {
  std::vector<CompensatedSum> sums(kChains);
  parallel_for(kChains, [&](std::size_t k) {
    const Range r = chunk_range(kMeanDraws, kChains, k);
    Chain chain(model, derive_seed(seed, k));
    for (std::size_t i = r.begin; i < r.end; ++i) sums[k].add(f(chain.next()));
  });
  CompensatedSum total;
  for (const auto& s : sums) total.add(s);
  return total.value() / static_cast<double>(kMeanDraws);
}

// (S_len - len * center) / a for `replicates` independent chains.
Eigen::VectorXd normalized_sums(const ModelSpec& model, std::size_t len, double a, double center,
                                std::size_t replicates, std::uint64_t seed) {
  Eigen::VectorXd out(static_cast<Eigen::Index>(replicates));
  parallel_for(kChains, [&](std::size_t k) {
    const Range r = chunk_range(replicates, kChains, k);
    for (std::size_t rep = r.begin; rep < r.end; ++rep) {
      Chain chain(model, derive_seed(seed, rep));
      double s = 0.0;
      for (std::size_t t = 0; t < len; ++t) s += chain.next() - center;
      out[static_cast<Eigen::Index>(rep)] = s / a;
    }
  });
  return out;
}

double cf_se(std::complex<double> phi, std::size_t n) {
  return std::sqrt(std::max(0.0, 1.0 - std::norm(phi)) / static_cast<double>(n));
}

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

}  // namespace

std::string to_string(Centering c) {
  switch (c) {
    case Centering::None: return "none";
    case Centering::Mean: return "mean";
    case Centering::SineEmpirical: return "sine_empirical";
  }
  return "unknown";
}

void validate_centering(Centering c, double alpha, const ModelSpec& model) {
  switch (c) {
    case Centering::None: {
      const auto mean = model_mean(model);
      if (alpha > 1.0 && !(mean && *mean == 0.0))
        throw std::invalid_argument("alpha > 1 requires Mean centering unless the model is centered");
      break;
    }
    case Centering::Mean:
      if (!(alpha > 1.0)) throw std::invalid_argument("Mean centering requires alpha > 1 (no mean for alpha <= 1)");
      break;
    case Centering::SineEmpirical:
      if (std::abs(alpha - 1.0) > 0.1) throw std::invalid_argument("sine centering applies only for alpha near 1");
      break;
  }
}

StationaryMean stationary_mean(const ModelSpec& model, std::uint64_t seed) {
  if (const auto mean = model_mean(model)) return {*mean, true};
  return {stationary_average(model, seed, [](double v) { return v; }), false};
}

PartialSums partial_sum_sample(const SumExperiment& exp, const Normalization& norm, std::uint64_t seed) {
  validate(exp.model);
  if (exp.n < 2 || exp.replicates < 1) throw std::invalid_argument("partial sums need n >= 2 and replicates >= 1");
  validate_centering(exp.centering, exp.alpha, exp.model);
  const double a_n = norm.a_n(exp.n);
  PartialSums out{{}, a_n, 0.0, true};
  if (exp.centering == Centering::Mean) {
    const StationaryMean m = stationary_mean(exp.model, derive_seed(seed, 0xC3A7));
    out.centering_per_step = m.value;
    out.centering_exact = m.exact;
  } else if (exp.centering == Centering::SineEmpirical) {
    out.centering_per_step =
        a_n * stationary_average(exp.model, derive_seed(seed, 0xC3A7), [a_n](double v) { return std::sin(v / a_n); });
    out.centering_exact = false;
  }
  out.values = normalized_sums(exp.model, exp.n, a_n, out.centering_per_step, exp.replicates, seed);
  return out;
}

Eigen::VectorXd default_cf_grid() {
  Eigen::VectorXd g(10);
  g << -4.0, -2.0, -1.0, -0.5, -0.25, 0.25, 0.5, 1.0, 2.0, 4.0;
  return g;
}

CfDistance cf_distance(const Eigen::Ref<const Eigen::VectorXd>& samples, const StableLimitParams& params,
                       const Eigen::Ref<const Eigen::VectorXd>& grid, double floor) {
  const Eigen::VectorXcd emp = empirical_cf(samples, grid);
  CfDistance r{0.0, 0.0, 0.0, false, {}};
  const auto n = static_cast<std::size_t>(samples.size());
  for (Eigen::Index i = 0; i < grid.size(); ++i) {
    const std::complex<double> psi = stable_cf(params, grid[i]);
    const double gap = std::abs(emp[i] - psi);
    r.points.push_back({grid[i], emp[i], psi, gap});
    r.distance = std::max(r.distance, gap);
    r.mc_se = std::max(r.mc_se, cf_se(psi, n));
  }
  r.threshold = std::max(floor, 5.0 * r.mc_se);
  r.pass = r.distance < r.threshold;
  return r;
}

CfDistance cf_distance(const Eigen::Ref<const Eigen::VectorXd>& samples, const StableLimitParams& params) {
  return cf_distance(samples, params, default_cf_grid());
}

KsResult ks_distance(const Eigen::Ref<const Eigen::VectorXd>& samples, const StableLimitParams& params,
                     std::size_t n_ref, std::uint64_t seed, double level) {
  const auto n = static_cast<std::size_t>(samples.size());
  if (n == 0) throw std::invalid_argument("KS needs a nonempty sample");
  if (params.degenerate()) {
    const auto below = (samples.array() < 0.0).count();
    const auto above = (samples.array() > 0.0).count();
    const double d = static_cast<double>(std::max(below, above)) / static_cast<double>(n);
    const double crit = std::sqrt(-0.5 * std::log(level / 2.0)) / std::sqrt(static_cast<double>(n));
    return {d, crit, d < crit, n, 0};
  }
  if (n_ref == 0) throw std::invalid_argument("KS needs a nonempty reference sample");
  const Eigen::VectorXd ref = sample_stable(params, n_ref, derive_seed(seed, 0x4B53));
  const double d = ks_two_sample(samples, ref);
  const double crit = ks_critical_value(n, n_ref, level);
  return {d, crit, d < crit, n, n_ref};
}

ConvergenceReport check_convergence(const PartialSums& sums, const StableLimitParams& params, std::uint64_t seed) {
  ConvergenceReport r{};
  r.cf = cf_distance(sums.values, params);
  const auto n = static_cast<std::size_t>(sums.values.size());
  r.ks = ks_distance(sums.values, params, n, seed);
  r.degenerate = params.degenerate();
  r.abs_q99 = quantile(sums.values.cwiseAbs(), 0.99);
  if (r.degenerate) {
    r.verdict = r.cf.pass && r.abs_q99 < 0.05;
    r.note = r.verdict ? "degenerate limit confirmed" : "degenerate limit not confirmed";
  } else {
    r.verdict = r.cf.pass && r.ks.pass;
    r.note = r.verdict ? "stable limit confirmed" : "stable limit rejected";
  }
  return r;
}

AnticlusterResult anticluster_diag(const ModelSpec& model, const Normalization& norm, std::size_t d, std::size_t m,
                                   double x, std::size_t n, std::size_t replicates, std::uint64_t seed) {
  if (!(d >= 1 && d < m && m < n)) throw std::invalid_argument("anti-clustering needs 1 <= d < m < n");
  const double u = x * norm.a_n(n);
  std::vector<std::uint64_t> anchors(kChains, 0), hits(kChains, 0);
  parallel_for(kChains, [&](std::size_t k) {
    const Range r = chunk_range(replicates, kChains, k);
    std::vector<double> path(n + m);
    for (std::size_t rep = r.begin; rep < r.end; ++rep) {
      Chain chain(model, derive_seed(seed, rep));
      for (auto& v : path) v = std::abs(chain.next());
      for (std::size_t t = 0; t < n; ++t) {
        if (path[t] <= u) continue;
        ++anchors[k];
        for (std::size_t i = d; i <= m; ++i) {
          if (path[t + i] > u) {
            ++hits[k];
            break;
          }
        }
      }
    }
  });
  AnticlusterResult res{};
  for (std::size_t k = 0; k < kChains; ++k) {
    res.anchors += anchors[k];
    res.hits += hits[k];
  }
  if (res.anchors == 0) throw std::runtime_error("anti-clustering: no exceedance anchors found");
  const double a = static_cast<double>(res.anchors);
  res.probability = static_cast<double>(res.hits) / a;
  res.se = std::sqrt(res.probability * (1.0 - res.probability) / a);
  const double p_exceed = a / (static_cast<double>(replicates) * static_cast<double>(n));
  res.independent_reference = 1.0 - std::pow(1.0 - p_exceed, static_cast<double>(m - d + 1));
  return res;
}

MixingResult mixing_block_diag(const ModelSpec& model, const Normalization& norm, std::size_t n, std::size_t m,
                               const Eigen::Ref<const Eigen::VectorXd>& x_grid, std::size_t replicates,
                               std::uint64_t seed, double centering_per_step) {
  if (!(m >= 1 && m < n)) throw std::invalid_argument("mixing diagnostic needs 1 <= m < n");
  const double a_n = norm.a_n(n);
  const std::size_t k_n = n / m;
  const Eigen::VectorXd full = normalized_sums(model, n, a_n, centering_per_step, replicates, derive_seed(seed, 1));
  const Eigen::VectorXd block = normalized_sums(model, m, a_n, centering_per_step, replicates, derive_seed(seed, 2));
  const Eigen::VectorXcd phi_n = empirical_cf(full, x_grid);
  const Eigen::VectorXcd phi_m = empirical_cf(block, x_grid);
  MixingResult r{n, m, k_n, {}};
  const double kn = static_cast<double>(k_n);
  for (Eigen::Index i = 0; i < x_grid.size(); ++i) {
    const std::complex<double> power = std::pow(phi_m[i], kn);
    const double se_n = cf_se(phi_n[i], replicates);
    const double se_m = kn * std::pow(std::abs(phi_m[i]), kn - 1.0) * cf_se(phi_m[i], replicates);
    r.points.push_back({x_grid[i], phi_n[i], power, std::abs(phi_n[i] - power), 3.0 * std::hypot(se_n, se_m)});
  }
  return r;
}

LevyTailResult levy_tail_check(const ModelSpec& model, const Normalization& norm, std::size_t m, std::size_t n,
                               const std::vector<double>& x_grid, std::size_t replicates, std::uint64_t seed,
                               double alpha, double c_plus, double c_plus_se) {
  if (!(m >= 1 && m < n)) throw std::invalid_argument("Lévy-tail check needs 1 <= m < n");
  if (x_grid.empty()) throw std::invalid_argument("Lévy-tail check needs thresholds");
  const double a_n = norm.a_n(n);
  const std::size_t gap = independence_lag(model).value_or(m);
  std::vector<std::vector<std::uint64_t>> counts(kChains, std::vector<std::uint64_t>(x_grid.size(), 0));
  parallel_for(kChains, [&](std::size_t k) {
    const Range r = chunk_range(replicates, kChains, k);
    if (r.begin == r.end) return;
    Chain chain(model, derive_seed(seed, k));
    for (std::size_t b = r.begin; b < r.end; ++b) {
      double s = 0.0;
      for (std::size_t t = 0; t < m; ++t) s += chain.next();
      for (std::size_t j = 0; j < x_grid.size(); ++j)
        if (s > x_grid[j] * a_n) ++counts[k][j];
      chain.skip(gap);
    }
  });
  LevyTailResult res{n, m, n / m, {}, true};
  const double kn = static_cast<double>(res.k_n);
  const double R = static_cast<double>(replicates);
  const double rel_norm = norm.relative_se(n);
  const bool independent_blocks = independence_lag(model).has_value();
  std::vector<std::uint64_t> trials(kChains);
  for (std::size_t k = 0; k < kChains; ++k) {
    const Range r = chunk_range(replicates, kChains, k);
    trials[k] = r.end - r.begin;
  }
  bool any = false;
  for (std::size_t j = 0; j < x_grid.size(); ++j) {
    std::vector<std::uint64_t> per_chain(kChains);
    std::uint64_t c = 0;
    for (std::size_t k = 0; k < kChains; ++k) {
      per_chain[k] = counts[k][j];
      c += per_chain[k];
    }
    const double f = static_cast<double>(c) / R;
    LevyPoint p{};
    p.x = x_grid[j];
    p.count = c;
    p.empirical = kn * f;
    const double f_se = independent_blocks || c == 0 ? std::sqrt(f * (1.0 - f) / R)
                                                     : clustered_fraction_se(per_chain, trials);
    p.se = std::hypot(kn * f_se, p.empirical * rel_norm);
    const double xa = std::pow(p.x, -alpha);
    p.theory = c_plus * xa;
    p.theory_se = c_plus_se * xa;
    p.included = c > 0;
    p.within = std::abs(p.empirical - p.theory) <= 3.0 * std::hypot(p.se, p.theory_se);
    if (p.included) {
      any = true;
      res.pass = res.pass && p.within;
    }
    res.points.push_back(p);
  }
  res.pass = res.pass && any;
  return res;
}

void write_cf_csv(std::ostream& os, const CfDistance& cf) {
  os << "x,empirical_re,empirical_im,theory_re,theory_im,gap\n";
  for (const auto& p : cf.points)
    os << num(p.x) << ',' << num(p.empirical.real()) << ',' << num(p.empirical.imag()) << ','
       << num(p.theory.real()) << ',' << num(p.theory.imag()) << ',' << num(p.gap) << '\n';
}

void write_mixing_csv(std::ostream& os, const MixingResult& r) {
  os << "n,m,k_n,x,gap,band\n";
  for (const auto& p : r.points)
    os << r.n << ',' << r.m << ',' << r.k_n << ',' << num(p.x) << ',' << num(p.gap) << ',' << num(p.band) << '\n';
}

void write_levy_csv(std::ostream& os, const LevyTailResult& r) {
  os << "n,m,k_n,x,count,empirical,se,theory,theory_se,within\n";
  for (const auto& p : r.points)
    os << r.n << ',' << r.m << ',' << r.k_n << ',' << num(p.x) << ',' << p.count << ',' << num(p.empirical) << ','
       << num(p.se) << ',' << num(p.theory) << ',' << num(p.theory_se) << ',' << (p.within ? 1 : 0) << '\n';
}

}  // namespace stablim
