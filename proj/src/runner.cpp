#include "stablim/runner.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <vector>

#include "stablim/constants.hpp"
#include "stablim/stable.hpp"
#include "stablim/verify.hpp"

namespace stablim {

namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

// Sub-seed tags, one per consumer of the master seed.
enum SeedTag : std::uint64_t {
  kTagNormalization = 1,
  kTagTailProfile,
  kTagBTable,
  kTagTheory,
  kTagConvergence,
  kTagAnticluster,
  kTagMixing,
  kTagLevy,
  kTagMean,
};

constexpr double kKestenTolerance = 1e-10;
constexpr double kTruncationTolerance = 1e-6;

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string indent(const std::string& record) {
  std::istringstream in(record);
  std::string line, out;
  while (std::getline(in, line)) out += "  " + line + "\n";
  return out;
}

double power_sum(const std::vector<double>& c, double alpha) {
  double s = 0.0;
  for (double x : c) s += std::pow(std::abs(x), alpha);
  return s;
}

bool is_recurrence(const ModelSpec& spec) {
  return std::holds_alternative<Sre>(spec.variant) || std::holds_alternative<Garch11>(spec.variant);
}

// Writes `body` to dir/name, prefixed with a provenance comment line.
void write_report(const std::filesystem::path& dir, const std::string& name, const std::string& body,
                  std::uint64_t seed, const std::string& hash) {
  std::ofstream out(dir / name, std::ios::binary);
  if (!out) throw std::runtime_error("cannot write report " + (dir / name).string());
  out << "# seed=" << seed << " config_hash=" << hash << '\n' << body;
  if (!out) throw std::runtime_error("failed writing report " + (dir / name).string());
}

std::vector<std::size_t> default_m_grid(std::size_t n) {
  std::vector<std::size_t> grid;
  for (double e : {0.3, 0.5, 0.7}) {
    const auto m = static_cast<std::size_t>(std::llround(std::pow(static_cast<double>(n), e)));
    if (m >= 2 && m < n && (grid.empty() || grid.back() != m)) grid.push_back(m);
  }
  return grid;
}

Centering auto_centering(double alpha) {
  if (std::abs(alpha - 1.0) <= 0.1) return Centering::SineEmpirical;
  return alpha > 1.0 ? Centering::Mean : Centering::None;
}

}  // namespace

std::optional<std::pair<double, double>> exact_b(const ModelSpec& spec, double alpha, std::size_t d) {
  using Result = std::optional<std::pair<double, double>>;
  const double dd = static_cast<double>(d);
  return std::visit(
      Overloaded{
          [&](const IidRV& m) -> Result {
            const auto tb = tail_balance(m.noise);
            if (!tb) return std::nullopt;
            return std::pair{dd * tb->first, dd * tb->second};
          },
          [&](const Differenced& m) -> Result {
            const auto tb = tail_balance(m.noise);
            if (!tb) return std::nullopt;
            return b_moving_average({1.0, -1.0}, alpha, tb->first, tb->second, d);
          },
          [&](const MDependent& m) -> Result {
            const auto tb = tail_balance(m.noise);
            if (!tb) return std::nullopt;
            return b_moving_average(m.coeffs, alpha, tb->first, tb->second, d);
          },
          [&](const StochVol& m) -> Result {
            const auto tb = tail_balance(m.noise);
            if (!tb) return std::nullopt;
            return std::pair{dd * tb->first, dd * tb->second};
          },
          [&](const SasMa& m) -> Result {
            const double half = 0.5 * b_plus_sas(m.coeffs, alpha, dd);
            return std::pair{half, half};
          },
          [](const auto&) -> Result { return std::nullopt; },
      },
      spec.variant);
}

TheoryConstants theory_constants(const ModelSpec& spec, std::size_t mc_draws, std::uint64_t seed) {
  validate(spec);
  TheoryConstants t{};
  std::ostringstream rec;
  auto noise_side = [&](const NoiseSpec& noise) {
    const auto a = tail_index(noise);
    const auto tb = tail_balance(noise);
    if (!a || !tb) throw std::invalid_argument("noise " + describe(noise) + " is not heavy-tailed");
    t.alpha = *a;
    return *tb;
  };
  std::visit(
      Overloaded{
          [&](const IidRV& m) {
            std::tie(t.c_plus, t.c_minus) = noise_side(m.noise);
            t.method = "tail balance of the noise";
          },
          [&](const Differenced& m) {
            noise_side(m.noise);
            t.c_plus = t.c_minus = 0.0;
            t.method = "telescoping partial sums, degenerate limit";
          },
          [&](const MDependent& m) {
            const auto [p, q] = noise_side(m.noise);
            const std::size_t len = m.coeffs.size();
            const auto hi = b_moving_average(m.coeffs, t.alpha, p, q, len + 1);
            const auto lo = b_moving_average(m.coeffs, t.alpha, p, q, len);
            t.c_plus = hi.first - lo.first;
            t.c_minus = hi.second - lo.second;
            t.method = "increment of the exact b(d) past the memory";
          },
          [&](const Sre& m) {
            const KestenResult k = kesten_index(m.a, mc_draws, kKestenTolerance, derive_seed(seed, 1));
            rec << "kesten:\n" << indent(to_record(k));
            t.alpha = k.alpha;
            const TInfinityEstimate e =
                c_plus_sre(m.a, k.alpha, mc_draws, kTruncationTolerance, derive_seed(seed, 2));
            rec << "t_infinity:\n" << indent(to_record(e));
            try {
              const GoldieResult g = goldie_c0(m.a, m.b, k.alpha, mc_draws, spec.burn_in, derive_seed(seed, 3));
              rec << "goldie:\n" << indent(to_record(g));
            } catch (const std::exception& ex) {
              rec << "goldie: unavailable (" << ex.what() << ")\n";
            }
            t.c_plus = e.mean_functional;
            t.se_plus = e.se;
            t.c_minus = 0.0;
            t.method = "Kesten index and the T_infinity functional";
          },
          [&](const Garch11& m) {
            const Garch11 g{m.alpha0, m.alpha1, m.beta1, m.noise, m.output};
            const KestenResult k = kesten_index(garch_multiplier(g), mc_draws, kKestenTolerance, derive_seed(seed, 1));
            rec << "kesten:\n" << indent(to_record(k));
            if (m.output == GarchOutput::Squares) {
              if (!(k.alpha < 2.0))
                throw std::invalid_argument("GARCH squares have tail index " + num(k.alpha) +
                                            " >= 2; the limit is Gaussian, not covered");
              t.alpha = k.alpha;
              const TInfinityEstimate e = c_plus_garch_sq(m.alpha0, m.alpha1, m.beta1, m.noise, k.alpha, mc_draws,
                                                          kTruncationTolerance, derive_seed(seed, 2));
              rec << "t_infinity:\n" << indent(to_record(e));
              t.c_plus = e.mean_functional;
              t.se_plus = e.se;
              t.c_minus = 0.0;
            } else {
              if (!(k.alpha < 1.0))
                throw std::invalid_argument("GARCH returns have tail index " + num(2.0 * k.alpha) +
                                            " >= 2; the limit is Gaussian, not covered");
              t.alpha = 2.0 * k.alpha;
              const TInfinityEstimate e = c_plus_garch(m.alpha0, m.alpha1, m.beta1, m.noise, k.alpha, mc_draws,
                                                       kTruncationTolerance, derive_seed(seed, 2));
              rec << "t_infinity:\n" << indent(to_record(e));
              t.c_plus = t.c_minus = e.mean_functional;
              t.se_plus = t.se_minus = e.se;
            }
            t.method = "Kesten index of alpha1 Z^2 + beta1 and the T_infinity functional";
          },
          [&](const StochVol& m) {
            noise_side(m.noise);
            std::tie(t.c_plus, t.c_minus) = c_sv(m.noise);
            t.method = "tail balance of the noise (no extremal clustering)";
          },
          [&](const SasMa& m) {
            t.alpha = m.alpha;
            double total = 0.0;
            for (double c : m.coeffs) total += c;
            t.c_plus = t.c_minus = 0.5 * std::pow(std::abs(total), m.alpha) / power_sum(m.coeffs, m.alpha);
            t.method = "exact stable moving average";
          },
      },
      spec.variant);
  t.exact_b = exact_b(spec, t.alpha, 1).has_value();
  t.excluded = is_recurrence(spec) && std::abs(t.alpha - 1.0) <= kAlphaOneBand;
  t.record = rec.str();
  return t;
}

Normalization make_normalization(const ModelSpec& spec, NormalizationKind kind, std::size_t n_min,
                                 std::size_t reference_factor, std::uint64_t seed) {
  const auto tail = closed_form_tail(spec);
  if (kind == NormalizationKind::ClosedForm) {
    if (!tail) throw std::invalid_argument("model " + model_name(spec) + " has no closed-form normalization");
    return Normalization::closed_form(*tail);
  }
  if (kind == NormalizationKind::Auto && tail) return Normalization::closed_form(*tail);
  return Normalization::empirical(spec, n_min, seed, reference_factor);
}

int run_config(const ExperimentConfig& config, const std::string& out_dir, std::ostream& log) {
  namespace fs = std::filesystem;
  const ModelSpec& model = config.model;
  const Sizes& z = config.sizes;
  const std::uint64_t seed = config.seed;
  auto has = [&](Task t) { return std::find(config.tasks.begin(), config.tasks.end(), t) != config.tasks.end(); };

  std::string hash;
  TheoryConstants theory{};
  const bool need_theory = has(Task::BTable) || has(Task::TheoryConstants) || has(Task::Convergence) ||
                           has(Task::Diagnostics);
  const bool needs_sums = has(Task::Convergence);
  const std::size_t n_min = needs_sums ? std::min(z.n, z.sum_n) : z.n;
  const std::size_t n_max = needs_sums ? std::max(z.n, z.sum_n) : z.n;
  Centering centering = Centering::None;

  // Everything that can be rejected is checked before any simulation.
  try {
    validate_config(config);
    hash = config_hash(config);
    const bool closed = closed_form_tail(model).has_value();
    if (config.normalization == NormalizationKind::ClosedForm && !closed)
      throw ConfigError("config field 'normalization': model " + model_name(model) +
                        " has no closed-form normalization");
    const bool empirical = config.normalization == NormalizationKind::Empirical ||
                           (config.normalization == NormalizationKind::Auto && !closed);
    if (empirical && n_max * 100 > z.reference_factor * n_min)
      throw ConfigError("config field 'sizes': empirical normalization covers n up to reference_factor/100 times "
                        "the smallest n; raise sizes.reference_factor");
    if (has(Task::BTable) && has(Task::TheoryConstants) && z.d_max < 8)
      throw ConfigError("config field 'sizes.d_max': estimating c needs d_max >= 8");
    if (need_theory) {
      log << "theory constants...\n";
      theory = theory_constants(model, z.mc_draws, derive_seed(seed, kTagTheory));
    }
    if (needs_sums && !theory.excluded) {
      if (std::abs(theory.alpha - 1.0) <= 0.1 && theory.c_plus != theory.c_minus)
        throw ConfigError("convergence: alpha = " + num(theory.alpha) +
                          " is near 1 with asymmetric Lévy constants; no verdict is issued for this case");
      centering = config.centering.value_or(auto_centering(theory.alpha));
      try {
        validate_centering(centering, theory.alpha, model);
      } catch (const std::invalid_argument& e) {
        throw ConfigError(std::string("config field 'centering': ") + e.what());
      }
    }
  } catch (const std::exception& e) {
    log << "error: " << e.what() << '\n';
    return kExitUsage;
  }

  const fs::path dir = out_dir.empty() ? fs::path(config.output) : fs::path(out_dir);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) {
    log << "error: cannot create output directory " << dir.string() << ": " << ec.message() << '\n';
    return kExitUsage;
  }

  std::ostringstream summary;
  std::vector<std::pair<std::string, bool>> verdicts;
  try {
    write_report(dir, "config.yaml", serialize_config(config), seed, hash);
    summary << "model: " << describe(model) << '\n';

    log << "normalization...\n";
    const Normalization norm = make_normalization(model, config.normalization, n_min, z.reference_factor,
                                                  derive_seed(seed, kTagNormalization));
    summary << "normalization: " << norm.describe() << '\n';
    summary << "a_n(" << z.n << "): " << num(norm.a_n(z.n)) << '\n';

    double mean_center = 0.0;
    if (need_theory && theory.alpha > 1.0) mean_center = stationary_mean(model, derive_seed(seed, kTagMean)).value;

    for (Task task : config.tasks) {
      log << to_string(task) << "...\n";
      switch (task) {
        case Task::TailProfile: {
          const Eigen::VectorXd path = generate(model, z.sample_size, derive_seed(seed, kTagTailProfile));
          const TailProfile tp = estimate_tail_profile(path, norm);
          std::ostringstream os;
          os << "sample_size: " << tp.sample_size << '\n'
             << "k: " << tp.k << '\n'
             << "alpha_hat: " << num(tp.alpha.alpha_hat) << '\n'
             << "alpha_se: " << num(tp.alpha.se) << '\n'
             << "p_hat: " << num(tp.p_hat) << '\n'
             << "q_hat: " << num(tp.q_hat) << '\n';
          write_report(dir, "tail_profile.txt", os.str(), seed, hash);
          summary << "estimated (alpha, p, q): (" << num(tp.alpha.alpha_hat) << ", " << num(tp.p_hat) << ", "
                  << num(tp.q_hat) << ")\nalpha_hat_se: " << num(tp.alpha.se) << '\n';
          break;
        }
        case Task::BTable: {
          BConfig bc;
          for (std::size_t d = 1; d <= z.d_max; ++d) bc.depths.push_back(d);
          bc.n = z.n;
          bc.x = z.x;
          bc.replicates = z.replicates;
          bc.seed = derive_seed(seed, kTagBTable);
          bc.alpha = theory.alpha;
          const BTable table = estimate_b_table(model, bc, norm);
          std::ostringstream csv;
          write_btable_csv(csv, table);
          write_report(dir, "btable.csv", csv.str(), seed, hash);
          summary << "b_table: n=" << table.n << " x=" << num(table.x) << " replicates=" << z.replicates
                  << " gap=" << table.gap << '\n';
          for (const BRow& r : table.rows)
            summary << "  d=" << r.d << " b_plus=" << num(r.b_plus) << " se=" << num(r.se_plus)
                    << " b_minus=" << num(r.b_minus) << " se=" << num(r.se_minus) << '\n';
          if (z.d_max >= 8) {
            const CEstimate c = estimate_c(table);
            summary << "empirical c_plus: " << num(c.c_plus) << " se " << num(c.se_plus) << '\n'
                    << "empirical c_minus: " << num(c.c_minus) << " se " << num(c.se_minus) << '\n'
                    << "increments converged: " << (c.converged ? "yes" : "no")
                    << ", noisy: " << (c.noisy ? "yes" : "no") << '\n';
          }
          if (has(Task::TheoryConstants)) {
            // Compare like with like: exact b(d)/d where it is known, else the limit c.
            const BRow& last = table.rows.back();
            const double dm = static_cast<double>(last.d);
            double tp = theory.c_plus, tm = theory.c_minus;
            if (const auto eb = exact_b(model, theory.alpha, last.d)) {
              tp = eb->first / dm;
              tm = eb->second / dm;
            }
            const double sp = std::hypot(last.se_plus / dm, theory.se_plus);
            const double sm = std::hypot(last.se_minus / dm, theory.se_minus);
            const bool ok =
                std::abs(last.b_plus / dm - tp) <= 3.0 * sp && std::abs(last.b_minus / dm - tm) <= 3.0 * sm;
            summary << "theory b(d_max)/d_max: (" << num(tp) << ", " << num(tm) << ")\n";
            verdicts.emplace_back("empirical c vs theory c within 3 se", ok);
          }
          break;
        }
        case Task::TheoryConstants: {
          std::ostringstream os;
          os << "method: " << theory.method << '\n'
             << "alpha: " << num(theory.alpha) << '\n'
             << "c_plus: " << num(theory.c_plus) << '\n'
             << "c_plus_se: " << num(theory.se_plus) << '\n'
             << "c_minus: " << num(theory.c_minus) << '\n'
             << "c_minus_se: " << num(theory.se_minus) << '\n'
             << "alpha_one_excluded: " << (theory.excluded ? "yes" : "no") << '\n'
             << theory.record;
          write_report(dir, "constants.txt", os.str(), seed, hash);
          summary << "theory (alpha, c_plus, c_minus): (" << num(theory.alpha) << ", " << num(theory.c_plus) << ", "
                  << num(theory.c_minus) << ")\ntheory se (c_plus, c_minus): (" << num(theory.se_plus) << ", "
                  << num(theory.se_minus) << ")\n";
          std::istringstream rec(theory.record);
          for (std::string line; std::getline(rec, line);)
            if (line.find("truncation") != std::string::npos) summary << "theory" << line << '\n';
          break;
        }
        case Task::Convergence: {
          if (theory.excluded) {
            summary << "convergence: alpha = " << num(theory.alpha)
                    << " is excluded for recurrence models (alpha = 1 case); no verdict\n";
            verdicts.emplace_back("convergence (alpha = 1 excluded)", false);
            break;
          }
          const SumExperiment exp{model, z.sum_n, z.sum_replicates, centering, theory.alpha};
          const PartialSums sums = partial_sum_sample(exp, norm, derive_seed(seed, kTagConvergence));
          const StableLimitParams params(theory.alpha, theory.c_plus, theory.c_minus);
          const ConvergenceReport rep = check_convergence(sums, params, derive_seed(seed, kTagConvergence));
          std::ostringstream os;
          os << "n: " << z.sum_n << '\n'
             << "replicates: " << z.sum_replicates << '\n'
             << "a_n: " << num(sums.a_n) << '\n'
             << "centering: " << to_string(centering) << '\n'
             << "centering_per_step: " << num(sums.centering_per_step) << '\n'
             << "centering_exact: " << (sums.centering_exact ? "yes" : "no") << '\n'
             << "cf_distance: " << num(rep.cf.distance) << '\n'
             << "cf_threshold: " << num(rep.cf.threshold) << '\n'
             << "ks_statistic: " << num(rep.ks.statistic) << '\n'
             << "ks_critical_value: " << num(rep.ks.critical_value) << '\n'
             << "abs_q99: " << num(rep.abs_q99) << '\n'
             << "verdict: " << rep.note << '\n';
          write_report(dir, "convergence.txt", os.str(), seed, hash);
          std::ostringstream csv;
          write_cf_csv(csv, rep.cf);
          write_report(dir, "convergence_cf.csv", csv.str(), seed, hash);
          summary << "convergence: " << rep.note << " (cf_distance " << num(rep.cf.distance) << " threshold "
                  << num(rep.cf.threshold) << ", ks " << num(rep.ks.statistic) << " critical "
                  << num(rep.ks.critical_value) << ", abs_q99 " << num(rep.abs_q99) << ")\n";
          verdicts.emplace_back("convergence", rep.verdict);
          break;
        }
        case Task::Diagnostics: {
          const std::vector<std::size_t> grid = z.m_grid.empty() ? default_m_grid(z.n) : z.m_grid;
          const std::size_t paths = std::max<std::size_t>(10, z.sum_replicates / 10);
          std::ostringstream ac;
          ac << "m,d,probability,se,anchors,hits,independent_reference\n";
          for (std::size_t m : grid) {
            for (std::size_t d = 1; d < m; d *= 2) {
              const AnticlusterResult r =
                  anticluster_diag(model, norm, d, m, z.x, z.n, paths, derive_seed(seed, kTagAnticluster));
              ac << m << ',' << d << ',' << num(r.probability) << ',' << num(r.se) << ',' << r.anchors << ','
                 << r.hits << ',' << num(r.independent_reference) << '\n';
            }
          }
          write_report(dir, "anticluster.csv", ac.str(), seed, hash);

          std::ostringstream mx;
          Eigen::VectorXd xs = default_cf_grid();
          for (std::size_t i = 0; i < grid.size(); ++i) {
            const MixingResult r =
                mixing_block_diag(model, norm, z.n, grid[i], xs, paths, derive_seed(seed, kTagMixing), mean_center);
            std::ostringstream part;
            write_mixing_csv(part, r);
            std::string text = part.str();
            if (i > 0) text = text.substr(text.find('\n') + 1);
            mx << text;
          }
          write_report(dir, "mixing.csv", mx.str(), seed, hash);

          const std::size_t m = grid[grid.size() / 2];
          const LevyTailResult lv =
              levy_tail_check(model, norm, m, z.n, {1.0, 2.0, 4.0}, z.replicates, derive_seed(seed, kTagLevy),
                              theory.alpha, theory.c_plus, theory.se_plus);
          std::ostringstream lc;
          write_levy_csv(lc, lv);
          write_report(dir, "levy_tail.csv", lc.str(), seed, hash);
          summary << "levy tail (m=" << m << "): " << (lv.pass ? "within 3 se" : "outside 3 se") << '\n';
          verdicts.emplace_back("levy tail", lv.pass);
          break;
        }
      }
    }
  } catch (const std::exception& e) {
    log << "error: " << e.what() << '\n';
    summary << "error: " << e.what() << '\n';
    verdicts.emplace_back("run completed", false);
  }

  bool all = true;
  for (const auto& [name, ok] : verdicts) {
    summary << "verdict " << name << ": " << (ok ? "PASS" : "FAIL") << '\n';
    all = all && ok;
  }
  summary << "overall: " << (all ? "PASS" : "FAIL") << '\n';
  try {
    write_report(dir, "summary.txt", summary.str(), seed, hash);
  } catch (const std::exception& e) {
    log << "error: " << e.what() << '\n';
    return kExitUsage;
  }
  log << "overall: " << (all ? "PASS" : "FAIL") << " (reports in " << dir.string() << ")\n";
  return all ? kExitPass : kExitVerdictFailure;
}

void list_models(std::ostream& os) {
  os << "iid: X_t = Y_t, iid regularly varying noise\n"
        "  params: noise\n"
        "differenced: X_t = Y_t - Y_{t-1}, degenerate stable limit\n"
        "  params: noise\n"
        "m_dependent: X_t = sum_j c_j Y_{t-j}, finite moving average\n"
        "  params: noise, coeffs\n"
        "SRE/Kesten: X_t = A_t X_{t-1} + B_t, stochastic recurrence with E A^alpha = 1\n"
        "  params: a (law), b (law); laws: constant{value}, lognormal{mu, sigma2}, scaled_square{scale, shift, noise}\n"
        "GARCH(1,1): sigma_t^2 = alpha0 + alpha1 X_{t-1}^2 + beta1 sigma_{t-1}^2, X_t = sigma_t Z_t\n"
        "  params: alpha0, alpha1, beta1, noise (normal or student_t), output (returns|squares)\n"
        "stochastic volatility: X_t = exp(h_t) Z_t, h_t causal Gaussian ARMA\n"
        "  params: ar, ma, vol_sd, noise\n"
        "sas moving average: X_t = sum_j c_j eps_{t-j}, eps symmetric alpha-stable\n"
        "  params: coeffs, alpha\n"
        "  noise choices for every family: pareto{alpha, p, q, scale}, student_t{dof}, normal, symmetrized_pareto{alpha, scale}\n";
}

}  // namespace stablim
