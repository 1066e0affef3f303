#include "stablim/acceptance.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <optional>
#include <sstream>

#include "stablim/config.hpp"
#include "stablim/constants.hpp"
#include "stablim/parallel.hpp"
#include "stablim/runner.hpp"
#include "stablim/stable.hpp"
#include "stablim/stats.hpp"
#include "stablim/tail.hpp"
#include "stablim/verify.hpp"

namespace stablim {

namespace {

// One fixed seed per criterion.
constexpr std::uint64_t kBaseSeed = 20240601;
std::uint64_t seed_for(int id) { return derive_seed(kBaseSeed, static_cast<std::uint64_t>(id)); }

std::string fmt(double v, int digits = 4) {
  char buf[48];
  std::snprintf(buf, sizeof buf, "%.*g", digits, v);
  return buf;
}

struct Outcome {
  bool pass = true;
  std::ostringstream detail;
  void check(bool ok, const std::string& what) {
    pass = pass && ok;
    if (detail.tellp() > 0) detail << "; ";
    detail << what << (ok ? "" : " [miss]");
  }
};

bool within(double a, double b, double tol) { return std::abs(a - b) <= tol; }

// Sums shared by criteria 4 and 10.
struct IidBenchmark {
  ModelSpec model{IidRV{TwoSidedPareto{0.8, 0.7, 0.3}}};
  std::optional<Eigen::VectorXd> sums;

  const Eigen::VectorXd& normalized_sums() {
    if (!sums) {
      const auto norm = Normalization::closed_form(*closed_form_tail(model));
      const SumExperiment exp{model, 100000, 10000, Centering::None, 0.8};
      sums = partial_sum_sample(exp, norm, seed_for(4)).values;
    }
    return *sums;
  }
};

void criterion1(Outcome& o) {
  const double cases[4][3] = {{0.5, 1.0, 0.0}, {0.8, 0.5, 0.5}, {1.0, 0.5, 0.5}, {1.5, 1.0, 0.3}};
  for (int i = 0; i < 4; ++i) {
    const auto t0 = std::chrono::steady_clock::now();
    const StableLimitParams p(cases[i][0], cases[i][1], cases[i][2]);
    const Eigen::VectorXd x = sample_stable(p, 1000000, derive_seed(seed_for(1), i));
    const double d = cf_distance(x, p).distance;
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    o.check(d < 0.01 && secs < 10.0, "alpha=" + fmt(cases[i][0]) + " cf=" + fmt(d) + " (" + fmt(secs, 3) + "s)");
  }
}

void criterion2(Outcome& o) {
  constexpr std::size_t n = 10, reps = 100000;
  for (double alpha : {0.5, 1.5}) {
    const StableLimitParams p(alpha, 0.7, 0.3);
    const std::uint64_t seed = derive_seed(seed_for(2), static_cast<std::uint64_t>(alpha * 10));
    const Eigen::VectorXd draws = sample_stable(p, n * reps, seed);
    Eigen::VectorXd sums(reps);
    const double scale = std::pow(static_cast<double>(n), -1.0 / alpha);
    for (std::size_t r = 0; r < reps; ++r)
      sums[static_cast<Eigen::Index>(r)] = scale * draws.segment(static_cast<Eigen::Index>(r * n), n).sum();
    const KsResult ks = ks_distance(sums, p, reps, seed, 1e-3);
    o.check(ks.pass, "alpha=" + fmt(alpha) + " ks=" + fmt(ks.statistic) + " crit=" + fmt(ks.critical_value));
  }
}

void criterion3(Outcome& o) {
  const PositiveLaw lognormal = LogNormalLaw{-0.5, 1.0};
  const KestenResult mc = kesten_index(lognormal, 1000000, 1e-10, seed_for(3), KestenMethod::MonteCarlo);
  o.check(within(mc.alpha, 1.0, 1e-2), "lognormal MC alpha=" + fmt(mc.alpha, 8));
  const KestenResult cf = kesten_index(lognormal, 0, 1e-10, seed_for(3), KestenMethod::ClosedForm);
  o.check(within(cf.alpha, 1.0, 1e-10), "lognormal closed alpha=" + fmt(cf.alpha, 17));
  const PositiveLaw arch = ScaledSquareLaw{1.0, 0.0, StandardNormal{}};
  const KestenResult am = kesten_index(arch, 1000000, 1e-10, derive_seed(seed_for(3), 1), KestenMethod::MonteCarlo);
  o.check(within(am.alpha, 1.0, 1e-2), "ARCH(1) MC alpha=" + fmt(am.alpha, 8));
  const KestenResult ac = kesten_index(arch, 0, 1e-10, seed_for(3));
  o.check(within(ac.alpha, 1.0, 1e-2), "ARCH(1) closed alpha=" + fmt(ac.alpha, 12));
}

void criterion4(Outcome& o, IidBenchmark& bench) {
  const auto norm = Normalization::closed_form(*closed_form_tail(bench.model));
  BConfig bc;
  bc.depths = {1, 2, 4, 8};
  bc.seed = derive_seed(seed_for(4), 1);
  bc.alpha = 0.8;
  const BTable table = estimate_b_table(bench.model, bc, norm);
  for (const BRow& r : table.rows) {
    const double d = static_cast<double>(r.d);
    o.check(within(r.b_plus / d, 0.7, 3.0 * r.se_plus / d),
            "b+(" + std::to_string(r.d) + ")/d=" + fmt(r.b_plus / d) + "+-" + fmt(r.se_plus / d, 2));
  }
  const StableLimitParams p(0.8, 0.7, 0.3);
  const CfDistance cf = cf_distance(bench.normalized_sums(), p);
  o.check(cf.distance < 0.02, "cf=" + fmt(cf.distance) + " vs 0.02 (mc se " + fmt(cf.mc_se, 2) + ")");
}

void criterion5(Outcome& o) {
  const ModelSpec model{Differenced{TwoSidedPareto{0.8, 0.7, 0.3}}};
  const auto norm = Normalization::closed_form(*closed_form_tail(model));
  BConfig bc;
  bc.depths = {1, 4, 16};
  bc.seed = derive_seed(seed_for(5), 1);
  bc.alpha = 0.8;
  const BTable table = estimate_b_table(model, bc, norm);
  for (const BRow& r : table.rows)
    o.check(within(r.b_plus, 0.5, 3.0 * r.se_plus),
            "b+(" + std::to_string(r.d) + ")=" + fmt(r.b_plus) + "+-" + fmt(r.se_plus, 2));
  const SumExperiment exp{model, 100000, 10000, Centering::None, 0.8};
  const PartialSums sums = partial_sum_sample(exp, norm, derive_seed(seed_for(5), 2));
  const double q99 = quantile(sums.values.cwiseAbs(), 0.99);
  o.check(q99 < 0.05, "q99|S_n/a_n|=" + fmt(q99));
}

void criterion6(Outcome& o) {
  const double alpha = 0.8;
  const ModelSpec model{MDependent{TwoSidedPareto{alpha, 1.0, 0.0}, {1.0, 1.0}}};
  const auto norm = Normalization::closed_form(*closed_form_tail(model));
  BConfig bc;
  for (std::size_t d = 1; d <= 16; ++d) bc.depths.push_back(d);
  bc.seed = seed_for(6);
  bc.alpha = alpha;
  const BTable table = estimate_b_table(model, bc, norm);
  const CEstimate c = estimate_c(table);
  const double oracle = std::pow(2.0, alpha - 1.0);
  o.check(within(c.c_plus, oracle, 3.0 * c.se_plus),
          "c+=" + fmt(c.c_plus) + "+-" + fmt(c.se_plus, 2) + " oracle " + fmt(oracle));
  const BRow &b1 = table.at(1), &b2 = table.at(2), &b3 = table.at(3);
  const double lhs = b2.b_plus - b1.b_plus, rhs = b3.b_plus - b2.b_plus;
  const double se = std::sqrt(b1.se_plus * b1.se_plus + 4.0 * b2.se_plus * b2.se_plus + b3.se_plus * b3.se_plus);
  o.check(within(lhs, rhs, 3.0 * se), "increments " + fmt(lhs) + " vs " + fmt(rhs) + " (se " + fmt(se, 2) + ")");
}

void criterion7(Outcome& o) {
  const PositiveLaw a = LogNormalLaw{-0.5, 1.0};
  const ModelSpec model{Sre{a, ConstantLaw{1.0}}};
  const std::uint64_t seed = seed_for(7);
  const KestenResult k = kesten_index(a, 1000000, 1e-10, seed);
  const TInfinityEstimate theory = c_plus_sre(a, k.alpha, 1000000, 1e-6, derive_seed(seed, 1));
  constexpr std::size_t n = 100000;
  const Normalization norm = Normalization::empirical(model, n, derive_seed(seed, 2));
  BConfig bc;
  bc.depths = {16};
  bc.n = n;
  bc.replicates = 10000000;
  bc.seed = derive_seed(seed, 3);
  bc.alpha = k.alpha;
  const BRow row = estimate_b(model, 16, bc, norm);
  const double emp = row.b_plus / 16.0, emp_se = row.se_plus / 16.0;
  const double comb = std::hypot(emp_se, theory.se);
  o.check(within(emp, theory.mean_functional, 3.0 * comb),
          "c_plus_sre=" + fmt(theory.mean_functional) + " b+(16)/16=" + fmt(emp) + " (se " + fmt(comb, 2) + ")");
  const LevyTailResult lv = levy_tail_check(model, norm, 16, n, {1.0, 2.0, 4.0}, 10000000, derive_seed(seed, 4),
                                            k.alpha, theory.mean_functional, theory.se);
  std::string pts;
  for (const auto& p : lv.points) pts += " x=" + fmt(p.x) + ":" + fmt(p.empirical) + "/" + fmt(p.theory);
  o.check(lv.pass, "levy" + pts);
}

void criterion8(Outcome& o) {
  const std::uint64_t seed = seed_for(8);
  const Garch11 g{1.0, 0.5, 0.3, StandardNormal{}, GarchOutput::Squares};
  const ModelSpec model{g};
  validate(model);
  const KestenResult k = kesten_index(garch_multiplier(g), 1000000, 1e-10, seed);
  const bool away = k.alpha < 0.95 || k.alpha > 1.05;
  o.check(away, "alpha=" + fmt(k.alpha, 6) + " outside [0.95,1.05]");
  if (!away) return;
  const TInfinityEstimate theory =
      c_plus_garch_sq(g.alpha0, g.alpha1, g.beta1, g.noise, k.alpha, 1000000, 1e-6, derive_seed(seed, 1));
  const Normalization norm = Normalization::empirical(model, 10000, derive_seed(seed, 2));
  BConfig bc;
  for (std::size_t d = 1; d <= 16; ++d) bc.depths.push_back(d);
  bc.seed = derive_seed(seed, 4);
  bc.alpha = k.alpha;
  const BTable table = estimate_b_table(model, bc, norm);
  const CEstimate c = estimate_c(table);
  const double comb = std::hypot(c.se_plus, theory.se);
  o.check(within(c.c_plus, theory.mean_functional, 3.0 * comb),
          "theory c+=" + fmt(theory.mean_functional) + " empirical c+=" + fmt(c.c_plus) + " (se " + fmt(comb, 2) + ")");
  constexpr std::size_t sum_n = 100000;
  const Normalization sum_norm = Normalization::empirical(model, sum_n, derive_seed(seed, 3));
  const SumExperiment exp{model, sum_n, 10000, Centering::Mean, k.alpha};
  const PartialSums sums = partial_sum_sample(exp, sum_norm, derive_seed(seed, 5));
  const ConvergenceReport rep =
      check_convergence(sums, StableLimitParams(k.alpha, theory.mean_functional, 0.0), derive_seed(seed, 6));
  o.check(rep.verdict, "convergence cf=" + fmt(rep.cf.distance) + "/" + fmt(rep.cf.threshold) +
                           " ks=" + fmt(rep.ks.statistic) + "/" + fmt(rep.ks.critical_value));
}

void criterion9(Outcome& o) {
  const double alpha = 1.2;
  const std::vector<double> coeffs{1.0, 1.0};
  const ModelSpec model{SasMa{coeffs, alpha}};
  const auto norm = Normalization::closed_form(*closed_form_tail(model));
  BConfig bc;
  bc.depths = {1, 2, 4};
  bc.seed = seed_for(9);
  bc.alpha = alpha;
  const BTable table = estimate_b_table(model, bc, norm);
  for (const BRow& r : table.rows) {
    const double exact = b_plus_sas(coeffs, alpha, static_cast<double>(r.d));
    const double est = r.b_plus + r.b_minus;
    const double se = std::hypot(r.se_plus, r.se_minus);
    o.check(within(est, exact, 3.0 * se),
            "d=" + std::to_string(r.d) + " exact " + fmt(exact) + " est " + fmt(est) + "+-" + fmt(se, 2));
  }
  constexpr std::size_t n = 10, reps = 100000;
  const SumExperiment exp{model, n, reps, Centering::None, alpha};
  const PartialSums sums = partial_sum_sample(exp, norm, derive_seed(seed_for(9), 1));
  double mass = 0.0;
  for (double s : window_sums(coeffs, n)) mass += std::pow(std::abs(s), alpha);
  const double c = 0.5 * mass / std::pow(sums.a_n, alpha);
  const KsResult ks = ks_distance(sums.values, StableLimitParams(alpha, c, c), reps, derive_seed(seed_for(9), 2));
  o.check(ks.pass, "ks=" + fmt(ks.statistic) + " crit=" + fmt(ks.critical_value));
}

void criterion10(Outcome& o, IidBenchmark& bench) {
  const Eigen::VectorXd& sums = bench.normalized_sums();
  const CfDistance shifted = cf_distance(sums, StableLimitParams(1.1, 0.7, 0.3));
  o.check(!shifted.pass, "alpha 1.1 cf=" + fmt(shifted.distance) + " threshold " + fmt(shifted.threshold));
  const CfDistance swapped = cf_distance(sums, StableLimitParams(0.8, 0.3, 0.7));
  o.check(!swapped.pass, "swapped cf=" + fmt(swapped.distance) + " threshold " + fmt(swapped.threshold));
}

std::map<std::string, std::string> read_tree(const std::filesystem::path& dir) {
  std::map<std::string, std::string> files;
  for (const auto& e : std::filesystem::directory_iterator(dir)) {
    std::ifstream in(e.path(), std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    files[e.path().filename().string()] = ss.str();
  }
  return files;
}

// Splits text into tokens, flagging those that parse fully as numbers.
std::vector<std::string> tokens(const std::string& text) {
  std::vector<std::string> out;
  std::string cur;
  for (char ch : text) {
    if (ch == ',' || ch == ' ' || ch == '\n' || ch == '(' || ch == ')' || ch == '=' || ch == ':' || ch == '/') {
      if (!cur.empty()) out.push_back(cur);
      cur.clear();
    } else {
      cur += ch;
    }
  }
  if (!cur.empty()) out.push_back(cur);
  return out;
}

// Integers must agree exactly, reals within 1e-10 relative, text exactly.
bool numerically_equal(const std::string& a, const std::string& b, std::string& why) {
  const auto ta = tokens(a), tb = tokens(b);
  if (ta.size() != tb.size()) {
    why = "token count differs";
    return false;
  }
  for (std::size_t i = 0; i < ta.size(); ++i) {
    if (ta[i] == tb[i]) continue;
    char* ea = nullptr;
    char* eb = nullptr;
    const double va = std::strtod(ta[i].c_str(), &ea);
    const double vb = std::strtod(tb[i].c_str(), &eb);
    const bool real = *ea == '\0' && *eb == '\0' && ta[i].find_first_of(".eEn") != std::string::npos;
    if (!real || std::abs(va - vb) > 1e-10 * std::max(std::abs(va), std::abs(vb))) {
      why = "'" + ta[i] + "' vs '" + tb[i] + "'";
      return false;
    }
  }
  return true;
}

void criterion11(Outcome& o) {
  namespace fs = std::filesystem;
  ExperimentConfig cfg;
  cfg.seed = 1234567;
  cfg.model = ModelSpec{Garch11{1.0, 0.5, 0.3, StandardNormal{}, GarchOutput::Squares}, 2000};
  cfg.tasks = all_tasks();
  cfg.sizes.n = 1000;
  cfg.sizes.replicates = 20000;
  cfg.sizes.d_max = 8;
  cfg.sizes.sum_n = 2000;
  cfg.sizes.sum_replicates = 500;
  cfg.sizes.sample_size = 20000;
  cfg.sizes.mc_draws = 20000;
  const fs::path root = fs::temp_directory_path() / ("stablim_repro_" + std::to_string(cfg.seed));
  fs::remove_all(root);
  const std::size_t saved = thread_count();
  std::ostringstream log;
  auto run = [&](const std::string& name, std::size_t threads) {
    set_thread_count(threads);
    run_config(cfg, (root / name).string(), log);
    return read_tree(root / name);
  };
  const auto first = run("a", saved);
  const auto second = run("b", saved);
  const auto one = run("t1", 1);
  const auto eight = run("t8", 8);
  set_thread_count(saved);
  fs::remove_all(root);

  o.check(first.size() >= 8 && first == second, std::to_string(first.size()) + " reports byte-identical across runs");
  bool ok = one.size() == eight.size();
  std::string why = ok ? "" : "file sets differ";
  for (const auto& [name, text] : one) {
    if (!ok) break;
    const auto it = eight.find(name);
    ok = it != eight.end() && numerically_equal(text, it->second, why);
    if (!ok) why = name + ": " + why;
  }
  o.check(ok, "threads 1 vs 8 agree" + (why.empty() ? std::string() : " (" + why + ")"));
}

}  // namespace

std::vector<CriterionResult> run_acceptance(std::ostream& os, const std::vector<int>& which) {
  IidBenchmark bench;
  const std::vector<std::pair<int, std::function<void(Outcome&)>>> all{
      {1, criterion1},
      {2, criterion2},
      {3, criterion3},
      {4, [&](Outcome& o) { criterion4(o, bench); }},
      {5, criterion5},
      {6, criterion6},
      {7, criterion7},
      {8, criterion8},
      {9, criterion9},
      {10, [&](Outcome& o) { criterion10(o, bench); }},
      {11, criterion11},
  };
  // Wall-clock budgets in seconds; criterion 1 checks its own per-case budget.
  const std::map<int, double> budget{{1, 40.0}, {2, 30.0}, {3, 20.0}, {4, 300.0}, {5, 120.0}, {6, 180.0},
                                     {7, 300.0}, {8, 600.0}, {9, 120.0}, {10, 120.0}};
  std::vector<CriterionResult> results;
  for (const auto& [id, fn] : all) {
    if (!which.empty() && std::find(which.begin(), which.end(), id) == which.end()) continue;
    Outcome o;
    const auto t0 = std::chrono::steady_clock::now();
    try {
      fn(o);
    } catch (const std::exception& e) {
      o.check(false, std::string("error: ") + e.what());
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (const auto b = budget.find(id); b != budget.end())
      o.check(secs < b->second, "runtime " + fmt(secs, 3) + "s < " + fmt(b->second, 3) + "s");
    results.push_back({id, o.pass, secs, o.detail.str()});
    os << (o.pass ? "PASS" : "FAIL") << " criterion " << id << ": " << o.detail.str() << '\n' << std::flush;
  }
  return results;
}

}  // namespace stablim
