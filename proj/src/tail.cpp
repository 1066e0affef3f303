#include "stablim/tail.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <queue>
#include <sstream>
#include <stdexcept>

#include "stablim/parallel.hpp"

namespace stablim {

namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

double abs_power_sum(const std::vector<double>& c, double alpha) {
  double s = 0.0;
  for (double v : c) s += std::pow(std::abs(v), alpha);
  return s;
}

}  // namespace

std::optional<PowerTail> closed_form_tail(const ModelSpec& spec) {
  return std::visit(
      Overloaded{
          [](const IidRV& m) -> std::optional<PowerTail> {
            const auto a = tail_index(m.noise);
            const auto c = tail_constant(m.noise);
            if (!a || !c) return std::nullopt;
            return PowerTail{*a, *c};
          },
          [](const Differenced& m) -> std::optional<PowerTail> {
            const auto a = tail_index(m.noise);
            const auto c = tail_constant(m.noise);
            if (!a || !c) return std::nullopt;
            return PowerTail{*a, 2.0 * *c};
          },
          [](const MDependent& m) -> std::optional<PowerTail> {
            const auto a = tail_index(m.noise);
            const auto c = tail_constant(m.noise);
            if (!a || !c) return std::nullopt;
            return PowerTail{*a, *c * abs_power_sum(m.coeffs, *a)};
          },
          [](const StochVol& m) -> std::optional<PowerTail> {
            const auto a = tail_index(m.noise);
            const auto c = tail_constant(m.noise);
            if (!a || !c) return std::nullopt;
            // E sigma^alpha for the lognormal volatility.
            return PowerTail{*a, *c * std::exp(0.5 * *a * *a * log_vol_variance(m))};
          },
          [](const SasMa& m) -> std::optional<PowerTail> {
            return PowerTail{m.alpha, abs_power_sum(m.coeffs, m.alpha)};
          },
          [](const auto&) -> std::optional<PowerTail> { return std::nullopt; },
      },
      spec.variant);
}

Normalization Normalization::closed_form(PowerTail tail) {
  if (!(tail.alpha > 0.0) || !(tail.constant > 0.0))
    throw std::invalid_argument("closed-form normalization needs alpha > 0 and a positive tail constant");
  Normalization n;
  n.tail_ = tail;
  return n;
}

Normalization Normalization::empirical(const ModelSpec& spec, std::size_t n_min, std::uint64_t seed,
                                       std::size_t factor) {
  if (n_min < 2) throw std::invalid_argument("normalization needs n >= 2");
  if (factor < kMinimumReferenceFactor)
    throw std::invalid_argument("insufficient reference sample: need at least 100 n draws");
  const std::size_t total = factor * n_min;
  const std::size_t keep = factor + 1;
  std::vector<std::vector<double>> tops(kChains);
  parallel_for(kChains, [&](std::size_t k) {
    const Range r = chunk_range(total, kChains, k);
    Chain chain(spec, derive_seed(seed, k));
    std::priority_queue<double, std::vector<double>, std::greater<>> heap;
    for (std::size_t i = r.begin; i < r.end; ++i) {
      const double v = std::abs(chain.next());
      if (heap.size() < keep) {
        heap.push(v);
      } else if (v > heap.top()) {
        heap.pop();
        heap.push(v);
      }
    }
    auto& out = tops[k];
    while (!heap.empty()) {
      out.push_back(heap.top());
      heap.pop();
    }
  });
  std::vector<std::pair<double, std::uint16_t>> merged;
  for (std::size_t k = 0; k < kChains; ++k)
    for (double v : tops[k]) merged.emplace_back(v, static_cast<std::uint16_t>(k));
  std::sort(merged.begin(), merged.end(), [](const auto& a, const auto& b) {
    return a.first != b.first ? a.first > b.first : a.second < b.second;
  });
  merged.resize(std::min(merged.size(), keep));
  Normalization n;
  n.reference_size_ = total;
  n.n_min_ = n_min;
  for (const auto& [v, k] : merged) {
    n.top_.push_back(v);
    n.top_chain_.push_back(k);
  }
  return n;
}

std::size_t Normalization::exceedances(std::size_t n) const {
  if (n < n_min_ || reference_size_ / n < kMinimumReferenceFactor)
    throw std::invalid_argument("insufficient reference sample for n = " + std::to_string(n));
  return reference_size_ / n;
}

double Normalization::a_n(std::size_t n) const {
  if (n < 2) throw std::invalid_argument("normalization needs n >= 2");
  if (tail_) return std::pow(tail_->constant * static_cast<double>(n), 1.0 / tail_->alpha);
  return top_.at(exceedances(n));
}

double Normalization::relative_se(std::size_t n) const {
  if (tail_) return 0.0;
  // Relative se of the exceedance frequency at a_n. Extremes of dependent
  // sequences arrive in clusters, so the count is overdispersed.
  const std::size_t k = exceedances(n);
  std::vector<std::uint64_t> hits(kChains, 0), trials(kChains, 0);
  for (std::size_t i = 0; i < k; ++i) ++hits[top_chain_[i]];
  for (std::size_t c = 0; c < kChains; ++c) {
    const Range r = chunk_range(reference_size_, kChains, c);
    trials[c] = r.end - r.begin;
  }
  const double f = static_cast<double>(k) / static_cast<double>(reference_size_);
  return clustered_fraction_se(hits, trials) / f;
}

double clustered_fraction_se(const std::vector<std::uint64_t>& hits, const std::vector<std::uint64_t>& trials) {
  if (hits.size() != trials.size() || hits.size() < 2)
    throw std::invalid_argument("clustered se needs matching per-chain counts from at least two chains");
  double h = 0.0, t = 0.0;
  for (std::size_t c = 0; c < hits.size(); ++c) {
    h += static_cast<double>(hits[c]);
    t += static_cast<double>(trials[c]);
  }
  if (!(t > 0.0)) throw std::invalid_argument("clustered se needs trials");
  const double f = h / t;
  double ss = 0.0;
  for (std::size_t c = 0; c < hits.size(); ++c) {
    const double e = static_cast<double>(hits[c]) - f * static_cast<double>(trials[c]);
    ss += e * e;
  }
  const double chains = static_cast<double>(hits.size());
  const double batch = std::sqrt(ss * chains / (chains - 1.0)) / t;
  return std::max(batch, std::sqrt(f * (1.0 - f) / t));
}

std::string Normalization::describe() const {
  std::ostringstream os;
  os.precision(17);
  if (tail_)
    os << "closed form (" << tail_->constant << " n)^(1/" << tail_->alpha << ")";
  else
    os << "empirical quantile over " << reference_size_ << " stationary draws";
  return os.str();
}

double select_a_n(const ModelSpec& spec, std::size_t n) {
  const auto tail = closed_form_tail(spec);
  if (!tail) throw std::invalid_argument("model " + model_name(spec) + " has no closed-form tail");
  return Normalization::closed_form(*tail).a_n(n);
}

double select_a_n(const Normalization& norm, std::size_t n) { return norm.a_n(n); }

double select_a_n(const TailProfile& profile, std::size_t n) { return profile.a_fn.a_n(n); }

HillEstimate hill_alpha(const Eigen::Ref<const Eigen::VectorXd>& sample, std::size_t k) {
  const auto size = static_cast<std::size_t>(sample.size());
  if (k == 0 || k >= size) throw std::invalid_argument("Hill estimator needs 0 < k < sample size");
  std::vector<double> a(size);
  for (std::size_t i = 0; i < size; ++i) a[i] = std::abs(sample[static_cast<Eigen::Index>(i)]);
  std::nth_element(a.begin(), a.begin() + static_cast<std::ptrdiff_t>(k), a.end(), std::greater<>());
  const double threshold = a[k];
  if (!(threshold > 0.0)) throw std::invalid_argument("Hill estimator needs k+1 positive order statistics");
  double h = 0.0;
  for (std::size_t i = 0; i < k; ++i) h += std::log(a[i] / threshold);
  h /= static_cast<double>(k);
  if (!(h > 0.0)) throw std::invalid_argument("Hill estimator: degenerate top order statistics");
  const double alpha = 1.0 / h;
  return {alpha, alpha / std::sqrt(static_cast<double>(k))};
}

TailProfile estimate_tail_profile(const Eigen::Ref<const Eigen::VectorXd>& sample, Normalization a_fn) {
  const auto size = static_cast<std::size_t>(sample.size());
  const auto k = static_cast<std::size_t>(std::pow(static_cast<double>(size), 2.0 / 3.0));
  const HillEstimate hill = hill_alpha(sample, k);
  std::vector<double> a(size);
  for (std::size_t i = 0; i < size; ++i) a[i] = std::abs(sample[static_cast<Eigen::Index>(i)]);
  std::nth_element(a.begin(), a.begin() + static_cast<std::ptrdiff_t>(k), a.end(), std::greater<>());
  const double u = a[k];
  std::size_t up = 0, total = 0;
  for (Eigen::Index i = 0; i < sample.size(); ++i) {
    if (std::abs(sample[i]) > u) {
      ++total;
      if (sample[i] > 0.0) ++up;
    }
  }
  const double p = static_cast<double>(up) / static_cast<double>(total);
  return {hill, p, 1.0 - p, k, size, std::move(a_fn)};
}

const BRow& BTable::at(std::size_t d) const {
  for (const auto& r : rows)
    if (r.d == d) return r;
  throw std::out_of_range("no b-table row at d = " + std::to_string(d));
}

BTable estimate_b_table(const ModelSpec& spec, const BConfig& cfg, const Normalization& norm) {
  if (cfg.depths.empty()) throw std::invalid_argument("b-table needs at least one depth");
  if (cfg.replicates == 0) throw std::invalid_argument("b-table needs replicates > 0");
  std::vector<std::size_t> depths = cfg.depths;
  std::sort(depths.begin(), depths.end());
  depths.erase(std::unique(depths.begin(), depths.end()), depths.end());
  if (depths.front() == 0) throw std::invalid_argument("depth must be >= 1");
  const std::size_t d_max = depths.back();
  const std::size_t gap = independence_lag(spec).value_or(d_max);
  const double a_n = norm.a_n(cfg.n);
  const double u = cfg.x * a_n;

  std::vector<char> is_depth(d_max + 1, 0);
  for (std::size_t d : depths) is_depth[d] = 1;
  std::vector<std::size_t> slot(d_max + 1, 0);
  for (std::size_t i = 0; i < depths.size(); ++i) slot[depths[i]] = i;

  std::vector<std::vector<std::uint64_t>> plus(kChains), minus(kChains);
  parallel_for(kChains, [&](std::size_t k) {
    const Range r = chunk_range(cfg.replicates, kChains, k);
    auto& cp = plus[k];
    auto& cm = minus[k];
    cp.assign(depths.size(), 0);
    cm.assign(depths.size(), 0);
    if (r.begin == r.end) return;
    Chain chain(spec, derive_seed(cfg.seed, k));
    for (std::size_t b = r.begin; b < r.end; ++b) {
      double s = 0.0;
      for (std::size_t d = 1; d <= d_max; ++d) {
        s += chain.next();
        if (is_depth[d]) {
          if (s > u) ++cp[slot[d]];
          if (s < -u) ++cm[slot[d]];
        }
      }
      chain.skip(gap);
    }
  });

  BTable table{{}, cfg.n, cfg.x, cfg.alpha, a_n, gap};
  const double R = static_cast<double>(cfg.replicates);
  const double scale = static_cast<double>(cfg.n) * std::pow(cfg.x, cfg.alpha);
  const double rel_norm = norm.relative_se(cfg.n);
  // Blocks spaced beyond the independence lag are independent trials;
  // otherwise the count se comes from batch means over the chains.
  const bool independent_blocks = independence_lag(spec).has_value();
  std::vector<std::uint64_t> trials(kChains);
  for (std::size_t k = 0; k < kChains; ++k) {
    const Range r = chunk_range(cfg.replicates, kChains, k);
    trials[k] = r.end - r.begin;
  }
  for (std::size_t i = 0; i < depths.size(); ++i) {
    std::vector<std::uint64_t> hp(kChains), hm(kChains);
    std::uint64_t np = 0, nm = 0;
    for (std::size_t k = 0; k < kChains; ++k) {
      hp[k] = plus[k][i];
      hm[k] = minus[k][i];
      np += hp[k];
      nm += hm[k];
    }
    auto side = [&](std::uint64_t count, const std::vector<std::uint64_t>& per_chain, double& b, double& se) {
      const double f = static_cast<double>(count) / R;
      b = scale * f;
      double count_se;
      if (count == 0)
        count_se = scale * 3.0 / R;  // one-sided 95% bound
      else if (independent_blocks)
        count_se = scale * std::sqrt(f * (1.0 - f) / R);
      else
        count_se = scale * clustered_fraction_se(per_chain, trials);
      se = std::hypot(count_se, b * rel_norm);
    };
    BRow row{depths[i], 0, 0, 0, 0, np, nm, cfg.replicates};
    side(np, hp, row.b_plus, row.se_plus);
    side(nm, hm, row.b_minus, row.se_minus);
    table.rows.push_back(row);
  }
  return table;
}

BRow estimate_b(const ModelSpec& spec, std::size_t d, const BConfig& config, const Normalization& norm) {
  BConfig c = config;
  c.depths = {d};
  return estimate_b_table(spec, c, norm).rows.front();
}

CEstimate estimate_c(const BTable& table) {
  if (table.rows.empty()) throw std::invalid_argument("empty b-table");
  const BRow& last = table.rows.back();
  if (last.d < 8) throw std::invalid_argument("c estimate needs a b-table reaching d >= 8");
  const double dm = static_cast<double>(last.d);
  CEstimate c{last.b_plus / dm, last.b_minus / dm, last.se_plus / dm, last.se_minus / dm, last.d, {}, false, false};
  for (std::size_t i = 1; i < table.rows.size(); ++i) {
    const BRow& r = table.rows[i];
    const BRow& prev = table.rows[i - 1];
    if (r.d != prev.d + 1) continue;
    c.differences.push_back({r.d, r.b_plus - prev.b_plus, std::hypot(r.se_plus, prev.se_plus)});
  }
  for (const auto& d : c.differences)
    if (d.value < -3.0 * d.se) c.noisy = true;
  if (c.differences.size() >= 3) {
    const auto tail = std::vector<Difference>(c.differences.end() - 3, c.differences.end());
    double lo = tail[0].value, hi = tail[0].value, se = 0.0;
    for (const auto& d : tail) {
      lo = std::min(lo, d.value);
      hi = std::max(hi, d.value);
      se = std::max(se, d.se);
    }
    c.converged = hi - lo <= 2.0 * se;
  }
  return c;
}

void write_btable_csv(std::ostream& os, const BTable& table) {
  os << "d,b_plus,b_minus,se,replicates\n";
  char buf[160];
  for (const auto& r : table.rows) {
    std::snprintf(buf, sizeof buf, "%zu,%.17g,%.17g,%.17g,%llu\n", r.d, r.b_plus, r.b_minus,
                  std::max(r.se_plus, r.se_minus), static_cast<unsigned long long>(r.replicates));
    os << buf;
  }
}

}  // namespace stablim
