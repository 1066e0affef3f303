#include "stablim/models.hpp"

#include <algorithm>
#include <cstdio>
#include <cmath>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "stablim/stable.hpp"

namespace stablim {

namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

void require(bool ok, const std::string& message) {
  if (!ok) throw std::invalid_argument(message);
}

// Seed for the stationarity certificates; they are part of validation and
// must not depend on the experiment seed.
constexpr std::uint64_t kCertificateSeed = 0x5EEDC0DEull;
constexpr std::size_t kCertificateDraws = 100000;

double student_unit_factor(const NoiseSpec& noise) {
  if (const auto* t = std::get_if<StudentT>(&noise)) return std::sqrt((t->dof - 2.0) / t->dof);
  return 1.0;
}

std::string join(const std::vector<double>& v) {
  std::ostringstream os;
  os.precision(17);
  os << '[';
  for (std::size_t i = 0; i < v.size(); ++i) os << (i ? ", " : "") << v[i];
  os << ']';
  return os.str();
}

void require_heavy(const NoiseSpec& noise, const std::string& model) {
  validate(noise);
  const auto a = tail_index(noise);
  require(a.has_value() && *a > 0.0 && *a < 2.0, model + " needs heavy-tailed noise with tail index in (0,2)");
}

void require_nonzero(const std::vector<double>& c, const std::string& what) {
  require(!c.empty(), what + " must not be empty");
  require(std::any_of(c.begin(), c.end(), [](double x) { return x != 0.0; }), what + " must not be all zero");
  for (double x : c) require(std::isfinite(x), what + " must be finite");
}

void require_stationary(const PositiveLaw& a, const std::string& what) {
  if (const auto* c = std::get_if<ConstantLaw>(&a)) {
    require(c->value < 1.0, what + ": E log A < 0 fails for constant A >= 1");
    return;
  }
  if (const auto* l = std::get_if<LogNormalLaw>(&a)) {
    require(l->mu < 0.0, what + ": E log A = mu must be negative");
    return;
  }
  const auto [m, se] = mc_mean_log(a, kCertificateDraws, kCertificateSeed);
  require(m + 3.0 * se < 0.0, what + ": Monte Carlo E log A = " + std::to_string(m) +
                                  " (se " + std::to_string(se) + ") is not certifiably negative");
}

// Companion matrix whose eigenvalues are the reciprocals of the roots of
// 1 - c_1 z - ... - c_p z^p.
Eigen::MatrixXd companion(const std::vector<double>& c) {
  const auto p = static_cast<Eigen::Index>(c.size());
  Eigen::MatrixXd m = Eigen::MatrixXd::Zero(p, p);
  for (Eigen::Index j = 0; j < p; ++j) m(0, j) = c[static_cast<std::size_t>(j)];
  if (p > 1) m.bottomLeftCorner(p - 1, p - 1).setIdentity();
  return m;
}

}  // namespace

bool roots_outside_unit_disc(const std::vector<double>& c) {
  if (c.empty()) return true;
  Eigen::EigenSolver<Eigen::MatrixXd> es(companion(c), false);
  return es.eigenvalues().cwiseAbs().maxCoeff() < 1.0 - 1e-12;
}

double log_vol_variance(const StochVol& sv) {
  // Sum of squared psi weights of the causal ARMA representation.
  const std::size_t p = sv.ar.size();
  std::vector<double> psi{1.0};
  double total = 1.0;
  for (std::size_t j = 1; j < 100000; ++j) {
    double w = j <= sv.ma.size() ? sv.ma[j - 1] : 0.0;
    for (std::size_t i = 1; i <= std::min(p, j); ++i) w += sv.ar[i - 1] * psi[j - i];
    psi.push_back(w);
    total += w * w;
    if (j > sv.ma.size() + p && std::abs(w) < 1e-18) break;
  }
  return sv.vol_sd * sv.vol_sd * total;
}

std::pair<double, double> mc_mean_log(const PositiveLaw& a, std::size_t draws, std::uint64_t seed) {
  double sum = 0.0, sum2 = 0.0;
  for (std::size_t i = 0; i < draws; ++i) {
    IndexedStream rng(seed, streams::primary, i);
    const double v = std::log(draw(a, rng));
    if (!std::isfinite(v)) return {-std::numeric_limits<double>::infinity(), 0.0};
    sum += v;
    sum2 += v * v;
  }
  const double n = static_cast<double>(draws);
  const double m = sum / n;
  return {m, std::sqrt(std::max(0.0, sum2 / n - m * m) / n)};
}

double garch_noise_draw(const Garch11& g, IndexedStream& rng) { return student_unit_factor(g.noise) * draw(g.noise, rng); }

PositiveLaw garch_multiplier(const Garch11& g) {
  const double f = student_unit_factor(g.noise);
  return ScaledSquareLaw{g.alpha1 * f * f, g.beta1, g.noise};
}

void validate(const ModelSpec& spec) {
  std::visit(Overloaded{
                 [](const IidRV& m) { require_heavy(m.noise, "iid model"); },
                 [](const Differenced& m) { require_heavy(m.noise, "differenced model"); },
                 [](const MDependent& m) {
                   require_heavy(m.noise, "moving-average model");
                   require_nonzero(m.coeffs, "moving-average coeffs");
                 },
                 [](const Sre& m) {
                   validate(m.a);
                   validate(m.b);
                   require_stationary(m.a, "SRE stationarity");
                 },
                 [](const Garch11& m) {
                   require(m.alpha0 > 0.0 && std::isfinite(m.alpha0), "GARCH alpha0 must be > 0");
                   require(m.alpha1 >= 0.0 && std::isfinite(m.alpha1), "GARCH alpha1 must be >= 0");
                   require(m.beta1 >= 0.0 && m.beta1 < 1.0, "GARCH beta1 must lie in [0,1)");
                   validate(m.noise);
                   require(is_symmetric(m.noise), "GARCH noise must be symmetric");
                   const bool unit = std::holds_alternative<StandardNormal>(m.noise) ||
                                     (std::holds_alternative<StudentT>(m.noise) &&
                                      std::get<StudentT>(m.noise).dof > 2.0);
                   require(unit, "GARCH noise must be normal or Student-t with dof > 2 (unit variance)");
                   if (m.alpha1 == 0.0) return;
                   require_stationary(garch_multiplier(m), "GARCH stationarity E log(alpha1 Z^2 + beta1) < 0");
                 },
                 [](const StochVol& m) {
                   require_heavy(m.noise, "stochastic volatility model");
                   require(m.vol_sd >= 0.0 && std::isfinite(m.vol_sd), "log-volatility sd must be >= 0");
                   require(roots_outside_unit_disc(m.ar), "log-volatility AR part is not causal");
                   std::vector<double> neg(m.ma.size());
                   std::transform(m.ma.begin(), m.ma.end(), neg.begin(), [](double x) { return -x; });
                   require(roots_outside_unit_disc(neg), "log-volatility MA part is not invertible");
                 },
                 [](const SasMa& m) {
                   require(m.alpha > 0.0 && m.alpha < 2.0, "stable moving average needs alpha in (0,2)");
                   require_nonzero(m.coeffs, "stable moving-average coeffs");
                 },
             },
             spec.variant);
}

std::string model_name(const ModelSpec& spec) {
  static const char* names[] = {"iid", "differenced", "m_dependent", "sre", "garch11", "stoch_vol", "sas_ma"};
  return names[spec.variant.index()];
}

std::string describe(const ModelSpec& spec) {
  std::ostringstream os;
  os.precision(17);
  std::visit(Overloaded{
                 [&](const IidRV& m) { os << "iid " << describe(m.noise); },
                 [&](const Differenced& m) { os << "differenced " << describe(m.noise); },
                 [&](const MDependent& m) { os << "moving average " << join(m.coeffs) << " of " << describe(m.noise); },
                 [&](const Sre& m) { os << "SRE A=" << describe(m.a) << " B=" << describe(m.b); },
                 [&](const Garch11& m) {
                   os << "GARCH(1,1) alpha0=" << m.alpha0 << " alpha1=" << m.alpha1 << " beta1=" << m.beta1
                      << " noise=" << describe(m.noise)
                      << (m.output == GarchOutput::Squares ? " squares" : " returns");
                 },
                 [&](const StochVol& m) {
                   os << "stochastic volatility ar=" << join(m.ar) << " ma=" << join(m.ma) << " sd=" << m.vol_sd
                      << " noise=" << describe(m.noise);
                 },
                 [&](const SasMa& m) { os << "stable moving average " << join(m.coeffs) << " alpha=" << m.alpha; },
             },
             spec.variant);
  return os.str();
}

std::size_t effective_burn_in(const ModelSpec& spec) {
  const bool recursive = std::holds_alternative<Sre>(spec.variant) || std::holds_alternative<Garch11>(spec.variant) ||
                         std::holds_alternative<StochVol>(spec.variant);
  return recursive ? spec.burn_in : 0;
}

std::optional<std::size_t> independence_lag(const ModelSpec& spec) {
  return std::visit(Overloaded{
                        [](const IidRV&) -> std::optional<std::size_t> { return 0; },
                        [](const Differenced&) -> std::optional<std::size_t> { return 1; },
                        [](const MDependent& m) -> std::optional<std::size_t> { return m.coeffs.size() - 1; },
                        [](const SasMa& m) -> std::optional<std::size_t> { return m.coeffs.size() - 1; },
                        [](const auto&) -> std::optional<std::size_t> { return std::nullopt; },
                    },
                    spec.variant);
}

std::optional<double> model_mean(const ModelSpec& spec) {
  return std::visit(Overloaded{
                        [](const IidRV& m) { return mean(m.noise); },
                        [](const Differenced& m) -> std::optional<double> {
                          if (!mean(m.noise)) return std::nullopt;
                          return 0.0;
                        },
                        [](const MDependent& m) -> std::optional<double> {
                          const auto mu = mean(m.noise);
                          if (!mu) return std::nullopt;
                          double s = 0.0;
                          for (double c : m.coeffs) s += c;
                          return s * *mu;
                        },
                        [](const Sre& m) -> std::optional<double> {
                          const double ea = law_mean(m.a);
                          const double eb = law_mean(m.b);
                          if (!(ea < 1.0) || !std::isfinite(eb)) return std::nullopt;
                          return eb / (1.0 - ea);
                        },
                        [](const Garch11& m) -> std::optional<double> {
                          if (m.output == GarchOutput::Returns) return 0.0;
                          const double ea = m.alpha1 + m.beta1;
                          if (!(ea < 1.0)) return std::nullopt;
                          return m.alpha0 / (1.0 - ea);
                        },
                        [](const StochVol& m) -> std::optional<double> {
                          const auto mu = mean(m.noise);
                          if (!mu) return std::nullopt;
                          if (*mu == 0.0) return 0.0;
                          return std::exp(0.5 * log_vol_variance(m)) * *mu;
                        },
                        [](const SasMa& m) -> std::optional<double> {
                          if (m.alpha <= 1.0) return std::nullopt;
                          return 0.0;
                        },
                    },
                    spec.variant);
}

class Chain::Impl {
 public:
  virtual ~Impl() = default;
  virtual double next() = 0;
  virtual double volatility2() const { throw std::logic_error("volatility is only defined for GARCH chains"); }
};

namespace {

class IidChain final : public Chain::Impl {
 public:
  IidChain(NoiseSpec noise, std::uint64_t seed) : noise_(std::move(noise)), seed_(seed) {}
  double next() override {
    IndexedStream rng(seed_, streams::primary, t_++);
    return draw(noise_, rng);
  }

 private:
  NoiseSpec noise_;
  std::uint64_t seed_;
  std::uint64_t t_ = 0;
};

// Shared ring buffer for finite moving averages over an innovation source.
template <class Innovation>
class MovingAverageChain final : public Chain::Impl {
 public:
  MovingAverageChain(std::vector<double> coeffs, Innovation innovation, std::uint64_t seed)
      : coeffs_(std::move(coeffs)), innovation_(std::move(innovation)), seed_(seed), window_(coeffs_.size()) {
    for (std::size_t k = 0; k + 1 < coeffs_.size(); ++k) push();
  }
  double next() override {
    push();
    // window_[head_-1-j] holds Y_{t-j}.
    const std::size_t q = window_.size();
    double x = 0.0;
    for (std::size_t j = 0; j < q; ++j) x += coeffs_[j] * window_[(head_ + 2 * q - 1 - j) % q];
    return x;
  }

 private:
  void push() {
    IndexedStream rng(seed_, streams::primary, k_++);
    window_[head_] = innovation_(rng);
    head_ = (head_ + 1) % window_.size();
  }
  std::vector<double> coeffs_;
  Innovation innovation_;
  std::uint64_t seed_;
  std::vector<double> window_;
  std::size_t head_ = 0;
  std::uint64_t k_ = 0;
};

template <class Innovation>
std::unique_ptr<Chain::Impl> make_ma(std::vector<double> coeffs, Innovation f, std::uint64_t seed) {
  return std::make_unique<MovingAverageChain<Innovation>>(std::move(coeffs), std::move(f), seed);
}

class SreChain final : public Chain::Impl {
 public:
  SreChain(const Sre& m, std::uint64_t seed) : a_(m.a), b_(m.b), seed_(seed) {
    IndexedStream init(seed, streams::initial, 0);
    const double b1 = draw(b_, init);
    x_ = b1 / (1.0 - std::min(law_mean(a_), 0.99));
  }
  double next() override {
    IndexedStream rng(seed_, streams::primary, t_++);
    const double a = draw(a_, rng);
    const double b = draw(b_, rng);
    x_ = a * x_ + b;
    return x_;
  }

 private:
  PositiveLaw a_, b_;
  std::uint64_t seed_;
  std::uint64_t t_ = 0;
  double x_;
};

class GarchChain final : public Chain::Impl {
 public:
  GarchChain(const Garch11& g, std::uint64_t seed) : g_(g), seed_(seed) {
    IndexedStream init(seed, streams::initial, 0);
    z_ = garch_noise_draw(g_, init);
    sigma2_ = g_.alpha0 / (1.0 - std::min(g_.alpha1 + g_.beta1, 0.99));
  }
  double next() override {
    IndexedStream rng(seed_, streams::primary, t_++);
    sigma2_ = g_.alpha0 + (g_.alpha1 * z_ * z_ + g_.beta1) * sigma2_;
    z_ = garch_noise_draw(g_, rng);
    const double x = std::sqrt(sigma2_) * z_;
    return g_.output == GarchOutput::Squares ? x * x : x;
  }
  double volatility2() const override { return sigma2_; }

 private:
  Garch11 g_;
  std::uint64_t seed_;
  std::uint64_t t_ = 0;
  double z_;
  double sigma2_;
};

class SvChain final : public Chain::Impl {
 public:
  SvChain(const StochVol& m, std::uint64_t seed)
      : m_(m), seed_(seed), h_(m.ar.size(), 0.0), eta_(m.ma.size(), 0.0) {}
  double next() override {
    IndexedStream vol(seed_, streams::secondary, t_);
    IndexedStream noise(seed_, streams::primary, t_);
    ++t_;
    const double e = m_.vol_sd * vol.normal();
    double h = e;
    for (std::size_t i = 0; i < h_.size(); ++i) h += m_.ar[i] * h_[i];
    for (std::size_t j = 0; j < eta_.size(); ++j) h += m_.ma[j] * eta_[j];
    if (!h_.empty()) {
      std::rotate(h_.rbegin(), h_.rbegin() + 1, h_.rend());
      h_[0] = h;
    }
    if (!eta_.empty()) {
      std::rotate(eta_.rbegin(), eta_.rbegin() + 1, eta_.rend());
      eta_[0] = e;
    }
    return std::exp(h) * draw(m_.noise, noise);
  }

 private:
  StochVol m_;
  std::uint64_t seed_;
  std::uint64_t t_ = 0;
  std::vector<double> h_;    // h_{t-1}, h_{t-2}, ...
  std::vector<double> eta_;  // eta_{t-1}, eta_{t-2}, ...
};

std::unique_ptr<Chain::Impl> make_chain(const ModelSpec& spec, std::uint64_t seed) {
  return std::visit(
      Overloaded{
          [&](const IidRV& m) -> std::unique_ptr<Chain::Impl> { return std::make_unique<IidChain>(m.noise, seed); },
          [&](const Differenced& m) -> std::unique_ptr<Chain::Impl> {
            return make_ma({1.0, -1.0}, [n = m.noise](IndexedStream& r) { return draw(n, r); }, seed);
          },
          [&](const MDependent& m) -> std::unique_ptr<Chain::Impl> {
            return make_ma(m.coeffs, [n = m.noise](IndexedStream& r) { return draw(n, r); }, seed);
          },
          [&](const Sre& m) -> std::unique_ptr<Chain::Impl> { return std::make_unique<SreChain>(m, seed); },
          [&](const Garch11& m) -> std::unique_ptr<Chain::Impl> { return std::make_unique<GarchChain>(m, seed); },
          [&](const StochVol& m) -> std::unique_ptr<Chain::Impl> { return std::make_unique<SvChain>(m, seed); },
          [&](const SasMa& m) -> std::unique_ptr<Chain::Impl> {
            const StandardStableParams s = to_standard_params(StableLimitParams(m.alpha, 0.5, 0.5));
            return make_ma(m.coeffs, [s](IndexedStream& r) { return draw_standard_stable(s, r); }, seed);
          },
      },
      spec.variant);
}

}  // namespace

Chain::Chain(const ModelSpec& spec, std::uint64_t seed) : impl_(make_chain(spec, seed)) {
  skip(effective_burn_in(spec));
}
Chain::~Chain() = default;
Chain::Chain(Chain&&) noexcept = default;
Chain& Chain::operator=(Chain&&) noexcept = default;

double Chain::next() { return impl_->next(); }

void Chain::skip(std::size_t steps) {
  for (std::size_t i = 0; i < steps; ++i) impl_->next();
}

double Chain::volatility2() const { return impl_->volatility2(); }

Eigen::VectorXd generate(const ModelSpec& spec, std::size_t n, std::uint64_t seed) {
  validate(spec);
  Chain chain(spec, seed);
  Eigen::VectorXd out(static_cast<Eigen::Index>(n));
  for (Eigen::Index i = 0; i < out.size(); ++i) out[i] = chain.next();
  return out;
}

Eigen::VectorXd gen_iid_rv(const NoiseSpec& noise, std::size_t n, std::uint64_t seed) {
  return generate({IidRV{noise}, 0}, n, seed);
}

Eigen::VectorXd gen_differenced(const NoiseSpec& noise, std::size_t n, std::uint64_t seed) {
  return generate({Differenced{noise}, 0}, n, seed);
}

Eigen::VectorXd gen_m_dependent(const NoiseSpec& noise, const std::vector<double>& coeffs, std::size_t n,
                                std::uint64_t seed) {
  return generate({MDependent{noise, coeffs}, 0}, n, seed);
}

Eigen::VectorXd gen_sre(const PositiveLaw& a, const PositiveLaw& b, std::size_t n, std::size_t burn_in,
                        std::uint64_t seed) {
  return generate({Sre{a, b}, burn_in}, n, seed);
}

std::pair<Eigen::VectorXd, Eigen::VectorXd> gen_garch11(double alpha0, double alpha1, double beta1,
                                                        const NoiseSpec& noise, std::size_t n,
                                                        std::size_t burn_in, std::uint64_t seed) {
  const ModelSpec spec{Garch11{alpha0, alpha1, beta1, noise, GarchOutput::Returns}, burn_in};
  validate(spec);
  Chain chain(spec, seed);
  Eigen::VectorXd x(static_cast<Eigen::Index>(n)), s2(static_cast<Eigen::Index>(n));
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    x[i] = chain.next();
    s2[i] = chain.volatility2();
  }
  return {x, s2};
}

Eigen::VectorXd gen_sv(const std::vector<double>& ar, const std::vector<double>& ma, const NoiseSpec& noise,
                       std::size_t n, std::size_t burn_in, std::uint64_t seed) {
  return generate({StochVol{ar, ma, 1.0, noise}, burn_in}, n, seed);
}

Eigen::VectorXd gen_sas_ma(const std::vector<double>& coeffs, double alpha, std::size_t n, std::uint64_t seed) {
  return generate({SasMa{coeffs, alpha}, 0}, n, seed);
}

void write_path_csv(std::ostream& os, const Eigen::VectorXd& path, const std::string& model, std::uint64_t seed) {
  os << model << " seed=" << seed << '\n';
  char buf[32];
  for (Eigen::Index i = 0; i < path.size(); ++i) {
    std::snprintf(buf, sizeof buf, "%.17g", path[i]);
    os << buf << '\n';
  }
}

}  // namespace stablim
