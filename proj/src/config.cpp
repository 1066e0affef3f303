#include "stablim/config.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include <yaml-cpp/yaml.h>

namespace stablim {

namespace {

template <class... Ts>
struct Overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
Overloaded(Ts...) -> Overloaded<Ts...>;

std::string where(const YAML::Node& node) {
  const YAML::Mark m = node.Mark();
  if (m.is_null()) return "";
  return " (line " + std::to_string(m.line + 1) + ", column " + std::to_string(m.column + 1) + ")";
}

[[noreturn]] void fail(const std::string& field, const YAML::Node& node, const std::string& what) {
  throw ConfigError("config field '" + field + "'" + where(node) + ": " + what);
}

// Reads one mapping and rejects keys it does not know about.
class MapReader {
 public:
  MapReader(const YAML::Node& node, std::string path, std::set<std::string> known)
      : node_(node), path_(std::move(path)) {
    if (!node_.IsMap()) fail(path_, node_, "expected a mapping");
    for (const auto& kv : node_) {
      const auto key = kv.first.as<std::string>();
      if (!known.count(key)) fail(field(key), kv.first, "unknown key");
    }
  }

  std::string field(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }
  bool has(const std::string& key) const { return static_cast<bool>(node_[key]); }

  YAML::Node get(const std::string& key) const {
    const YAML::Node n = node_[key];
    if (!n) fail(field(key), node_, "missing required key");
    return n;
  }

  double real(const std::string& key) const {
    const YAML::Node n = get(key);
    double v = 0.0;
    if (!n.IsScalar() || !YAML::convert<double>::decode(n, v) || !std::isfinite(v))
      fail(field(key), n, "expected a finite number");
    return v;
  }
  double real(const std::string& key, double fallback) const { return has(key) ? real(key) : fallback; }

  std::uint64_t count(const std::string& key) const { return to_count(field(key), get(key)); }
  std::uint64_t count(const std::string& key, std::uint64_t fallback) const {
    return has(key) ? count(key) : fallback;
  }

  std::string text(const std::string& key) const {
    const YAML::Node n = get(key);
    if (!n.IsScalar()) fail(field(key), n, "expected a string");
    return n.Scalar();
  }

  std::vector<double> reals(const std::string& key) const {
    const YAML::Node n = get(key);
    if (!n.IsSequence()) fail(field(key), n, "expected a list of numbers");
    std::vector<double> out;
    for (std::size_t i = 0; i < n.size(); ++i) {
      double v = 0.0;
      if (!n[i].IsScalar() || !YAML::convert<double>::decode(n[i], v) || !std::isfinite(v))
        fail(field(key) + "[" + std::to_string(i) + "]", n[i], "expected a finite number");
      out.push_back(v);
    }
    return out;
  }

  static std::uint64_t to_count(const std::string& field, const YAML::Node& n) {
    if (!n.IsScalar()) fail(field, n, "expected a non-negative integer");
    std::uint64_t v = 0;
    if (n.Scalar().find_first_of("-+") != 0 && YAML::convert<std::uint64_t>::decode(n, v)) return v;
    // Integers written in scientific notation, e.g. 1e6.
    double d = 0.0;
    if (YAML::convert<double>::decode(n, d) && d >= 0.0 && d <= 9007199254740992.0 && d == std::floor(d))
      return static_cast<std::uint64_t>(d);
    fail(field, n, "expected a non-negative integer");
  }

  const YAML::Node& node() const { return node_; }

 private:
  YAML::Node node_;
  std::string path_;
};

NoiseSpec parse_noise(const YAML::Node& node, const std::string& path) {
  if (!node.IsMap() || !node["type"]) fail(path + ".type", node, "noise needs a 'type'");
  const std::string type = node["type"].as<std::string>();
  if (type == "pareto") {
    MapReader r(node, path, {"type", "alpha", "p", "q", "scale"});
    return TwoSidedPareto{r.real("alpha"), r.real("p"), r.real("q"), r.real("scale", 1.0)};
  }
  if (type == "student_t") {
    MapReader r(node, path, {"type", "dof"});
    return StudentT{r.real("dof")};
  }
  if (type == "normal") {
    MapReader r(node, path, {"type"});
    return StandardNormal{};
  }
  if (type == "symmetrized_pareto") {
    MapReader r(node, path, {"type", "alpha", "scale"});
    return SymmetrizedPareto{r.real("alpha"), r.real("scale", 1.0)};
  }
  fail(path + ".type", node["type"], "unknown noise type '" + type +
                                         "' (pareto, student_t, normal, symmetrized_pareto)");
}

PositiveLaw parse_law(const YAML::Node& node, const std::string& path) {
  if (!node.IsMap() || !node["type"]) fail(path + ".type", node, "law needs a 'type'");
  const std::string type = node["type"].as<std::string>();
  if (type == "constant") {
    MapReader r(node, path, {"type", "value"});
    return ConstantLaw{r.real("value")};
  }
  if (type == "lognormal") {
    MapReader r(node, path, {"type", "mu", "sigma2"});
    return LogNormalLaw{r.real("mu"), r.real("sigma2")};
  }
  if (type == "scaled_square") {
    MapReader r(node, path, {"type", "scale", "shift", "noise"});
    return ScaledSquareLaw{r.real("scale"), r.real("shift"), parse_noise(r.get("noise"), path + ".noise")};
  }
  fail(path + ".type", node["type"], "unknown law type '" + type + "' (constant, lognormal, scaled_square)");
}

ModelSpec parse_model(const YAML::Node& node) {
  if (!node.IsMap() || !node["type"]) fail("model.type", node, "model needs a 'type'");
  const std::string type = node["type"].as<std::string>();
  ModelSpec spec{IidRV{StandardNormal{}}};
  auto burn = [&](const MapReader& r) { spec.burn_in = r.count("burn_in", kDefaultBurnIn); };
  if (type == "iid") {
    MapReader r(node, "model", {"type", "noise", "burn_in"});
    spec.variant = IidRV{parse_noise(r.get("noise"), "model.noise")};
    burn(r);
  } else if (type == "differenced") {
    MapReader r(node, "model", {"type", "noise", "burn_in"});
    spec.variant = Differenced{parse_noise(r.get("noise"), "model.noise")};
    burn(r);
  } else if (type == "m_dependent") {
    MapReader r(node, "model", {"type", "noise", "coeffs", "burn_in"});
    spec.variant = MDependent{parse_noise(r.get("noise"), "model.noise"), r.reals("coeffs")};
    burn(r);
  } else if (type == "sre") {
    MapReader r(node, "model", {"type", "a", "b", "burn_in"});
    spec.variant = Sre{parse_law(r.get("a"), "model.a"), parse_law(r.get("b"), "model.b")};
    burn(r);
  } else if (type == "garch11") {
    MapReader r(node, "model", {"type", "alpha0", "alpha1", "beta1", "noise", "output", "burn_in"});
    Garch11 g{r.real("alpha0"), r.real("alpha1"), r.real("beta1")};
    if (r.has("noise")) g.noise = parse_noise(r.get("noise"), "model.noise");
    if (r.has("output")) {
      const std::string out = r.text("output");
      if (out == "returns")
        g.output = GarchOutput::Returns;
      else if (out == "squares")
        g.output = GarchOutput::Squares;
      else
        fail("model.output", r.get("output"), "expected 'returns' or 'squares'");
    }
    spec.variant = g;
    burn(r);
  } else if (type == "stoch_vol") {
    MapReader r(node, "model", {"type", "ar", "ma", "vol_sd", "noise", "burn_in"});
    StochVol sv{r.has("ar") ? r.reals("ar") : std::vector<double>{},
                r.has("ma") ? r.reals("ma") : std::vector<double>{}, r.real("vol_sd", 1.0),
                parse_noise(r.get("noise"), "model.noise")};
    spec.variant = sv;
    burn(r);
  } else if (type == "sas_ma") {
    MapReader r(node, "model", {"type", "coeffs", "alpha", "burn_in"});
    spec.variant = SasMa{r.reals("coeffs"), r.real("alpha")};
    burn(r);
  } else {
    fail("model.type", node["type"],
         "unknown model type '" + type + "' (iid, differenced, m_dependent, sre, garch11, stoch_vol, sas_ma)");
  }
  return spec;
}

Task parse_task(const YAML::Node& node, const std::string& field) {
  const std::string s = node.IsScalar() ? node.Scalar() : "";
  for (Task t : all_tasks())
    if (to_string(t) == s) return t;
  fail(field, node, "unknown task '" + s + "' (tail_profile, b_table, theory_constants, convergence, diagnostics)");
}

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

void emit_real(YAML::Emitter& e, const char* key, double v) { e << YAML::Key << key << YAML::Value << num(v); }

void emit_reals(YAML::Emitter& e, const char* key, const std::vector<double>& v) {
  e << YAML::Key << key << YAML::Value << YAML::Flow << YAML::BeginSeq;
  for (double x : v) e << num(x);
  e << YAML::EndSeq;
}

void emit_noise(YAML::Emitter& e, const NoiseSpec& noise) {
  e << YAML::BeginMap;
  std::visit(Overloaded{[&](const TwoSidedPareto& n) {
                          e << YAML::Key << "type" << YAML::Value << "pareto";
                          emit_real(e, "alpha", n.alpha);
                          emit_real(e, "p", n.p);
                          emit_real(e, "q", n.q);
                          emit_real(e, "scale", n.scale);
                        },
                        [&](const StudentT& n) {
                          e << YAML::Key << "type" << YAML::Value << "student_t";
                          emit_real(e, "dof", n.dof);
                        },
                        [&](const StandardNormal&) { e << YAML::Key << "type" << YAML::Value << "normal"; },
                        [&](const SymmetrizedPareto& n) {
                          e << YAML::Key << "type" << YAML::Value << "symmetrized_pareto";
                          emit_real(e, "alpha", n.alpha);
                          emit_real(e, "scale", n.scale);
                        }},
             noise);
  e << YAML::EndMap;
}

void emit_law(YAML::Emitter& e, const PositiveLaw& law) {
  e << YAML::BeginMap;
  std::visit(Overloaded{[&](const ConstantLaw& l) {
                          e << YAML::Key << "type" << YAML::Value << "constant";
                          emit_real(e, "value", l.value);
                        },
                        [&](const LogNormalLaw& l) {
                          e << YAML::Key << "type" << YAML::Value << "lognormal";
                          emit_real(e, "mu", l.mu);
                          emit_real(e, "sigma2", l.sigma2);
                        },
                        [&](const ScaledSquareLaw& l) {
                          e << YAML::Key << "type" << YAML::Value << "scaled_square";
                          emit_real(e, "scale", l.scale);
                          emit_real(e, "shift", l.shift);
                          e << YAML::Key << "noise" << YAML::Value;
                          emit_noise(e, l.noise);
                        }},
             law);
  e << YAML::EndMap;
}

void emit_model(YAML::Emitter& e, const ModelSpec& spec) {
  e << YAML::BeginMap;
  auto noise = [&](const NoiseSpec& n) {
    e << YAML::Key << "noise" << YAML::Value;
    emit_noise(e, n);
  };
  std::visit(Overloaded{[&](const IidRV& m) {
                          e << YAML::Key << "type" << YAML::Value << "iid";
                          noise(m.noise);
                        },
                        [&](const Differenced& m) {
                          e << YAML::Key << "type" << YAML::Value << "differenced";
                          noise(m.noise);
                        },
                        [&](const MDependent& m) {
                          e << YAML::Key << "type" << YAML::Value << "m_dependent";
                          noise(m.noise);
                          emit_reals(e, "coeffs", m.coeffs);
                        },
                        [&](const Sre& m) {
                          e << YAML::Key << "type" << YAML::Value << "sre";
                          e << YAML::Key << "a" << YAML::Value;
                          emit_law(e, m.a);
                          e << YAML::Key << "b" << YAML::Value;
                          emit_law(e, m.b);
                        },
                        [&](const Garch11& m) {
                          e << YAML::Key << "type" << YAML::Value << "garch11";
                          emit_real(e, "alpha0", m.alpha0);
                          emit_real(e, "alpha1", m.alpha1);
                          emit_real(e, "beta1", m.beta1);
                          noise(m.noise);
                          e << YAML::Key << "output" << YAML::Value
                            << (m.output == GarchOutput::Squares ? "squares" : "returns");
                        },
                        [&](const StochVol& m) {
                          e << YAML::Key << "type" << YAML::Value << "stoch_vol";
                          emit_reals(e, "ar", m.ar);
                          emit_reals(e, "ma", m.ma);
                          emit_real(e, "vol_sd", m.vol_sd);
                          noise(m.noise);
                        },
                        [&](const SasMa& m) {
                          e << YAML::Key << "type" << YAML::Value << "sas_ma";
                          emit_reals(e, "coeffs", m.coeffs);
                          emit_real(e, "alpha", m.alpha);
                        }},
             spec.variant);
  e << YAML::Key << "burn_in" << YAML::Value << spec.burn_in;
  e << YAML::EndMap;
}

std::string to_string(NormalizationKind k) {
  switch (k) {
    case NormalizationKind::Auto: return "auto";
    case NormalizationKind::ClosedForm: return "closed";
    case NormalizationKind::Empirical: return "empirical";
  }
  return "auto";
}

}  // namespace

std::string to_string(Task t) {
  switch (t) {
    case Task::TailProfile: return "tail_profile";
    case Task::BTable: return "b_table";
    case Task::TheoryConstants: return "theory_constants";
    case Task::Convergence: return "convergence";
    case Task::Diagnostics: return "diagnostics";
  }
  return "unknown";
}

const std::vector<Task>& all_tasks() {
  static const std::vector<Task> tasks{Task::TailProfile, Task::BTable, Task::TheoryConstants, Task::Convergence,
                                       Task::Diagnostics};
  return tasks;
}

ExperimentConfig parse_config(const std::string& text) {
  YAML::Node root;
  try {
    root = YAML::Load(text);
  } catch (const YAML::Exception& e) {
    throw ConfigError("config parse error (line " + std::to_string(e.mark.line + 1) + ", column " +
                      std::to_string(e.mark.column + 1) + "): " + e.msg);
  }
  ExperimentConfig c;
  try {
    MapReader r(root, "", {"seed", "output", "model", "tasks", "sizes", "normalization", "centering"});
    c.seed = r.count("seed");
    c.output = r.text("output");
    const YAML::Node model_node = r.get("model");
    c.model = parse_model(model_node);

    const YAML::Node tasks = r.get("tasks");
    if (tasks.IsScalar() && tasks.Scalar() == "all") {
      c.tasks = all_tasks();
    } else {
      if (!tasks.IsSequence()) fail("tasks", tasks, "expected a list of tasks or 'all'");
      for (std::size_t i = 0; i < tasks.size(); ++i) {
        const Task t = parse_task(tasks[i], "tasks[" + std::to_string(i) + "]");
        if (std::find(c.tasks.begin(), c.tasks.end(), t) != c.tasks.end())
          fail("tasks[" + std::to_string(i) + "]", tasks[i], "duplicate task");
        c.tasks.push_back(t);
      }
    }

    if (r.has("sizes")) {
      MapReader s(r.get("sizes"), "sizes",
                  {"n", "replicates", "d_max", "m_grid", "x", "sum_n", "sum_replicates", "sample_size", "mc_draws",
                   "reference_factor"});
      Sizes& z = c.sizes;
      z.n = s.count("n", z.n);
      z.replicates = s.count("replicates", z.replicates);
      z.d_max = s.count("d_max", z.d_max);
      if (s.has("m_grid")) {
        const YAML::Node g = s.get("m_grid");
        if (!g.IsSequence()) fail("sizes.m_grid", g, "expected a list of block lengths");
        for (std::size_t i = 0; i < g.size(); ++i)
          z.m_grid.push_back(MapReader::to_count("sizes.m_grid[" + std::to_string(i) + "]", g[i]));
      }
      z.x = s.real("x", z.x);
      z.sum_n = s.count("sum_n", z.sum_n);
      z.sum_replicates = s.count("sum_replicates", z.sum_replicates);
      z.sample_size = s.count("sample_size", z.sample_size);
      z.mc_draws = s.count("mc_draws", z.mc_draws);
      z.reference_factor = s.count("reference_factor", z.reference_factor);
    }

    if (r.has("normalization")) {
      const std::string k = r.text("normalization");
      if (k == "auto")
        c.normalization = NormalizationKind::Auto;
      else if (k == "closed")
        c.normalization = NormalizationKind::ClosedForm;
      else if (k == "empirical")
        c.normalization = NormalizationKind::Empirical;
      else
        fail("normalization", r.get("normalization"), "expected 'auto', 'closed' or 'empirical'");
    }
    if (r.has("centering")) {
      const std::string k = r.text("centering");
      if (k == "none")
        c.centering = Centering::None;
      else if (k == "mean")
        c.centering = Centering::Mean;
      else if (k == "sine_empirical")
        c.centering = Centering::SineEmpirical;
      else if (k != "auto")
        fail("centering", r.get("centering"), "expected 'auto', 'none', 'mean' or 'sine_empirical'");
    }

    try {
      validate_config(c);
    } catch (const ConfigError& e) {
      // Model constraint violations point at the model block.
      const std::string msg = e.what();
      if (msg.rfind("config field 'model'", 0) == 0)
        throw ConfigError("config field 'model'" + where(model_node) + msg.substr(20));
      throw;
    }
  } catch (const YAML::Exception& e) {
    throw ConfigError("config error (line " + std::to_string(e.mark.line + 1) + ", column " +
                      std::to_string(e.mark.column + 1) + "): " + e.msg);
  }
  return c;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot read config file '" + path + "'");
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

std::string serialize_config(const ExperimentConfig& c) {
  YAML::Emitter e;
  e << YAML::BeginMap;
  e << YAML::Key << "seed" << YAML::Value << c.seed;
  e << YAML::Key << "output" << YAML::Value << YAML::DoubleQuoted << c.output;
  e << YAML::Key << "model" << YAML::Value;
  emit_model(e, c.model);
  e << YAML::Key << "tasks" << YAML::Value << YAML::Flow << YAML::BeginSeq;
  for (Task t : c.tasks) e << to_string(t);
  e << YAML::EndSeq;
  const Sizes& z = c.sizes;
  e << YAML::Key << "sizes" << YAML::Value << YAML::BeginMap;
  e << YAML::Key << "n" << YAML::Value << z.n;
  e << YAML::Key << "replicates" << YAML::Value << z.replicates;
  e << YAML::Key << "d_max" << YAML::Value << z.d_max;
  e << YAML::Key << "m_grid" << YAML::Value << YAML::Flow << YAML::BeginSeq;
  for (std::size_t m : z.m_grid) e << m;
  e << YAML::EndSeq;
  emit_real(e, "x", z.x);
  e << YAML::Key << "sum_n" << YAML::Value << z.sum_n;
  e << YAML::Key << "sum_replicates" << YAML::Value << z.sum_replicates;
  e << YAML::Key << "sample_size" << YAML::Value << z.sample_size;
  e << YAML::Key << "mc_draws" << YAML::Value << z.mc_draws;
  e << YAML::Key << "reference_factor" << YAML::Value << z.reference_factor;
  e << YAML::EndMap;
  e << YAML::Key << "normalization" << YAML::Value << to_string(c.normalization);
  e << YAML::Key << "centering" << YAML::Value << (c.centering ? to_string(*c.centering) : std::string("auto"));
  e << YAML::EndMap;
  return std::string(e.c_str()) + "\n";
}

std::string config_hash(const ExperimentConfig& config) {
  std::uint64_t h = 0xcbf29ce484222325ull;
  for (unsigned char ch : serialize_config(config)) {
    h ^= ch;
    h *= 0x100000001b3ull;
  }
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

void validate_config(const ExperimentConfig& c) {
  auto check = [](bool ok, const std::string& field, const std::string& what) {
    if (!ok) throw ConfigError("config field '" + field + "': " + what);
  };
  check(!c.tasks.empty(), "tasks", "at least one task is required");
  check(!c.output.empty(), "output", "must not be empty");
  const Sizes& z = c.sizes;
  check(z.n >= 2, "sizes.n", "must be at least 2");
  check(z.replicates >= 1, "sizes.replicates", "must be positive");
  check(z.d_max >= 1, "sizes.d_max", "must be positive");
  for (std::size_t m : z.m_grid) check(m >= 1 && m < z.n, "sizes.m_grid", "entries must lie in [1, n)");
  check(z.x > 0.0, "sizes.x", "must be positive");
  check(z.sum_n >= 2, "sizes.sum_n", "must be at least 2");
  check(z.sum_replicates >= 1, "sizes.sum_replicates", "must be positive");
  check(z.sample_size >= 100, "sizes.sample_size", "must be at least 100");
  check(z.mc_draws >= 1000, "sizes.mc_draws", "must be at least 1000");
  check(z.reference_factor >= kMinimumReferenceFactor, "sizes.reference_factor",
        "must be at least " + std::to_string(kMinimumReferenceFactor));
  try {
    validate(c.model);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("config field 'model': ") + e.what());
  }
}

}  // namespace stablim
