#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "stablim/models.hpp"
#include "stablim/verify.hpp"

namespace stablim {

enum class Task { TailProfile, BTable, TheoryConstants, Convergence, Diagnostics };

std::string to_string(Task t);
const std::vector<Task>& all_tasks();

enum class NormalizationKind { Auto, ClosedForm, Empirical };

struct Sizes {
  std::size_t n = 10000;              // block length n for a_n
  std::size_t replicates = 1000000;   // d-blocks for the b-table
  std::size_t d_max = 16;
  std::vector<std::size_t> m_grid;    // empty means {n^0.3, n^0.5, n^0.7}
  double x = 1.0;
  std::size_t sum_n = 100000;         // length of each partial sum
  std::size_t sum_replicates = 10000;
  std::size_t sample_size = 1000000;  // path length for the tail profile
  std::size_t mc_draws = 1000000;     // theory constants
  std::size_t reference_factor = kDefaultReferenceFactor;
};

struct ExperimentConfig {
  std::uint64_t seed = 0;
  std::string output = "out";
  ModelSpec model;
  std::vector<Task> tasks;
  Sizes sizes;
  NormalizationKind normalization = NormalizationKind::Auto;
  std::optional<Centering> centering;  // empty picks by tail index
};

// Parse or validation failure; the message carries the field and, for
// parse errors, the line and column.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

ExperimentConfig parse_config(const std::string& text);
ExperimentConfig load_config(const std::string& path);
// Canonical text; parse_config(serialize_config(c)) reproduces c exactly.
std::string serialize_config(const ExperimentConfig& config);
// FNV-1a 64 of the canonical text, as 16 hex digits.
std::string config_hash(const ExperimentConfig& config);

// Field checks plus model validation; throws ConfigError.
void validate_config(const ExperimentConfig& config);

}  // namespace stablim
