#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <ostream>
#include <string>

#include "stablim/config.hpp"
#include "stablim/models.hpp"
#include "stablim/tail.hpp"

namespace stablim {

// Exit statuses of the experiment runner.
inline constexpr int kExitPass = 0;
inline constexpr int kExitVerdictFailure = 1;
inline constexpr int kExitUsage = 2;

// Tail indices within this distance of 1 count as the excluded case for
// recurrence models (SRE and GARCH).
inline constexpr double kAlphaOneBand = 0.05;

// Theory-side limit parameters for a model.
struct TheoryConstants {
  double alpha;
  double c_plus;
  double c_minus;
  double se_plus;
  double se_minus;
  // Theory value of b_plus(d)/d at the b-table depth, for models with a
  // finite memory where it is known exactly; otherwise c_plus.
  bool exact_b;
  bool excluded;         // alpha = 1 for a recurrence model
  std::string method;    // how the constants were obtained
  std::string record;    // key: value lines of every intermediate quantity
};

// Tail index and Lévy constants. Monte Carlo pieces use `mc_draws` draws and
// seeds derived from `seed`.
TheoryConstants theory_constants(const ModelSpec& spec, std::size_t mc_draws, std::uint64_t seed);

// Exact (b_plus(d), b_minus(d)) for finite-memory models, empty otherwise.
std::optional<std::pair<double, double>> exact_b(const ModelSpec& spec, double alpha, std::size_t d);

// The normalization an experiment uses for all n in [n_min, 10 n_min].
Normalization make_normalization(const ModelSpec& spec, NormalizationKind kind, std::size_t n_min,
                                 std::size_t reference_factor, std::uint64_t seed);

// Runs every task of the config and writes the reports into `out_dir`
// (the config's output directory when empty). Returns kExitPass,
// kExitVerdictFailure or kExitUsage. Progress goes to `log`.
int run_config(const ExperimentConfig& config, const std::string& out_dir, std::ostream& log);

// Catalog of the seven model families with their parameter schema.
void list_models(std::ostream& os);

}  // namespace stablim
