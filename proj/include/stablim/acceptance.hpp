#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace stablim {

struct CriterionResult {
  int id;
  bool pass;
  double seconds;
  std::string detail;
};

// Runs the acceptance criteria (all when `which` is empty), printing one
// PASS/FAIL line per criterion to `os` as each finishes.
std::vector<CriterionResult> run_acceptance(std::ostream& os, const std::vector<int>& which = {});

}  // namespace stablim
