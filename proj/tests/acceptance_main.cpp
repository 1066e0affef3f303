#include <cstdlib>
#include <iostream>
#include <string>
#include <vector>

#include "stablim/acceptance.hpp"

// Usage: acceptance [criterion ids...]
int main(int argc, char** argv) {
  std::vector<int> which;
  for (int i = 1; i < argc; ++i) which.push_back(std::atoi(argv[i]));
  int failed = 0;
  double seconds = 0.0;
  const auto results = stablim::run_acceptance(std::cout, which);
  for (const auto& r : results) {
    failed += r.pass ? 0 : 1;
    seconds += r.seconds;
  }
  std::cout << results.size() - static_cast<std::size_t>(failed) << "/" << results.size()
            << " criteria passed in " << seconds << " s\n";
  return failed == 0 ? 0 : 1;
}
