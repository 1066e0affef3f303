#include "stablim/stats.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "stablim/parallel.hpp"

namespace stablim {

Eigen::VectorXcd empirical_cf(const Eigen::Ref<const Eigen::VectorXd>& samples,
                              const Eigen::Ref<const Eigen::VectorXd>& grid) {
  if (samples.size() == 0 || grid.size() == 0) throw std::invalid_argument("empirical CF needs samples and a grid");
  Eigen::VectorXcd out(grid.size());
  const auto n = static_cast<std::size_t>(samples.size());
  parallel_for(static_cast<std::size_t>(grid.size()), [&](std::size_t g) {
    const double x = std::abs(grid[static_cast<Eigen::Index>(g)]);
    CompensatedSum re, im;
    for (std::size_t i = 0; i < n; ++i) {
      const double t = x * samples[static_cast<Eigen::Index>(i)];
      re.add(std::cos(t));
      im.add(std::sin(t));
    }
    const double inv = 1.0 / static_cast<double>(n);
    const double sign = grid[static_cast<Eigen::Index>(g)] < 0.0 ? -1.0 : 1.0;
    out[static_cast<Eigen::Index>(g)] = {re.value() * inv, sign * im.value() * inv};
  });
  return out;
}

double ks_two_sample(const Eigen::Ref<const Eigen::VectorXd>& a, const Eigen::Ref<const Eigen::VectorXd>& b) {
  if (a.size() == 0 || b.size() == 0) throw std::invalid_argument("KS statistic needs two nonempty samples");
  std::vector<double> x(a.data(), a.data() + a.size());
  std::vector<double> y(b.data(), b.data() + b.size());
  std::sort(x.begin(), x.end());
  std::sort(y.begin(), y.end());
  const double n = static_cast<double>(x.size());
  const double m = static_cast<double>(y.size());
  std::size_t i = 0, j = 0;
  double d = 0.0;
  while (i < x.size() && j < y.size()) {
    const double v = std::min(x[i], y[j]);
    while (i < x.size() && x[i] == v) ++i;
    while (j < y.size() && y[j] == v) ++j;
    d = std::max(d, std::abs(static_cast<double>(i) / n - static_cast<double>(j) / m));
  }
  return d;
}

double ks_critical_value(std::size_t n, std::size_t m, double level) {
  const double dn = static_cast<double>(n);
  const double dm = static_cast<double>(m);
  return std::sqrt(-0.5 * std::log(level / 2.0)) * std::sqrt((dn + dm) / (dn * dm));
}

double quantile(const Eigen::Ref<const Eigen::VectorXd>& sample, double q) {
  if (sample.size() == 0 || !(q > 0.0 && q <= 1.0)) throw std::invalid_argument("quantile needs data and q in (0,1]");
  std::vector<double> v(sample.data(), sample.data() + sample.size());
  auto rank = static_cast<std::size_t>(std::ceil(q * static_cast<double>(v.size())));
  rank = std::clamp<std::size_t>(rank, 1, v.size());
  std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(rank - 1), v.end());
  return v[rank - 1];
}

}  // namespace stablim
