#pragma once

#include <cmath>
#include <cstddef>

#include <Eigen/Dense>

namespace stablim {

// Neumaier's compensated summation.
class CompensatedSum {
 public:
  void add(double v) {
    const double t = sum_ + v;
    if (std::abs(sum_) >= std::abs(v))
      comp_ += (sum_ - t) + v;
    else
      comp_ += (v - t) + sum_;
    sum_ = t;
  }
  void add(const CompensatedSum& other) {
    add(other.sum_);
    add(other.comp_);
  }
  double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0;
  double comp_ = 0.0;
};

// Mean of exp(i x s) over the sample for each grid point. Negative grid
// points are conjugates of the positive evaluation, so Hermitian symmetry
// holds exactly.
Eigen::VectorXcd empirical_cf(const Eigen::Ref<const Eigen::VectorXd>& samples,
                              const Eigen::Ref<const Eigen::VectorXd>& grid);

// sup_x |F_a(x) - F_b(x)| for the two empirical distribution functions.
double ks_two_sample(const Eigen::Ref<const Eigen::VectorXd>& a, const Eigen::Ref<const Eigen::VectorXd>& b);

// Asymptotic two-sample critical value sqrt(-ln(level/2)/2) sqrt((n+m)/(n m)).
double ks_critical_value(std::size_t n, std::size_t m, double level);

// Empirical quantile by the nearest-rank rule.
double quantile(const Eigen::Ref<const Eigen::VectorXd>& sample, double q);

}  // namespace stablim
