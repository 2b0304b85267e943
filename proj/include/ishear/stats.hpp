#pragma once
#include <cstddef>
#include <vector>

namespace ishear {

// Neumaier compensated accumulator.
class CompensatedSum {
 public:
  void add(double x);
  double value() const { return sum_ + comp_; }

 private:
  double sum_ = 0.0, comp_ = 0.0;
};

struct LinearFit {
  double slope = 0.0;
  double intercept = 0.0;
  double slope_se = 0.0;  // standard error from residual scatter
};

LinearFit linear_fit(const std::vector<double>& x, const std::vector<double>& y);

double mean(const std::vector<double>& x);
// Sample standard deviation (n - 1 denominator).
double stddev(const std::vector<double>& x);

// Delete-one-block jackknife of a weighted mean. values[b] is block b's mean,
// weights[b] its size. Returns the standard error of the pooled mean.
double jackknife_se(const std::vector<double>& values, const std::vector<double>& weights);

}  // namespace ishear
