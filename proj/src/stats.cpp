#include "ishear/stats.hpp"

#include <cmath>
#include <stdexcept>

namespace ishear {

void CompensatedSum::add(double x) {
  double s = sum_ + x;
  comp_ += (std::abs(sum_) >= std::abs(x)) ? (sum_ - s) + x : (x - s) + sum_;
  sum_ = s;
}

LinearFit linear_fit(const std::vector<double>& x, const std::vector<double>& y) {
  const std::size_t n = x.size();
  if (n < 2 || y.size() != n) throw std::invalid_argument("linear_fit needs >= 2 matching points");
  double mx = mean(x), my = mean(y);
  double sxx = 0, sxy = 0;
  for (std::size_t i = 0; i < n; ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  LinearFit f;
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  if (n > 2) {
    double ss = 0;
    for (std::size_t i = 0; i < n; ++i) {
      double r = y[i] - f.intercept - f.slope * x[i];
      ss += r * r;
    }
    f.slope_se = std::sqrt(ss / double(n - 2) / sxx);
  }
  return f;
}

double mean(const std::vector<double>& x) {
  CompensatedSum s;
  for (double v : x) s.add(v);
  return s.value() / double(x.size());
}

double stddev(const std::vector<double>& x) {
  if (x.size() < 2) return 0.0;
  double m = mean(x), ss = 0;
  for (double v : x) ss += (v - m) * (v - m);
  return std::sqrt(ss / double(x.size() - 1));
}

double jackknife_se(const std::vector<double>& values, const std::vector<double>& weights) {
  const std::size_t n = values.size();
  if (n < 2) return 0.0;
  double wsum = 0, vsum = 0;
  for (std::size_t b = 0; b < n; ++b) {
    wsum += weights[b];
    vsum += weights[b] * values[b];
  }
  std::vector<double> loo(n);
  double lbar = 0;
  for (std::size_t b = 0; b < n; ++b) {
    loo[b] = (vsum - weights[b] * values[b]) / (wsum - weights[b]);
    lbar += loo[b];
  }
  lbar /= double(n);
  double ss = 0;
  for (double l : loo) ss += (l - lbar) * (l - lbar);
  return std::sqrt(double(n - 1) / double(n) * ss);
}

}  // namespace ishear
