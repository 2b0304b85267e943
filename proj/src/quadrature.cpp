#include "ishear/quadrature.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <stdexcept>

namespace ishear {

namespace {

// Nodes and weights on [-1, 1] by Newton iteration on P_n.
QuadratureRule reference_rule(int n) {
  QuadratureRule r;
  r.x.resize(n);
  r.w.resize(n);
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = x;
      for (int k = 2; k <= n; ++k) {
        double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      if (n == 1) { p1 = x; p0 = 1.0; }
      dp = n * (x * p1 - p0) / (x * x - 1.0);
      double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    double p0 = 1.0, p1 = x;
    for (int k = 2; k <= n; ++k) {
      double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
      p0 = p1;
      p1 = p2;
    }
    dp = (n == 1) ? 1.0 : n * (x * p1 - p0) / (x * x - 1.0);
    double w = 2.0 / ((1.0 - x * x) * dp * dp);
    r.x[i] = -x;
    r.x[n - 1 - i] = x;
    r.w[i] = w;
    r.w[n - 1 - i] = w;
  }
  if (n % 2 == 1) r.x[n / 2] = 0.0;
  return r;
}

const QuadratureRule& cached_reference(int n) {
  static std::mutex mu;
  static std::map<int, QuadratureRule> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find(n);
  if (it == cache.end()) it = cache.emplace(n, reference_rule(n)).first;
  return it->second;
}

}  // namespace

QuadratureRule gauss_legendre(int n, double a, double b) {
  if (n < 1) throw std::invalid_argument("gauss_legendre: n must be positive");
  const QuadratureRule& ref = cached_reference(n);
  QuadratureRule r;
  r.x.resize(n);
  r.w.resize(n);
  double h = 0.5 * (b - a), c = 0.5 * (a + b);
  for (int i = 0; i < n; ++i) {
    r.x[i] = c + h * ref.x[i];
    r.w[i] = h * ref.w[i];
  }
  return r;
}

QuadratureRule graded_gauss_legendre(int n, double a, double b, int levels, double ratio) {
  double mid = 0.5 * (a + b), half = 0.5 * (b - a);
  std::vector<double> breaks;
  // [a, mid] graded toward a, then mirror toward b.
  breaks.push_back(a);
  for (int k = levels; k >= 1; --k) breaks.push_back(a + half * std::pow(ratio, k));
  breaks.push_back(mid);
  for (int k = 1; k <= levels; ++k) breaks.push_back(b - half * std::pow(ratio, k));
  breaks.push_back(b);
  QuadratureRule r;
  r.x.reserve(n * (breaks.size() - 1));
  r.w.reserve(n * (breaks.size() - 1));
  for (std::size_t p = 0; p + 1 < breaks.size(); ++p) {
    auto q = gauss_legendre(n, breaks[p], breaks[p + 1]);
    r.x.insert(r.x.end(), q.x.begin(), q.x.end());
    r.w.insert(r.w.end(), q.w.begin(), q.w.end());
  }
  return r;
}

}  // namespace ishear
