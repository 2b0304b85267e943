#pragma once
#include <vector>

namespace ishear {

struct QuadratureRule {
  std::vector<double> x;
  std::vector<double> w;
  std::size_t size() const { return x.size(); }
};

// n-point Gauss-Legendre rule on [a, b].
QuadratureRule gauss_legendre(int n, double a = -1.0, double b = 1.0);

// Composite Gauss-Legendre on [a, b] with panels shrinking geometrically
// toward both endpoints. Handles integrands with algebraic endpoint behaviour
// such as x^p for small non-integer p.
QuadratureRule graded_gauss_legendre(int n, double a, double b, int levels = 14,
                                     double ratio = 0.15);

}  // namespace ishear
