#include "ishear/kernel.hpp"

#include <cmath>
#include <numbers>

#include "ishear/errors.hpp"
#include "ishear/quadrature.hpp"

namespace ishear::kernel {

namespace {
constexpr double kAccuracyTol = 1e-10;
}

std::string to_string(Family f) {
  switch (f) {
    case Family::isotropic: return "isotropic";
    case Family::series: return "series";
    case Family::table: return "table";
  }
  return "?";
}

Family family_from_string(const std::string& s) {
  if (s == "isotropic") return Family::isotropic;
  if (s == "series") return Family::series;
  if (s == "table") return Family::table;
  throw ConfigError("unknown kernel family '" + s + "'");
}

double sphere_area(int n) {
  // |S^n| = 2 pi^{(n+1)/2} / Gamma((n+1)/2)
  return 2.0 * std::pow(std::numbers::pi, 0.5 * (n + 1)) / std::tgamma(0.5 * (n + 1));
}

double restitution_from_z(double z) { return 2.0 * z - 1.0; }

KernelModel KernelModel::isotropic(int d, double z) {
  KernelModel k;
  k.d = d;
  k.e_res = restitution_from_z(z);
  k.family = Family::isotropic;
  return k;
}

KernelModel KernelModel::series(int d, double z, std::vector<double> coeffs) {
  KernelModel k;
  k.d = d;
  k.e_res = restitution_from_z(z);
  k.family = Family::series;
  k.coefficients = std::move(coeffs);
  return k;
}

KernelModel KernelModel::tabulated(int d, double z, std::vector<double> values) {
  KernelModel k;
  k.d = d;
  k.e_res = restitution_from_z(z);
  k.family = Family::table;
  k.table = std::move(values);
  return k;
}

void KernelModel::validate() const {
  if (d < 2) throw ConfigError("kernel dimension must be >= 2");
  if (!(e_res > 0.0 && e_res <= 1.0)) throw ConfigError("restitution must lie in (0, 1]");
  if (quadrature_order < 4) throw ConfigError("quadrature order must be >= 4");
  if (family == Family::series && (coefficients.empty() || coefficients.size() > 3))
    throw ConfigError("series kernel takes 1 to 3 coefficients c0, c1, c2");
  if (family == Family::table && table.size() < 2)
    throw ConfigError("tabulated kernel needs at least 2 Chebyshev values");
}

double KernelModel::operator()(double c) const {
  switch (family) {
    case Family::isotropic:
      return 1.0 / sphere_area(d - 1);
    case Family::series: {
      double v = 0.0;
      for (std::size_t i = coefficients.size(); i-- > 0;) v = v * c + coefficients[i];
      return v;
    }
    case Family::table: {
      // Barycentric interpolation on Chebyshev-Lobatto nodes.
      const std::size_t n = table.size();
      double num = 0.0, den = 0.0;
      for (std::size_t j = 0; j < n; ++j) {
        double xj = std::cos(std::numbers::pi * double(j) / double(n - 1));
        double diff = c - xj;
        if (diff == 0.0) return table[j];
        double w = (j % 2 == 0) ? 1.0 : -1.0;
        if (j == 0 || j == n - 1) w *= 0.5;
        num += w * table[j] / diff;
        den += w / diff;
      }
      return num / den;
    }
  }
  return 0.0;
}

namespace {

double integrate_at(const KernelModel& k, const std::function<double(double)>& g, int order) {
  const double pi = std::numbers::pi;
  auto rule = graded_gauss_legendre(order, 0.0, pi);
  const double area = sphere_area(k.d - 2);
  double sum = 0.0, comp = 0.0;
  for (std::size_t i = 0; i < rule.size(); ++i) {
    double t = rule.x[i];
    double b = k(std::cos(t));
    if (!std::isfinite(b) || b < 0.0)
      throw InvalidKernelError("kernel value " + std::to_string(b) + " at cos(theta) = " +
                               std::to_string(std::cos(t)));
    double f = b * g(t) * std::pow(std::sin(t), k.d - 2);
    if (!std::isfinite(f)) throw InvalidKernelError("non-finite angular integrand");
    // Neumaier summation
    double term = rule.w[i] * f;
    double s = sum + term;
    comp += (std::abs(sum) >= std::abs(term)) ? (sum - s) + term : (term - s) + sum;
    sum = s;
  }
  return area * (sum + comp);
}

}  // namespace

double sphere_integral(const KernelModel& k, const std::function<double(double)>& g) {
  k.validate();
  double lo = integrate_at(k, g, k.quadrature_order);
  double hi = integrate_at(k, g, 2 * k.quadrature_order);
  if (std::abs(hi - lo) > kAccuracyTol * std::max(1.0, std::abs(hi)))
    throw AccuracyError("angular quadrature did not converge: order " +
                        std::to_string(k.quadrature_order) + " vs " +
                        std::to_string(2 * k.quadrature_order) + " differ by " +
                        std::to_string(std::abs(hi - lo)));
  return hi;
}

double sphere_moment(const KernelModel& k, int n) {
  if (n < 0) throw DomainError("sphere_moment: n must be >= 0");
  return sphere_integral(k, [n](double t) { return std::pow(std::cos(t), n); });
}

KernelConstants derive_constants(const KernelModel& k) {
  KernelConstants c;
  c.d = k.d;
  c.z = k.z();
  c.b0 = sphere_moment(k, 0);
  c.b1 = sphere_moment(k, 1);
  c.b2 = sphere_moment(k, 2);
  if (!(c.b0 > c.b2) || !(c.b0 > c.b1) || !(c.b2 > 0.0))
    throw DegenerateKernelError("kernel is degenerate: need b0 > b2 > 0 and b0 > b1 (b0 = " +
                                std::to_string(c.b0) + ", b1 = " + std::to_string(c.b1) +
                                ", b2 = " + std::to_string(c.b2) + ")");
  const double z = c.z;
  c.zeta = z * (1.0 - z) * (c.b0 - c.b1);
  c.c11 = (c.b0 - c.b2) / (k.d - 1);
  c.c_tilde = z * z * k.d * c.c11 / 2.0;
  c.alpha0 = (c.zeta + c.c_tilde) * std::sqrt(c.zeta / (z * z * c.c11));
  return c;
}

double lambda_p(const KernelModel& k, double p) {
  if (!(p >= 0.0)) throw DomainError("lambda_p: p must be >= 0");
  const double z = k.z();
  const double h = 0.5 * p;
  return sphere_integral(k, [z, h](double t) {
    double s = std::sin(0.5 * t);
    double c = std::cos(0.5 * t);
    double s2 = s * s;
    // 1 - z(2-z) s^2 written to stay accurate near t = pi when z = 1
    double plus = c * c + (1.0 - z) * (1.0 - z) * s2;
    return 1.0 - std::pow(z * z * s2, h) - std::pow(plus, h);
  });
}

double lambda_root(const KernelModel& k) {
  if (k.e_res == 1.0) return 2.0;
  double lo = 0.0, hi = 2.0;
  constexpr double ptol = 1e-12;
  while (hi - lo > ptol) {
    double mid = 0.5 * (lo + hi);
    if (lambda_p(k, mid) < 0.0) lo = mid;
    else hi = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace ishear::kernel
