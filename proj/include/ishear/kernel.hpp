#pragma once
#include <functional>
#include <string>
#include <vector>

namespace ishear::kernel {

enum class Family { isotropic, series, table };

std::string to_string(Family f);
Family family_from_string(const std::string& s);

// Angular collision kernel b(cos theta) together with dimension and
// restitution. All members are plain data; evaluation is const.
struct KernelModel {
  int d = 3;
  double e_res = 0.5;
  Family family = Family::isotropic;
  // series: b(c) = c0 + c1 c + c2 c^2
  std::vector<double> coefficients;
  // table: b at Chebyshev-Lobatto nodes c_j = cos(pi j / (n-1)), j = 0..n-1
  std::vector<double> table;
  int quadrature_order = 64;

  double z() const { return 0.5 * (1.0 + e_res); }
  double operator()(double c) const;

  static KernelModel isotropic(int d, double z);
  static KernelModel series(int d, double z, std::vector<double> coeffs);
  static KernelModel tabulated(int d, double z, std::vector<double> values);

  // Throws ConfigError when fields are out of range.
  void validate() const;
};

double restitution_from_z(double z);

struct KernelConstants {
  int d = 3;
  double z = 1.0;
  double b0 = 0, b1 = 0, b2 = 0;
  double zeta = 0;
  double c11 = 0;
  double c_tilde = 0;
  double alpha0 = 0;
};

// Surface area of the unit sphere S^n in R^{n+1}.
double sphere_area(int n);

// |S^{d-2}| int_0^pi b(cos t) g(t) sin^{d-2} t dt, evaluated at the kernel's
// quadrature order and checked against twice that order.
double sphere_integral(const KernelModel& k, const std::function<double(double)>& g);

double sphere_moment(const KernelModel& k, int n);
KernelConstants derive_constants(const KernelModel& k);
double lambda_p(const KernelModel& k, double p);
double lambda_root(const KernelModel& k);

}  // namespace ishear::kernel
