#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "ishear/errors.hpp"
#include "ishear/kernel.hpp"

using namespace ishear;
using namespace ishear::kernel;

namespace {

// lambda_p for d = 3 and constant b = 1/(4 pi), by the substitution u = sin^2(theta/2).
double lambda_closed(double z, double p) {
  return 1.0 - std::pow(z, p) / (p / 2 + 1) - (1.0 - std::pow(1.0 - z, p + 2)) / (z * (2 - z) * (p / 2 + 1));
}

}  // namespace

TEST_CASE("isotropic sphere moments in d = 3") {
  const auto k = KernelModel::isotropic(3, 0.75);
  CHECK(sphere_moment(k, 0) == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(std::abs(sphere_moment(k, 1)) < 1e-14);
  CHECK(sphere_moment(k, 2) == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
}

TEST_CASE("sphere_area matches the closed forms") {
  CHECK(sphere_area(1) == doctest::Approx(2 * std::numbers::pi));
  CHECK(sphere_area(2) == doctest::Approx(4 * std::numbers::pi));
  CHECK(sphere_area(3) == doctest::Approx(2 * std::numbers::pi * std::numbers::pi));
}

TEST_CASE("derived constants for d = 3 isotropic z = 3/4 are the exact rationals") {
  const auto kc = derive_constants(KernelModel::isotropic(3, 0.75));
  CHECK(kc.b0 == doctest::Approx(1.0).epsilon(1e-14));
  CHECK(kc.zeta == doctest::Approx(3.0 / 16).epsilon(1e-13));
  CHECK(kc.c11 == doctest::Approx(1.0 / 3).epsilon(1e-13));
  CHECK(kc.c_tilde == doctest::Approx(9.0 / 32).epsilon(1e-13));
  CHECK(kc.alpha0 == doctest::Approx(15.0 / 32).epsilon(1e-13));
}

TEST_CASE("elastic limit has no cooling and no critical shear") {
  const auto kc = derive_constants(KernelModel::isotropic(3, 1.0));
  CHECK(kc.zeta == 0.0);
  CHECK(kc.alpha0 == 0.0);
  double prev = 1.0;
  for (double z : {0.9, 0.99, 0.999, 0.9999}) {
    const double a0 = derive_constants(KernelModel::isotropic(3, z)).alpha0;
    CHECK(a0 < prev);
    prev = a0;
  }
  CHECK(prev < 0.02);
}

TEST_CASE("alpha0 respects its upper bound") {
  for (int d : {2, 3})
    for (double z : {0.55, 0.75, 0.95}) {
      const auto kc = derive_constants(KernelModel::series(d, z, {0.3, 0.1, 0.2}));
      const double bound = 0.25 * (kc.b0 - kc.b1 + d * kc.c11 / 2) * std::sqrt((kc.b0 - kc.b1) / kc.c11);
      CHECK(kc.alpha0 < bound);
    }
}

TEST_CASE("the two forms of the cooling rate agree") {
  for (int d : {2, 3}) {
    const auto k = KernelModel::series(d, 0.8, {0.2, 0.07, 0.05});
    const auto kc = derive_constants(k);
    const double alt = 2 * k.z() * (1 - k.z()) *
                       sphere_integral(k, [](double t) { return std::pow(std::sin(t / 2), 2); });
    CHECK(std::abs(kc.zeta - alt) < 1e-10);
  }
}

TEST_CASE("lambda_p against the d = 3 closed form") {
  for (double z : {0.6, 0.75, 0.95}) {
    const auto k = KernelModel::isotropic(3, z);
    for (double p = 0.0; p <= 6.0; p += 0.5) CHECK(std::abs(lambda_p(k, p) - lambda_closed(z, p)) < 1e-10);
  }
}

TEST_CASE("lambda_p identities, monotonicity and bound") {
  for (int d : {2, 3}) {
    const auto k = KernelModel::tabulated(d, 0.7, {0.3, 0.25, 0.2, 0.22, 0.3});
    const auto kc = derive_constants(k);
    CHECK(std::abs(lambda_p(k, 0) + kc.b0) < 1e-10);
    CHECK(std::abs(lambda_p(k, 2) - kc.zeta) < 1e-10);
    double prev = lambda_p(k, 0);
    for (double p = 0.5; p <= 6.0; p += 0.5) {
      const double l = lambda_p(k, p);
      CHECK(l > prev);
      CHECK(l <= kc.b0);
      prev = l;
    }
  }
}

TEST_CASE("lambda_root matches bisection on the closed form") {
  double lo = 0.0, hi = 2.0;
  for (int i = 0; i < 200; ++i) {
    const double m = 0.5 * (lo + hi);
    (lambda_closed(0.75, m) < 0 ? lo : hi) = m;
  }
  const double p0 = lambda_root(KernelModel::isotropic(3, 0.75));
  CHECK(std::abs(p0 - 0.5 * (lo + hi)) < 1e-10);
  CHECK(p0 < 2.0);
  CHECK(lambda_root(KernelModel::isotropic(3, 1.0)) == 2.0);
}

TEST_CASE("sphere moments do not depend on the reference direction") {
  // Monte Carlo over the full sphere S^2 for five random unit vectors e.
  const auto k = KernelModel::series(3, 0.8, {0.05, 0.03, 0.04});
  const double b2 = sphere_moment(k, 2);
  std::mt19937_64 gen(3);
  std::normal_distribution<double> n01;
  const int n = 200000;
  for (int rep = 0; rep < 5; ++rep) {
    double e[3] = {n01(gen), n01(gen), n01(gen)};
    const double ne = std::sqrt(e[0] * e[0] + e[1] * e[1] + e[2] * e[2]);
    for (double& v : e) v /= ne;
    double s = 0.0, s2 = 0.0;
    for (int i = 0; i < n; ++i) {
      double x[3] = {n01(gen), n01(gen), n01(gen)};
      const double nx = std::sqrt(x[0] * x[0] + x[1] * x[1] + x[2] * x[2]);
      const double c = (x[0] * e[0] + x[1] * e[1] + x[2] * e[2]) / nx;
      const double f = 4 * std::numbers::pi * k(c) * c * c;
      s += f;
      s2 += f * f;
    }
    const double m = s / n, se = std::sqrt((s2 / n - m * m) / n);
    CHECK(std::abs(m - b2) < 4 * se);
  }
}

TEST_CASE("kernel errors") {
  CHECK_THROWS_AS(derive_constants(KernelModel::series(3, 0.8, {0.0})), DegenerateKernelError);
  CHECK_THROWS_AS(sphere_moment(KernelModel::series(3, 0.8, {0.1, -1.0}), 0), InvalidKernelError);
  CHECK_THROWS_AS(KernelModel::isotropic(1, 0.8).validate(), ConfigError);
  CHECK_THROWS_AS(family_from_string("hard-sphere"), ConfigError);
  CHECK(family_from_string(to_string(Family::table)) == Family::table);
}
