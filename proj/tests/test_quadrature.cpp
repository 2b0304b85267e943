#include <doctest.h>

#include <cmath>
#include <numbers>

#include "ishear/quadrature.hpp"
#include "ishear/rng.hpp"
#include "ishear/stats.hpp"

using namespace ishear;

TEST_CASE("gauss_legendre integrates polynomials up to degree 2n-1 exactly") {
  for (int n : {1, 2, 5, 16, 64}) {
    const auto q = gauss_legendre(n, -1.0, 1.0);
    for (int deg = 0; deg <= 2 * n - 1 && deg <= 40; ++deg) {
      double s = 0.0;
      for (std::size_t i = 0; i < q.size(); ++i) s += q.w[i] * std::pow(q.x[i], deg);
      const double exact = deg % 2 ? 0.0 : 2.0 / (deg + 1);
      CHECK(s == doctest::Approx(exact).epsilon(1e-13));
    }
  }
}

TEST_CASE("gauss_legendre maps to an arbitrary interval") {
  const auto q = gauss_legendre(20, 0.0, std::numbers::pi);
  double s = 0.0;
  for (std::size_t i = 0; i < q.size(); ++i) s += q.w[i] * std::sin(q.x[i]);
  CHECK(s == doctest::Approx(2.0).epsilon(1e-14));
}

TEST_CASE("graded rule resolves algebraic endpoint behaviour") {
  const auto q = graded_gauss_legendre(16, 0.0, 1.0);
  for (double p : {0.1, 0.5, 1.3}) {
    double s = 0.0;
    for (std::size_t i = 0; i < q.size(); ++i) s += q.w[i] * std::pow(q.x[i], p);
    CHECK(s == doctest::Approx(1.0 / (p + 1.0)).epsilon(1e-10));
  }
}

TEST_CASE("Philox4x32-10 known answer") {
  // Reference vector from the Random123 distribution (counter 0, key 0).
  const auto out = Philox::block({0, 0, 0, 0}, {0, 0});
  CHECK(out[0] == 0x6627e8d5u);
  CHECK(out[1] == 0xe169c58du);
  CHECK(out[2] == 0xbc57ac4cu);
  CHECK(out[3] == 0x9b00dbd8u);
}

TEST_CASE("Philox streams are reproducible and distinct") {
  Philox a(5, 1), b(5, 1), c(5, 2);
  for (int i = 0; i < 100; ++i) {
    const auto x = a(), y = b();
    CHECK(x == y);
    (void)c();
  }
  Philox d(5, 1), e(5, 2);
  int same = 0;
  for (int i = 0; i < 100; ++i) same += d() == e();
  CHECK(same == 0);
}

TEST_CASE("Philox uniform, normal and below have the right first moments") {
  Philox g(42);
  const int n = 200000;
  double su = 0.0, sn = 0.0, sn2 = 0.0;
  long long cnt[7] = {};
  for (int i = 0; i < n; ++i) {
    const double u = g.uniform();
    REQUIRE(u > 0.0);
    REQUIRE(u < 1.0);
    su += u;
    const double z = g.normal();
    sn += z;
    sn2 += z * z;
    ++cnt[g.below(7)];
  }
  CHECK(std::abs(su / n - 0.5) < 5.0 * std::sqrt(1.0 / 12.0 / n));
  CHECK(std::abs(sn / n) < 5.0 / std::sqrt(double(n)));
  CHECK(std::abs(sn2 / n - 1.0) < 5.0 * std::sqrt(2.0 / n));
  for (long long c : cnt) CHECK(std::abs(double(c) - n / 7.0) < 5.0 * std::sqrt(n / 7.0));
}

TEST_CASE("compensated sum recovers cancelled low-order bits") {
  CompensatedSum s;
  s.add(1e16);
  for (int i = 0; i < 1000; ++i) s.add(1.0);
  s.add(-1e16);
  CHECK(s.value() == 1000.0);
}

TEST_CASE("linear_fit on exact data") {
  std::vector<double> x = {0, 1, 2, 3, 4}, y;
  for (double v : x) y.push_back(3.0 - 2.0 * v);
  const auto f = linear_fit(x, y);
  CHECK(f.slope == doctest::Approx(-2.0));
  CHECK(f.intercept == doctest::Approx(3.0));
  CHECK(f.slope_se == doctest::Approx(0.0));
}

TEST_CASE("jackknife of equal-weight block means equals the standard error of the mean") {
  std::vector<double> v = {1.0, 2.0, 4.0, 3.0, 5.0, 0.5}, w(6, 1.0);
  CHECK(jackknife_se(v, w) == doctest::Approx(stddev(v) / std::sqrt(6.0)).epsilon(1e-12));
}
