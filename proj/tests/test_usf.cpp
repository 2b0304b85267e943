#include <doctest.h>

#include <cmath>
#include <random>

#include "ishear/moments.hpp"

using namespace ishear;
using namespace ishear::moments;
using kernel::KernelModel;

namespace {

KernelConstants iso(int d, double z) { return kernel::derive_constants(KernelModel::isotropic(d, z)); }

double cubic(double bt, double alpha, const KernelConstants& kc) {
  return bt * std::pow(4 * bt + 2 * kc.c_tilde, 2) - 2 * kc.z * kc.z * kc.c11 * alpha * alpha;
}

}  // namespace

TEST_CASE("gamma at the critical shear is zeta/2 for d = 3, z = 3/4") {
  const auto kc = iso(3, 0.75);
  const auto s = usf_spectrum(0.46875, kc);
  CHECK(s.gamma == doctest::Approx(0.09375).epsilon(1e-12));
  // both sides of the cubic equal 0.0823974609375 there
  CHECK(s.gamma * std::pow(4 * s.gamma + kc.z * kc.z * 3 * kc.c11, 2) ==
        doctest::Approx(0.0823974609375).epsilon(1e-12));
  CHECK(2 * kc.z * kc.z * kc.c11 * 0.46875 * 0.46875 == doctest::Approx(0.0823974609375).epsilon(1e-14));
}

TEST_CASE("gamma is the unique real root of the cubic and lies in its bracket") {
  const auto kc = iso(3, 0.8);
  for (double alpha : {0.01, 0.2, 1.0, 7.0}) {
    const auto s = usf_spectrum(alpha, kc);
    CHECK(s.gamma > 0.0);
    CHECK(s.gamma <= alpha / (2 * std::sqrt(2.0 * 3)) * (1 + 1e-12));
    CHECK(std::abs(usf_cubic_residual(s.gamma, alpha, kc)) < 1e-12);
    int changes = 0;
    double prev = cubic(0.0, alpha, kc);
    for (int i = 1; i <= 1000; ++i) {
      const double v = cubic(alpha * i / 1000.0, alpha, kc);
      if ((v > 0) != (prev > 0)) ++changes;
      prev = v;
    }
    CHECK(changes == 1);
  }
}

TEST_CASE("spectrum relations: gamma + 2 sigma = -c~ and sigma < -c~/2") {
  const auto kc = iso(3, 0.7);
  for (double alpha : {1e-3, 0.1, 1.0, 50.0}) {
    const auto s = usf_spectrum(alpha, kc);
    CHECK(std::abs(s.gamma + 2 * s.sigma + kc.c_tilde) <= 1e-12 * kc.c_tilde);
    CHECK(s.sigma < -kc.c_tilde / 2);
    CHECK(s.omega > 0.0);
  }
  const auto s0 = usf_spectrum(0.0, kc);
  CHECK(s0.gamma == 0.0);
  CHECK(s0.Theta == 0.0);
}

TEST_CASE("small-alpha asymptotics keep full precision") {
  // gamma ~ (z^2 c11 / (2 c~^2)) alpha^2 as alpha -> 0, from the cubic
  const auto kc = iso(3, 0.75);
  const double alpha = 1e-7;
  const double lead = kc.z * kc.z * kc.c11 * alpha * alpha / (2 * kc.c_tilde * kc.c_tilde);
  CHECK(usf_spectrum(alpha, kc).gamma == doctest::Approx(lead).epsilon(1e-6));
}

TEST_CASE("profile matrix eigenvalues") {
  const auto kc = iso(3, 0.75);
  for (double alpha : {0.01, 0.5, 3.0}) {
    const double gamma = usf_spectrum(alpha, kc).gamma;
    const double q = 3 * gamma / kc.c_tilde;
    const auto p = usf_profile_matrix(alpha, kc, 3 * (1 + 2 * gamma / kc.c_tilde));
    CHECK(p.eigenvalues(2) == doctest::Approx(1 + q + std::sqrt(q * (1 + q))).epsilon(1e-12));
    CHECK(p.eigenvalues(0) == doctest::Approx(1 + q - std::sqrt(q * (1 + q))).epsilon(1e-12));
    CHECK(p.eigenvalues(1) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(1 / p.eigenvalues(0) + 1 / p.eigenvalues(2) == doctest::Approx(2.0).epsilon(1e-12));
  }
  const auto tiny = usf_profile_matrix(1e-9, kc, 3.0);
  CHECK((tiny.B - Mat::Identity(3, 3)).norm() < 1e-6);
}

TEST_CASE("temperature coefficients") {
  const auto kc = iso(3, 0.75);
  std::mt19937_64 g(5);
  for (double alpha : {0.2, 0.46875, 1.5}) {
    const double gamma = usf_spectrum(alpha, kc).gamma;
    const double tr = 3 * (1 + 2 * gamma / kc.c_tilde);
    const MomentState prof{usf_profile_matrix(alpha, kc, tr).B, 0.0};
    const auto c = usf_temperature_coeffs(prof, alpha, kc);
    CHECK(c.c0 == doctest::Approx(tr).epsilon(1e-10));
    CHECK(std::abs(c.r) < 1e-10);
    CHECK(std::abs(c.m) < 1e-10);

    std::normal_distribution<double> n;
    Mat G(3, 3);
    for (int i = 0; i < 9; ++i) G(i) = n(g);
    const MomentState B0{G * G.transpose(), 0.0};
    const auto cg = usf_temperature_coeffs(B0, alpha, kc);
    CHECK(cg.c0 + 2 * cg.r == doctest::Approx(B0.B.trace()).epsilon(1e-10));
    const auto s = usf_spectrum(alpha, kc);
    for (double t : {0.0, 1.0, 4.0, 10.0}) {
      const double ode = evolve_second_moment(B0, usf_shear(3, alpha), kc, 0.0, t).B.trace();
      CHECK(std::abs(usf_temperature(cg, s, kc, 0.0, t) - ode) <= 1e-6 * B0.B.trace());
    }
  }
}

TEST_CASE("classification and rates around the critical shear") {
  const auto kc = iso(3, 0.75);
  const auto at = classify_temperature(kc.alpha0, kc);
  CHECK(at.trend == Trend::converges);
  CHECK(at.rate >= kc.c_tilde);
  const auto zero = classify_temperature(0.0, kc);
  CHECK(zero.trend == Trend::decays);
  CHECK(zero.rate == doctest::Approx(kc.zeta));
  const auto hi = classify_temperature(2 * kc.alpha0, kc);
  CHECK(hi.trend == Trend::grows);
  CHECK(hi.rate == doctest::Approx(2 * usf_spectrum(2 * kc.alpha0, kc).gamma - kc.zeta));
  CHECK(classify_temperature(0.5 * kc.alpha0, kc).trend == Trend::decays);
  // verdicts agree with the sign of the log-trace slope at t = 50
  for (double a : {0.5 * kc.alpha0, 2 * kc.alpha0}) {
    const Mat A = usf_shear(3, a);
    const MomentState B0{Mat::Identity(3, 3), 0.0};
    const double s = std::log(evolve_second_moment(B0, A, kc, 0.0, 51).B.trace() /
                              evolve_second_moment(B0, A, kc, 0.0, 49).B.trace()) / 2;
    CHECK((s > 0) == (classify_temperature(a, kc).trend == Trend::grows));
  }
}

TEST_CASE("R(W) positivity") {
  const auto kc = iso(2, 0.8);
  CHECK_FALSE(check_R_positive(Mat::Zero(2, 2), Mat::Zero(2, 2), kc, 0.1));
  CHECK(check_R_positive(Mat::Identity(2, 2), Mat::Zero(2, 2), kc, 0.1));
  const double alpha = 0.6;
  const double bt = usf_spectrum(alpha, kc).gamma;
  const Mat A = usf_shear(2, alpha);
  std::mt19937_64 g(9);
  std::normal_distribution<double> n;
  int positive = 0;
  for (int i = 0; i < 10000; ++i) {
    Mat W(2, 2);
    W << n(g), n(g), 0, n(g);
    W(1, 0) = W(0, 1);
    positive += check_R_positive(W, A, kc, bt);
  }
  CHECK(positive == 0);
}

TEST_CASE("2-D USF obstruction minors") {
  const auto kc = iso(2, 0.75);
  const auto rep = check_2d_usf_obstruction(0.8, kc);
  CHECK(rep.minors.size() == 15);
  CHECK(std::abs(rep.minor("M23")) < 1e-12);
  for (const char* l : {"M123", "M124", "M134", "M234"}) CHECK(std::abs(rep.minor(l)) < 1e-12);
  CHECK(std::abs(rep.det) < 1e-12);
  CHECK(rep.neg_S_psd);
  CHECK((rep.S - rep.S.transpose()).norm() == 0.0);
}
