#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>

#include "ishear/dsmc.hpp"
#include "ishear/errors.hpp"
#include "ishear/moments.hpp"
#include "ishear/stats.hpp"

using namespace ishear;
using namespace ishear::dsmc;
using kernel::KernelModel;

namespace {

Vec total_momentum(const ParticleEnsemble& e) {
  Vec m = Vec::Zero(e.d);
  for (int a = 0; a < e.d; ++a) {
    CompensatedSum s;
    for (std::size_t i = 0; i < e.N; ++i) s.add(e.vel(i)[a]);
    m(a) = s.value();
  }
  return m;
}

double energy(const ParticleEnsemble& e) {
  CompensatedSum s;
  for (double x : e.v) s.add(x * x);
  return s.value();
}

}  // namespace

TEST_CASE("advection is exact for nilpotent shear and trivial for A = 0") {
  auto e = ParticleEnsemble::gaussian(1000, 3, Mat::Identity(3, 3), 1, 0);
  const auto before = e.v;
  advect(e, Mat::Zero(3, 3), 0.3);
  CHECK(e.v == before);
  const double alpha = 0.7, dt = 0.05;
  advect(e, moments::usf_shear(3, alpha), dt, Exec::serial);
  for (std::size_t i = 0; i < e.N; ++i) {
    CHECK(e.vel(i)[0] == doctest::Approx(before[3 * i] - alpha * dt * before[3 * i + 1]).epsilon(1e-14));
    CHECK(e.vel(i)[1] == before[3 * i + 1]);
    CHECK(e.vel(i)[2] == before[3 * i + 2]);
  }
  Mat A = Mat::Random(3, 3);
  CHECK(expm(-0.4 * A).determinant() == doctest::Approx(std::exp(-0.4 * A.trace())).epsilon(1e-12));
}

TEST_CASE("serial and parallel advection are bit-identical") {
  auto a = ParticleEnsemble::gaussian(5000, 3, Mat::Identity(3, 3), 2, 0);
  auto b = a;
  Mat A = Mat::Random(3, 3) * 0.3;
  advect(a, A, 0.1, Exec::serial);
  advect(b, A, 0.1, Exec::parallel);
  CHECK(a.v == b.v);
  auto c = ParticleEnsemble::gaussian(5000, 2, Mat::Identity(2, 2), 2, 0);
  auto d = c;
  const Mat A2 = Mat::Random(2, 2);
  advect(c, A2, 0.1, Exec::serial);
  advect(d, A2, 0.1, Exec::parallel);
  CHECK(c.v == d.v);
}

TEST_CASE("collide_pair conserves momentum and obeys the energy identity") {
  Philox rng(3);
  for (int d : {2, 3}) {
    SigmaSampler s(KernelModel::isotropic(d, 0.7));
    for (int it = 0; it < 1000; ++it) {
      double v[3], w[3], e[3], sg[3];
      double u2 = 0.0;
      for (int a = 0; a < d; ++a) {
        v[a] = rng.normal();
        w[a] = rng.normal();
        e[a] = v[a] - w[a];
        u2 += e[a] * e[a];
      }
      for (int a = 0; a < d; ++a) e[a] /= std::sqrt(u2);
      s.sample(e, rng, sg);
      double P[3], E0 = 0.0, cth = 0.0;
      for (int a = 0; a < d; ++a) {
        P[a] = v[a] + w[a];
        E0 += v[a] * v[a] + w[a] * w[a];
        cth += e[a] * sg[a];
      }
      collide_pair(v, w, sg, 0.7, d);
      double E1 = 0.0;
      for (int a = 0; a < d; ++a) {
        CHECK(v[a] + w[a] == doctest::Approx(P[a]).epsilon(1e-14));
        E1 += v[a] * v[a] + w[a] * w[a];
      }
      CHECK(E1 - E0 == doctest::Approx(-0.7 * 0.3 * u2 * (1 - cth)).epsilon(1e-10));
      CHECK(E1 - E0 <= 1e-12);
    }
  }
  double v[3] = {1.0, 2.0, -1.0}, w[3] = {0.5, -1.0, 2.0};
  const double u = std::sqrt(0.25 + 9 + 9);
  const double sg[3] = {0.5 / u, 3.0 / u, -3.0 / u};
  collide_pair(v, w, sg, 1.0, 3);
  CHECK(v[0] == doctest::Approx(1.0));
  CHECK(v[1] == doctest::Approx(2.0));
  CHECK(w[2] == doctest::Approx(2.0));
}

TEST_CASE("sigma sampler moments") {
  const auto k = KernelModel::series(3, 0.8, {0.05, 0.04, 0.03});
  const auto kc = kernel::derive_constants(k);
  SigmaSampler s(k);
  Philox rng(4);
  const double e[3] = {0.6, 0.0, 0.8};
  const int n = 400000;
  double m1[3] = {}, m2[3][3] = {};
  double sg[3];
  for (int i = 0; i < n; ++i) {
    s.sample(e, rng, sg);
    CHECK(sg[0] * sg[0] + sg[1] * sg[1] + sg[2] * sg[2] == doctest::Approx(1.0).epsilon(1e-12));
    for (int a = 0; a < 3; ++a) {
      m1[a] += sg[a] / n;
      for (int b = 0; b < 3; ++b) m2[a][b] += sg[a] * sg[b] / n;
    }
  }
  const double tol = 5.0 / std::sqrt(double(n));
  for (int a = 0; a < 3; ++a) {
    CHECK(std::abs(m1[a] - kc.b1 / kc.b0 * e[a]) < tol);
    for (int b = 0; b < 3; ++b) {
      const double expect = ((kc.b0 - 3 * kc.c11) * e[a] * e[b] + kc.c11 * (a == b)) / kc.b0;
      CHECK(std::abs(m2[a][b] - expect) < tol);
    }
  }
}

TEST_CASE("isotropic sampler is uniform on the sphere (Kolmogorov-Smirnov on cos theta)") {
  SigmaSampler s(KernelModel::isotropic(3, 0.8));
  Philox rng(6);
  const int n = 1000000;
  std::vector<double> c(n);
  for (int i = 0; i < n; ++i) c[i] = std::cos(s.sample_polar(rng));
  std::sort(c.begin(), c.end());
  double D = 0.0;
  for (int i = 0; i < n; ++i) {
    const double F = 0.5 * (c[i] + 1.0);
    D = std::max({D, std::abs(F - double(i) / n), std::abs(F - double(i + 1) / n)});
  }
  // critical value for p = 0.01
  CHECK(D * std::sqrt(double(n)) < 1.628);
}

TEST_CASE("collision counts and conservation over many steps") {
  const auto k = KernelModel::isotropic(3, 0.75);
  SigmaSampler s(k);
  auto e = ParticleEnsemble::gaussian(2000, 3, Mat::Identity(3, 3), 7, 0);
  const Vec P0 = total_momentum(e);
  const double dt = 0.05;
  long long total = 0;
  CollisionLog log;
  for (int step = 0; step < 1000; ++step) total += collision_step(e, s, 0.75, 1.0, dt, &log);
  const double mean = double(e.N - 1) * dt / 2 * 1000;
  CHECK(std::abs(double(total) - mean) < 3 * std::sqrt(mean));
  // per particle and unit time: b0 (N - 1)/N
  CHECK(2.0 * total / (e.N * dt * 1000) == doctest::Approx(double(e.N - 1) / e.N).epsilon(3 * 2 / std::sqrt(mean)));
  CHECK((total_momentum(e) - P0).norm() < 1e-10);
  CHECK(log.max_identity_error < 1e-12);
  CHECK(log.collisions == total);
}

TEST_CASE("elastic collisions conserve energy exactly per collision") {
  const auto k = KernelModel::isotropic(3, 1.0);
  SigmaSampler s(k);
  auto e = ParticleEnsemble::gaussian(1000, 3, Mat::Identity(3, 3), 8, 0);
  const double E0 = energy(e);
  CollisionLog log;
  while (log.collisions < 10000) collision_step(e, s, 1.0, 1.0, 0.5, &log);
  CHECK(std::abs(energy(e) - E0) <= 1e-10 * E0);
  CHECK(log.max_identity_error < 1e-12);
}

TEST_CASE("measure_moments on paired and Gaussian ensembles") {
  ParticleEnsemble e;
  e.d = 2;
  e.N = 100;
  e.v.resize(200);
  for (std::size_t i = 0; i < 100; ++i) {
    const double sg = i % 2 ? -1.0 : 1.0;
    e.v[2 * i] = sg * 0.3;
    e.v[2 * i + 1] = sg * -1.2;
  }
  const auto m = measure_moments(e);
  CHECK(m.B(0, 0) == doctest::Approx(0.09));
  CHECK(m.B(0, 1) == doctest::Approx(-0.36));
  CHECK(m.B(1, 1) == doctest::Approx(1.44));
  CHECK(m.T == doctest::Approx(1.53));
  CHECK(m.mean.norm() == 0.0);

  const auto g = ParticleEnsemble::gaussian(1000000, 3, Mat::Identity(3, 3), 9, 0);
  const auto mg = measure_moments(g);
  CHECK(mg.mean.norm() < 1e-15);
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j) CHECK(std::abs(mg.B(i, j) - (i == j)) < 3 * mg.B_err(i, j));
  const auto ms = measure_moments(g, Exec::serial);
  CHECK(ms.T == mg.T);
  CHECK(ms.T_err == mg.T_err);
}

TEST_CASE("runs are deterministic and momentum follows the shear") {
  DsmcConfig cfg;
  cfg.N = 5000;
  cfg.kernel = KernelModel::isotropic(3, 0.75);
  cfg.A = moments::usf_shear(3, 0.4);
  cfg.t_end = 2.0;
  cfg.dt = 0.02;
  cfg.sample_every = 10;
  const auto a = run(cfg, 3), b = run(cfg, 3);
  CHECK(a.rows() == b.rows());
  DsmcConfig ser = cfg;
  ser.exec = Exec::serial;
  CHECK(run(ser, 3).rows() == a.rows());
  CHECK(run(cfg, 4).rows() != a.rows());

  // a shifted mean is carried along by exp(-t A), collisions leave it alone
  auto e = ParticleEnsemble::gaussian(3000, 3, Mat::Identity(3, 3), 11, 0);
  for (std::size_t i = 0; i < e.N; ++i) e.vel(i)[1] += 1.0;
  const Vec m0 = total_momentum(e) / double(e.N);
  SigmaSampler s(cfg.kernel);
  const Mat Eh = expm(-0.01 * cfg.A);
  for (int step = 0; step < 100; ++step) {
    apply_linear_map(e, Eh);
    collision_step(e, s, 0.75, 1.0, 0.02);
    apply_linear_map(e, Eh);
  }
  const Vec m1 = total_momentum(e) / double(e.N);
  CHECK((m1 - expm(-2.0 * cfg.A) * m0).norm() < 1e-12);
}

TEST_CASE("Haff law and the self-similar frame at moderate N") {
  DsmcConfig cfg;
  cfg.N = 20000;
  cfg.kernel = KernelModel::isotropic(3, 0.75);
  const auto kc = kernel::derive_constants(cfg.kernel);
  cfg.groups = kJackknifeBlocks;
  cfg.dt = 0.05;
  cfg.t_end = 20.0;
  cfg.sample_every = 100;
  const auto ts = run(cfg);
  for (const auto& row : ts.rows()) {
    const double expect = 3.0 * std::exp(-kc.zeta * row[0]);
    CHECK(std::abs(row[1] - expect) < 3.0 * row[2] + 0.002 * expect);
  }
  // rescaled by beta = -zeta/2 the temperature stays at its initial value
  cfg.rescale = true;
  cfg.beta = moments::find_beta(Mat::Zero(3, 3), kc).beta;
  cfg.t_end = 40.0 / kc.c_tilde;
  cfg.dt = cfg.t_end / 2844;
  cfg.sample_every = 2844 / 4;
  const auto rs = run(cfg, 1);
  for (const auto& row : rs.rows()) {
    if (row[0] < 20.0 / kc.c_tilde) continue;
    CHECK(std::abs(row[1] - 3.0) < 3.0 * row[2] + 0.002 * 3.0);
  }
}

TEST_CASE("configuration errors") {
  DsmcConfig cfg;
  cfg.kernel = KernelModel::isotropic(3, 0.75);
  cfg.dt = 0.6;
  CHECK_THROWS_AS(run(cfg), ConfigError);
  cfg.dt = 0.03;
  cfg.t_end = 1.0;
  CHECK_THROWS_AS(run(cfg), ConfigError);
  CHECK_THROWS_AS(ParticleEnsemble::gaussian(1, 3, Mat::Identity(3, 3), 0, 0), ConfigError);
}
