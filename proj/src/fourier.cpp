#include "ishear/fourier.hpp"

#include <cmath>
#include <exception>
#include <mutex>
#include <numbers>

#include "ishear/errors.hpp"
#include "ishear/quadrature.hpp"

namespace ishear::fourier {

std::pair<Vec, Vec> k_plus_minus(const Vec& k, const Vec& sigma, double z) {
  Vec km = 0.5 * z * (k - k.norm() * sigma);
  return {k - km, km};
}

void for_each_node(std::size_t n, Exec exec, const std::function<void(std::size_t)>& f) {
  if (exec == Exec::serial) {
    for (std::size_t i = 0; i < n; ++i) f(i);
    return;
  }
  std::exception_ptr err;
  std::mutex mu;
  const long long nn = static_cast<long long>(n);
#pragma omp parallel for schedule(dynamic, 32)
  for (long long i = 0; i < nn; ++i) {
    try {
      f(std::size_t(i));
    } catch (...) {
      std::lock_guard<std::mutex> lock(mu);
      if (!err) err = std::current_exception();
    }
  }
  if (err) std::rethrow_exception(err);
}

AngularRule angular_rule(const kernel::KernelModel& k, Geometry g, int quad_order) {
  AngularRule rule;
  if (g == Geometry::planar) {
    const int n = 2 * quad_order;
    for (int l = 0; l < n; ++l) {
      const double t = 2.0 * std::numbers::pi * l / n;
      rule.theta.push_back(t);
      rule.weight.push_back(k(std::cos(t)) * 2.0 * std::numbers::pi / n);
    }
  } else {
    auto q = gauss_legendre(quad_order, 0.0, std::numbers::pi);
    const double area = kernel::sphere_area(k.d - 2);
    for (std::size_t l = 0; l < q.size(); ++l) {
      const double t = q.x[l];
      rule.theta.push_back(t);
      rule.weight.push_back(q.w[l] * area * std::pow(std::sin(t), k.d - 2) * k(std::cos(t)));
    }
  }
  for (double w : rule.weight) {
    if (!std::isfinite(w) || w < 0.0) throw InvalidKernelError("kernel must be finite and nonnegative");
    rule.b0 += w;
  }
  return rule;
}

namespace {

void check_geometry(const CharGrid& phi, const kernel::KernelModel& k) {
  if (phi.spec().dim != k.d) throw ConfigError("grid dimension does not match kernel dimension");
}

// Deficit of the gain integral, D(k) = int b (d+ + d- - d+ d-) dsigma, at every node.
// combine(dp, dm) returns the integrand for the given deficits at k+ and k-.
template <class Combine>
CharGrid gain_deficit(const CharGrid& phi, const kernel::KernelModel& k, const GainOptions& opt,
                      const AngularRule& rule,
                      Combine combine) {
  const double z = k.z();
  CharGrid out(phi.spec());
  auto& res = out.deficits();
  const std::size_t L = rule.theta.size();
  std::vector<double> ct(L), st(L);
  for (std::size_t l = 0; l < L; ++l) {
    ct[l] = std::cos(rule.theta[l]);
    st[l] = std::sin(rule.theta[l]);
  }
  const int na = phi.n_angle();
  if (phi.spec().geometry == Geometry::planar) {
    for_each_node(phi.size(), opt.exec, [&](std::size_t idx) {
      const int j = int(idx / na), m = int(idx % na);
      const double r = phi.radius(j), a = phi.angle(m);
      const double ca = std::cos(a), sa = std::sin(a);
      const double kx = r * ca, ky = r * sa;
      cplx D = 0.0;
      for (std::size_t l = 0; l < L; ++l) {
        const double sx = ca * ct[l] - sa * st[l], sy = sa * ct[l] + ca * st[l];
        const double mx = 0.5 * z * (kx - r * sx), my = 0.5 * z * (ky - r * sy);
        D += rule.weight[l] * combine(kx - mx, ky - my, mx, my);
      }
      res[idx] = D;
    });
  } else {
    std::vector<double> fm(L), fp(L);
    for (std::size_t l = 0; l < L; ++l) {
      const double s = std::sin(0.5 * rule.theta[l]), c = std::cos(0.5 * rule.theta[l]);
      fm[l] = z * s;
      fp[l] = std::sqrt(c * c + (1.0 - z) * (1.0 - z) * s * s);
    }
    for_each_node(phi.size(), opt.exec, [&](std::size_t idx) {
      const double r = phi.radius(int(idx));
      cplx D = 0.0;
      for (std::size_t l = 0; l < L; ++l) D += rule.weight[l] * combine(r * fp[l], 0.0, r * fm[l], 0.0);
      res[idx] = D;
    });
  }
  return out;
}

}  // namespace

CharGrid normalized_gain(const CharGrid& phi, const kernel::KernelModel& k, const GainOptions& opt) {
  check_geometry(phi, k);
  const AngularRule rule = angular_rule(k, phi.spec().geometry, opt.quad_order);
  const Interpolant ip(phi, opt.policy);
  const bool planar = phi.spec().geometry == Geometry::planar;
  CharGrid g = gain_deficit(phi, k, opt, rule, [&](double px, double py, double mx, double my) {
    const cplx dp = planar ? ip.deficit_planar(px, py) : ip.deficit_radial(px);
    const cplx dm = planar ? ip.deficit_planar(mx, my) : ip.deficit_radial(mx);
    return dp + dm - dp * dm;
  });
  for (auto& d : g.deficits()) d /= rule.b0;
  return g;
}

CharGrid gain_fourier(const CharGrid& phi, const kernel::KernelModel& k, const GainOptions& opt) {
  const AngularRule rule = angular_rule(k, phi.spec().geometry, opt.quad_order);
  CharGrid g = normalized_gain(phi, k, opt);
  // stored as 1 - Q+ so that value() returns Q+ itself
  for (auto& d : g.deficits()) d = 1.0 - rule.b0 * (1.0 - d);
  return g;
}

CharGrid lipschitz_envelope(const CharGrid& phi, const CharGrid& psi, const kernel::KernelModel& k,
                            const GainOptions& opt) {
  check_geometry(phi, k);
  if (!(phi.spec() == psi.spec())) throw DomainError("grids must share geometry");
  const AngularRule rule = angular_rule(k, phi.spec().geometry, opt.quad_order);
  const Interpolant a(phi, opt.policy), b(psi, opt.policy);
  const bool planar = phi.spec().geometry == Geometry::planar;
  auto diff = [&](double x, double y) -> double {
    return planar ? std::abs(a.deficit_planar(x, y) - b.deficit_planar(x, y))
                  : std::abs(a.deficit_radial(x) - b.deficit_radial(x));
  };
  return gain_deficit(phi, k, opt, rule, [&](double px, double py, double mx, double my) {
    return cplx(diff(px, py) + diff(mx, my), 0.0);
  });
}

ToscaniResult toscani_distance(const CharGrid& phi, const CharGrid& psi, double p) {
  if (!(phi.spec() == psi.spec())) throw DomainError("grids must share geometry");
  ToscaniResult res;
  for (int j = 0; j < phi.n_radial(); ++j) {
    const double w = std::pow(phi.radius(j), -p);
    for (int m = 0; m < phi.n_angle(); ++m) {
      const double v = std::abs(phi.deficit(j, m) - psi.deficit(j, m)) * w;
      if (v > res.distance) res = {v, j, m, phi.radius(j), phi.angle(m)};
    }
  }
  return res;
}

Mat pullback_matrix(const Mat& A, double beta, double s) {
  const int d = static_cast<int>(A.rows());
  return expm(-s * (A + beta * Mat::Identity(d, d)).transpose());
}

namespace {

// Deficit of g at P k for every node k.
void pulled_deficits(const CharGrid& grid, const Interpolant& g, const Mat& P, Exec exec,
                     std::vector<cplx>& out) {
  out.resize(grid.size());
  const int na = grid.n_angle();
  if (grid.spec().geometry == Geometry::planar) {
    const double p00 = P(0, 0), p01 = P(0, 1), p10 = P(1, 0), p11 = P(1, 1);
    for_each_node(grid.size(), exec, [&](std::size_t idx) {
      const int j = int(idx / na), m = int(idx % na);
      const double r = grid.radius(j), a = grid.angle(m);
      const double kx = r * std::cos(a), ky = r * std::sin(a);
      out[idx] = g.deficit_planar(p00 * kx + p01 * ky, p10 * kx + p11 * ky);
    });
  } else {
    const double s = P(0, 0);
    for_each_node(grid.size(), exec,
                  [&](std::size_t idx) { out[idx] = g.deficit_radial(s * grid.radius(int(idx))); });
  }
}

}  // namespace

CharGrid evolve_mild(const CharGrid& phi0, const Mat& A, double beta, const kernel::KernelModel& k,
                     double t_end, double dt, const MildOptions& opt, const Observer& observer) {
  check_geometry(phi0, k);
  const int d = k.d;
  const Mat Az = A.size() ? A : Mat::Zero(d, d);
  const bool radial = phi0.spec().geometry == Geometry::radial;
  if (radial && !Az.isZero(0.0)) throw ConfigError("radial grids require A = 0");
  const AngularRule rule = angular_rule(k, phi0.spec().geometry, opt.gain.quad_order);
  const double b0 = rule.b0;
  if (!(dt > 0.0) || dt * b0 > 0.25) throw ConfigError("evolve_mild needs 0 < dt * b0 <= 0.25");
  const long long nsteps = std::llround(t_end / dt);
  if (t_end < 0.0 || std::abs(double(nsteps) * dt - t_end) > 1e-9 * std::max(1.0, t_end))
    throw ConfigError("t_end must be an integer multiple of dt");

  // Radial pullbacks only need the scalar factor; keep a 1 x 1 "matrix".
  auto pull = [&](double s) -> Mat {
    if (radial) return Mat::Constant(1, 1, std::exp(-s * beta));
    return pullback_matrix(Az, beta, s);
  };
  const auto gl = gauss_legendre(3, 0.0, dt);
  std::vector<double> wq(3), frac(3);
  std::vector<Mat> Ps(3);
  double wsum = 0.0;
  for (int i = 0; i < 3; ++i) {
    wq[i] = gl.w[i] * b0 * std::exp(-b0 * gl.x[i]);
    wsum += wq[i];
    frac[i] = gl.x[i] / dt;  // weight of the older gain
    Ps[i] = pull(gl.x[i]);
  }
  const double target = -std::expm1(-b0 * dt);
  for (double& w : wq) w *= target / wsum;
  const Mat Pdt = pull(dt);
  const double decay = std::exp(-b0 * dt);

  CharGrid phi = phi0;
  if (observer && opt.observe_every > 0) observer(0.0, phi);
  std::vector<cplx> hom, p0, buf;
  for (long long step = 1; step <= nsteps; ++step) {
    const Interpolant ip(phi, opt.gain.policy);
    pulled_deficits(phi, ip, Pdt, opt.gain.exec, hom);
    const CharGrid G0 = normalized_gain(phi, k, opt.gain);
    const Interpolant ig0(G0, opt.gain.policy);
    p0.assign(phi.size(), 0.0);
    std::vector<std::vector<cplx>> g0_at(3);
    for (int i = 0; i < 3; ++i) pulled_deficits(phi, ig0, Ps[i], opt.gain.exec, g0_at[i]);
    for (std::size_t n = 0; n < phi.size(); ++n)
      for (int i = 0; i < 3; ++i) p0[n] += wq[i] * frac[i] * g0_at[i][n];

    CharGrid next(phi.spec());
    auto assemble = [&](const std::vector<std::vector<cplx>>& g1_at) {
      auto& nd = next.deficits();
      for (std::size_t n = 0; n < phi.size(); ++n) {
        cplx v = decay * hom[n] + p0[n];
        for (int i = 0; i < 3; ++i) v += wq[i] * (1.0 - frac[i]) * g1_at[i][n];
        nd[n] = v;
      }
    };
    assemble(g0_at);
    for (int sweep = 0; sweep < opt.inner_sweeps; ++sweep) {
      const CharGrid G1 = normalized_gain(next, k, opt.gain);
      const Interpolant ig1(G1, opt.gain.policy);
      std::vector<std::vector<cplx>> g1_at(3);
      for (int i = 0; i < 3; ++i) pulled_deficits(phi, ig1, Ps[i], opt.gain.exec, g1_at[i]);
      assemble(g1_at);
    }
    for (std::size_t n = 0; n < next.size(); ++n) {
      const double mag = std::abs(1.0 - next.deficits()[n]);
      if (!(mag <= 1.0 + opt.instability_tol))
        throw InstabilityError("|phi| = " + std::to_string(mag) + " exceeds 1 at t = " +
                               std::to_string(double(step) * dt) + "; reduce dt");
    }
    phi = std::move(next);
    if (observer && opt.observe_every > 0 && step % opt.observe_every == 0)
      observer(double(step) * dt, phi);
  }
  return phi;
}

double up_bound(double p, double A_norm, const kernel::KernelModel& k, double t) {
  return std::exp(-t * (kernel::lambda_p(k, p) - p * A_norm));
}

}  // namespace ishear::fourier
