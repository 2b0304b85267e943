#include "ishear/char_grid.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "ishear/errors.hpp"

namespace ishear::fourier {

void GridSpec::validate() const {
  if (geometry == Geometry::planar && dim != 2)
    throw ConfigError("the anisotropic planar grid is only available for d = 2");
  if (dim < 2) throw ConfigError("grid dimension must be >= 2");
  if (n_radial < 4) throw ConfigError("need at least 4 radial shells");
  if (geometry == Geometry::planar && n_angle < 4) throw ConfigError("need at least 4 angles");
  if (!(r_min > 0.0) || !(r_max > r_min)) throw ConfigError("need 0 < r_min < r_max");
}

CharGrid::CharGrid(const GridSpec& spec) : spec_(spec) {
  spec_.validate();
  r_.resize(spec_.n_radial);
  const double dl = std::log(spec_.r_max / spec_.r_min) / (spec_.n_radial - 1);
  for (int j = 0; j < spec_.n_radial; ++j) r_[j] = spec_.r_min * std::exp(j * dl);
  r_.back() = spec_.r_max;
  deficit_.assign(std::size_t(spec_.n_radial) * n_angle(), cplx(0.0));
}

double CharGrid::angle(int m) const {
  return spec_.geometry == Geometry::planar ? std::numbers::pi * m / spec_.n_angle : 0.0;
}

CharGrid CharGrid::from_deficit(const GridSpec& spec, const std::function<cplx(double, double)>& f) {
  CharGrid g(spec);
  for (int j = 0; j < g.n_radial(); ++j)
    for (int m = 0; m < g.n_angle(); ++m) g.deficit_[g.index(j, m)] = f(g.radius(j), g.angle(m));
  return g;
}

CharGrid CharGrid::from_value(const GridSpec& spec, const std::function<cplx(double, double)>& f) {
  return from_deficit(spec, [&](double r, double a) { return 1.0 - f(r, a); });
}

cplx neg_log1m(cplx delta) {
  const double dr = delta.real(), di = delta.imag();
  const double a = 1.0 - dr;
  const double mod2 = a * a + di * di;
  double logmod;
  if (mod2 < 0.5) logmod = 0.5 * std::log(std::max(mod2, 1e-300));
  else logmod = 0.5 * std::log1p(-2.0 * dr + dr * dr + di * di);
  return -cplx(logmod, std::atan2(-di, a));
}

cplx deficit_from_w(double r2, cplx w) {
  // |phi| <= 1; a negative Re w can only come from interpolation ringing
  const double xr = -r2 * std::max(w.real(), 0.0), xi = -r2 * w.imag();
  const double sh = std::sin(0.5 * xi);
  const double re = std::expm1(xr) * std::cos(xi) - 2.0 * sh * sh;
  const double im = std::exp(xr) * std::sin(xi);
  return -cplx(re, im);
}

namespace {

// Near |phi| ~ 1e-16 the stored deficit no longer resolves phi, so -log phi
// is saturated there.
constexpr double kLogFloor = 36.0;

cplx node_log(cplx delta) {
  const cplx l = neg_log1m(delta);
  if (l.real() > kLogFloor) return cplx(kLogFloor, 0.0);
  return l;
}

}  // namespace

Interpolant::Interpolant(const CharGrid& g, RangePolicy policy)
    : spec_(g.spec()), policy_(policy), clamped_(std::make_unique<std::atomic<long>>(0)) {
  const int nr = g.n_radial();
  r_.resize(nr);
  for (int j = 0; j < nr; ++j) r_[j] = g.radius(j);
  log_r0_ = std::log(r_[0]);
  dlog_ = std::log(spec_.r_max / spec_.r_min) / (nr - 1);
  coeff_.resize(nr);
  order_.assign(nr, 0);

  if (spec_.geometry == Geometry::radial) {
    for (int j = 0; j < nr; ++j) {
      const double r = r_[j];
      coeff_[j] = {node_log(g.deficit(j, 0)) / (r * r)};
    }
    return;
  }

  const int n = g.n_angle();
  const int full = 2 * n;
  std::vector<cplx> w(full);
  // twiddles e^{-i 2 pi k / full}
  std::vector<cplx> tw(full);
  for (int k = 0; k < full; ++k) tw[k] = std::polar(1.0, -2.0 * std::numbers::pi * k / full);
  std::vector<cplx> c(2 * n + 1);

  double wmax = 0.0, imax = 0.0;
  for (int j = 0; j < nr; ++j)
    for (int m = 0; m < n; ++m) {
      const cplx wv = node_log(g.deficit(j, m));
      wmax = std::max(wmax, std::abs(wv));
      imax = std::max(imax, std::abs(wv.imag()));
    }
  real_ = imax <= 1e-13 * wmax;

  for (int j = 0; j < nr; ++j) {
    const double r2 = r_[j] * r_[j];
    for (int m = 0; m < n; ++m) {
      w[m] = node_log(g.deficit(j, m)) / r2;
      if (real_) w[m] = w[m].real();
      w[m + n] = std::conj(w[m]);
    }
    double cmax = 0.0;
    for (int q = -n; q <= n; ++q) {
      cplx s = 0.0;
      for (int m = 0; m < full; ++m) {
        int k = ((q * m) % full + full) % full;
        s += w[m] * tw[k];
      }
      s /= double(full);
      if (q == -n || q == n) s *= 0.5;  // Nyquist split evenly between +-n
      c[q + n] = s;
      cmax = std::max(cmax, std::abs(s));
    }
    int Q = 0;
    for (int q = n; q > 0; --q)
      if (std::abs(c[n + q]) > 1e-15 * cmax || std::abs(c[n - q]) > 1e-15 * cmax) {
        Q = q;
        break;
      }
    order_[j] = Q;
    coeff_[j].assign(c.begin() + (n - Q), c.begin() + (n + Q + 1));
  }
}

cplx Interpolant::shell_w(int j, cplx e) const {
  const auto& c = coeff_[j];
  const int Q = order_[j];
  if (real_) {
    // w = c_0 + 2 Re sum_{q even > 0} c_q e^{i q theta}
    const cplx e2 = e * e;
    double s = c[Q].real();
    double pr = 1.0, pi = 0.0;
    for (int q = 2; q <= Q; q += 2) {
      const double nr = pr * e2.real() - pi * e2.imag();
      pi = pr * e2.imag() + pi * e2.real();
      pr = nr;
      s += 2.0 * (c[Q + q].real() * pr - c[Q + q].imag() * pi);
    }
    return s;
  }
  cplx s = c[Q];
  cplx ep = 1.0;
  const cplx em_base = std::conj(e);
  cplx em = 1.0;
  for (int q = 1; q <= Q; ++q) {
    ep *= e;
    em *= em_base;
    s += c[Q + q] * ep + c[Q - q] * em;
  }
  return s;
}

cplx Interpolant::w_from(double r, cplx e) const {
  const int nr = static_cast<int>(r_.size());
  if (r <= r_[0]) {
    const cplx w0 = shell_w(0, e), w1 = shell_w(1, e);
    const double r0 = r_[0] * r_[0], r1 = r_[1] * r_[1];
    return w0 + (w1 - w0) * ((r * r - r0) / (r1 - r0));
  }
  if (r >= r_[nr - 1]) {
    if (r > r_[nr - 1] * (1.0 + 1e-12)) {
      if (policy_ == RangePolicy::error)
        throw InterpolationRangeError("interpolation at |k| = " + std::to_string(r) +
                                      " above r_max = " + std::to_string(spec_.r_max));
      clamped_->fetch_add(1, std::memory_order_relaxed);
    }
    return shell_w(nr - 1, e);
  }
  const double x = (std::log(r) - log_r0_) / dlog_;
  int j = std::clamp(static_cast<int>(std::floor(x)), 0, nr - 2);
  const double f = x - j;
  if (j == 0 || j + 2 > nr - 1) return (1.0 - f) * shell_w(j, e) + f * shell_w(j + 1, e);
  // Four-point Lagrange in log r. Linear interpolation would smear the
  // profile by O(h) per unit time under repeated semi-Lagrangian pullbacks.
  const double wm = -f * (f - 1.0) * (f - 2.0) / 6.0, w0 = (f + 1.0) * (f - 1.0) * (f - 2.0) / 2.0,
               w1 = -(f + 1.0) * f * (f - 2.0) / 2.0, w2 = (f + 1.0) * f * (f - 1.0) / 6.0;
  return wm * shell_w(j - 1, e) + w0 * shell_w(j, e) + w1 * shell_w(j + 1, e) + w2 * shell_w(j + 2, e);
}

cplx Interpolant::deficit_planar(double kx, double ky) const {
  const double r2 = kx * kx + ky * ky;
  if (r2 == 0.0) return 0.0;
  const double r = std::sqrt(r2);
  return deficit_from_w(r2, w_from(r, cplx(kx / r, ky / r)));
}

cplx Interpolant::deficit_radial(double r) const {
  if (r == 0.0) return 0.0;
  return deficit_from_w(r * r, w_from(std::abs(r), cplx(1.0, 0.0)));
}

}  // namespace ishear::fourier
