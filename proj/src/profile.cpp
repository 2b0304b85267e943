#include "ishear/profile.hpp"

#include <cmath>
#include <sstream>

#include "ishear/errors.hpp"
#include "ishear/quadrature.hpp"
#include "ishear/stats.hpp"

namespace ishear::fourier {

GridSpec default_profile_grid(int d) {
  GridSpec g;
  g.dim = d;
  g.geometry = d == 2 ? Geometry::planar : Geometry::radial;
  return g;
}

CharGrid gaussian_grid(const GridSpec& spec, const Mat& C) {
  if (spec.geometry == Geometry::radial) {
    const double c = C.trace() / C.rows();
    return CharGrid::from_deficit(spec, [c](double r, double) { return cplx(-std::expm1(-0.5 * c * r * r)); });
  }
  return CharGrid::from_deficit(spec, [&C](double r, double a) {
    const double x = std::cos(a), y = std::sin(a);
    const double q = C(0, 0) * x * x + 2.0 * C(0, 1) * x * y + C(1, 1) * y * y;
    return cplx(-std::expm1(-0.5 * q * r * r));
  });
}

Mat quadratic_fit(const CharGrid& phi, int shells) {
  const int d = phi.spec().dim;
  shells = std::min(shells, phi.n_radial());
  // (1 - Re phi)/r^2 = (1/2) C:e e + r^2 (quartic form in e) + O(r^4); fitting
  // the quartic term as well removes the O(r^2) bias from C.
  if (phi.spec().geometry == Geometry::radial) {
    std::vector<double> x, y;
    for (int j = 0; j < shells; ++j) {
      const double r = phi.radius(j);
      x.push_back(r * r);
      y.push_back(2.0 * phi.deficit(j, 0).real() / (r * r));
    }
    return linear_fit(x, y).intercept * Mat::Identity(d, d);
  }
  Eigen::MatrixXd M(shells * phi.n_angle(), 8);
  Eigen::VectorXd rhs(shells * phi.n_angle());
  int row = 0;
  for (int j = 0; j < shells; ++j) {
    const double r = phi.radius(j), r2 = r * r;
    for (int m = 0; m < phi.n_angle(); ++m, ++row) {
      const double x = std::cos(phi.angle(m)), y = std::sin(phi.angle(m));
      M.row(row) << 0.5 * x * x, x * y, 0.5 * y * y, r2 * x * x * x * x, r2 * x * x * x * y,
          r2 * x * x * y * y, r2 * x * y * y * y, r2 * y * y * y * y;
      rhs(row) = phi.deficit(j, m).real() / r2;
    }
  }
  const Eigen::VectorXd c = M.colPivHouseholderQr().solve(rhs);
  Mat C(2, 2);
  C << c(0), c(1), c(1), c(2);
  return C;
}

double convergence_eta(double lambda_p, double p, double beta, double A_norm, double nu,
                       double zeta) {
  return 0.5 * std::min(lambda_p + p * (beta - A_norm), nu + zeta + 2.0 * (beta - A_norm));
}

PicardMap::PicardMap(const Mat& A, double beta, const kernel::KernelModel& k, const GridSpec& grid,
                     double t_max, int time_nodes, const GainOptions& gain)
    : A_(A), beta_(beta), kernel_(k), grid_(grid), gain_(gain) {
  b0_ = angular_rule(k, grid.geometry, gain.quad_order).b0;
  const auto q = gauss_legendre(time_nodes, 0.0, t_max);
  double sum = 0.0;
  for (std::size_t i = 0; i < q.size(); ++i) {
    weight_.push_back(q.w[i] * b0_ * std::exp(-b0_ * q.x[i]));
    sum += weight_.back();
    if (grid.geometry == Geometry::radial) pull_.push_back(Mat::Constant(1, 1, std::exp(-beta * q.x[i])));
    else pull_.push_back(pullback_matrix(A, beta, q.x[i]));
  }
  // The tail beyond t_max carries mass exp(-b0 t_max); folding it into the
  // weights keeps phi = 1 an exact fixed point.
  for (double& w : weight_) w /= sum;
}

CharGrid PicardMap::apply(const CharGrid& phi) const {
  const CharGrid G = normalized_gain(phi, kernel_, gain_);
  const Interpolant ig(G, gain_.policy);
  CharGrid out(phi.spec());
  auto& res = out.deficits();
  const int na = phi.n_angle();
  const std::size_t nt = weight_.size();
  if (phi.spec().geometry == Geometry::planar) {
    for_each_node(phi.size(), gain_.exec, [&](std::size_t idx) {
      const int j = int(idx / na), m = int(idx % na);
      const double r = phi.radius(j), a = phi.angle(m);
      const double kx = r * std::cos(a), ky = r * std::sin(a);
      cplx s = 0.0;
      for (std::size_t i = 0; i < nt; ++i) {
        const Mat& P = pull_[i];
        s += weight_[i] * ig.deficit_planar(P(0, 0) * kx + P(0, 1) * ky, P(1, 0) * kx + P(1, 1) * ky);
      }
      res[idx] = s;
    });
  } else {
    for_each_node(phi.size(), gain_.exec, [&](std::size_t idx) {
      const double r = phi.radius(int(idx));
      cplx s = 0.0;
      for (std::size_t i = 0; i < nt; ++i) s += weight_[i] * ig.deficit_radial(pull_[i](0, 0) * r);
      res[idx] = s;
    });
  }
  return out;
}

ProfileResult stationary_profile(const Mat& A_in, const kernel::KernelModel& k, double p, double tol,
                                 int max_iter, const ProfileOptions& opt) {
  if (!(p > 2.0 && p <= 4.0)) throw DomainError("profile order p must lie in (2, 4]");
  if (!(tol > 0.0) || max_iter < 1) throw ConfigError("need tol > 0 and max_iter >= 1");
  const int d = k.d;
  const Mat A = A_in.size() ? A_in : Mat::Zero(d, d);
  const auto kc = kernel::derive_constants(k);
  const auto ss = moments::find_beta(A, kc);

  ProfileResult res;
  res.p = p;
  res.beta = ss.beta;
  res.beta_tilde = ss.beta_tilde;
  res.B_profile = ss.B_profile;
  res.nu = ss.nu;
  res.A_norm = spectral_norm(A);
  res.lambda_p = kernel::lambda_p(k, p);
  const double den = kc.b0 + p * (res.beta - res.A_norm);
  res.theoretical_ratio = (kc.b0 - res.lambda_p) / den;
  if (!(den > 0.0) || !(res.theoretical_ratio < 1.0)) {
    std::ostringstream os;
    os << "outside the contraction regime: (b0 - lambda_p)/(b0 + p(beta - |A|)) = "
       << res.theoretical_ratio;
    throw OutsideContractionError(os.str(), res.theoretical_ratio);
  }
  res.eta = convergence_eta(res.lambda_p, p, res.beta, res.A_norm, res.nu, kc.zeta);

  GridSpec grid = opt.use_default_geometry ? default_profile_grid(d) : opt.grid;
  if (opt.use_default_geometry) {
    grid.n_radial = opt.grid.n_radial;
    grid.n_angle = opt.grid.n_angle;
    grid.r_min = opt.grid.r_min;
    grid.r_max = opt.grid.r_max;
  }
  grid.dim = d;
  grid.validate();
  if (grid.geometry == Geometry::radial && !A.isZero(0.0))
    throw ConfigError("radial profiles require A = 0; sheared profiles need d = 2");

  const double t_max = opt.t_max > 0.0 ? opt.t_max : 40.0 / kc.b0;
  res.tail_bound = std::exp(-kc.b0 * t_max);
  const PicardMap P(A, res.beta, k, grid, t_max, opt.time_nodes, opt.gain);

  CharGrid cur = gaussian_grid(grid, opt.temperature * ss.B_profile);
  for (int n = 0; n < max_iter; ++n) {
    CharGrid next = P.apply(cur);
    const double r = toscani_distance(next, cur, p).distance;
    res.residuals.push_back(r);
    if (n > 0) res.contraction_ratios.push_back(r / res.residuals[n - 1]);
    cur = std::move(next);
    res.iterations = n + 1;
    if (r < tol) {
      res.converged = true;
      break;
    }
  }
  // ratios from iteration 3 on; contraction_ratios[i] belongs to iteration i + 1
  for (std::size_t i = 2; i < res.contraction_ratios.size(); ++i)
    res.observed_ratio = std::max(res.observed_ratio, res.contraction_ratios[i]);
  if (res.contraction_ratios.size() <= 2)
    for (double c : res.contraction_ratios) res.observed_ratio = std::max(res.observed_ratio, c);
  for (std::size_t i = 4; i < res.contraction_ratios.size(); ++i)
    if (res.contraction_ratios[i] > 1.0) {
      res.warnings.push_back("residuals non-monotone after iteration 5: discretization-dominated");
      break;
    }

  res.Phi = std::move(cur);
  res.C_fit = quadratic_fit(res.Phi);
  res.lambda_scale = std::sqrt(std::max(0.0, res.C_fit.trace() / res.B_profile.trace()));
  return res;
}

RateFit convergence_rate_fit(const std::vector<CharGrid>& series, const std::vector<double>& times,
                             const CharGrid& Phi, double lambda_scale, double p) {
  if (series.size() < 4 || times.size() != series.size())
    throw DomainError("convergence_rate_fit needs at least 4 samples with matching times");
  const Interpolant ip(Phi);
  const bool planar = Phi.spec().geometry == Geometry::planar;
  RateFit fit;
  std::vector<double> t, logd;
  for (std::size_t s = 0; s < series.size(); ++s) {
    const CharGrid& g = series[s];
    // same nodes and no rescaling: compare stored values, no interpolation roundoff
    const bool on_nodes = lambda_scale == 1.0 && g.spec() == Phi.spec();
    double dist = 0.0;
    for (int j = 0; j < g.n_radial(); ++j) {
      const double r = g.radius(j);
      const double w = 1.0 / (std::pow(r, p) + r * r);
      for (int m = 0; m < g.n_angle(); ++m) {
        const double a = g.angle(m);
        const cplx ref = on_nodes ? Phi.deficit(j, m)
                         : planar ? ip.deficit_planar(lambda_scale * r * std::cos(a),
                                                    lambda_scale * r * std::sin(a))
                                : ip.deficit_radial(lambda_scale * r);
        dist = std::max(dist, std::abs(g.deficit(j, m) - ref) * w);
      }
    }
    fit.distances.push_back(dist);
    if (dist > 0.0) {
      t.push_back(times[s]);
      logd.push_back(std::log(dist));
    }
  }
  if (t.size() < 2) {
    fit.degenerate = true;
    fit.rate = std::numeric_limits<double>::infinity();
    return fit;
  }
  fit.rate = -linear_fit(t, logd).slope;
  return fit;
}

double small_k_exponent(const CharGrid& a, const CharGrid& b, double r_lo, double r_hi) {
  std::vector<double> x, y;
  for (int j = 0; j < a.n_radial(); ++j) {
    const double r = a.radius(j);
    if (r < r_lo || r > r_hi) continue;
    double e = 0.0;
    for (int m = 0; m < a.n_angle(); ++m) e = std::max(e, std::abs(a.deficit(j, m) - b.deficit(j, m)));
    if (e > 0.0) {
      x.push_back(std::log(r));
      y.push_back(std::log(e));
    }
  }
  if (x.size() < 2) throw DomainError("small_k_exponent: not enough shells with nonzero difference");
  return linear_fit(x, y).slope;
}

}  // namespace ishear::fourier
