#include <cmath>
#include <limits>

#include "ishear/errors.hpp"
#include "ishear/moments.hpp"

namespace ishear::moments {

namespace {

// arcosh(1 + x) without the cancellation of the naive formula near x = 0.
double arcosh1p(double x) { return std::log1p(x + std::sqrt(x * (2.0 + x))); }

}  // namespace

UsfSpectrum usf_spectrum(double alpha, const KernelConstants& kc) {
  if (alpha < 0.0) throw DomainError("usf_spectrum: alpha must be >= 0");
  const double ct = kc.c_tilde;
  const double q = alpha / ct;
  UsfSpectrum s;
  s.Theta = arcosh1p(27.0 * q * q / kc.d) / 3.0;
  const double sh = std::sinh(0.5 * s.Theta);
  s.gamma = 2.0 * ct / 3.0 * sh * sh;
  s.sigma = -ct / 6.0 * (2.0 + std::cosh(s.Theta));
  s.omega = ct / (2.0 * std::sqrt(3.0)) * std::sinh(s.Theta);
  return s;
}

double usf_cubic(double bt, double alpha, const KernelConstants& kc) {
  const double lhs = bt * (4.0 * bt + 2.0 * kc.c_tilde) * (4.0 * bt + 2.0 * kc.c_tilde);
  return lhs - 2.0 * kc.z * kc.z * kc.c11 * alpha * alpha;
}

double usf_cubic_residual(double bt, double alpha, const KernelConstants& kc) {
  const double lhs = bt * (4.0 * bt + 2.0 * kc.c_tilde) * (4.0 * bt + 2.0 * kc.c_tilde);
  const double rhs = 2.0 * kc.z * kc.z * kc.c11 * alpha * alpha;
  const double scale = std::max(std::abs(lhs), std::abs(rhs));
  return scale == 0.0 ? 0.0 : (lhs - rhs) / scale;
}

UsfProfile usf_profile_matrix(double alpha, const KernelConstants& kc, double trace) {
  const int d = kc.d;
  const double g = usf_spectrum(alpha, kc).gamma;
  const double q = d * g / kc.c_tilde;
  Mat B = Mat::Identity(d, d);
  B(0, 1) = B(1, 0) = -std::sqrt(q);
  B(0, 0) += 2.0 * q;
  B *= trace / (d * (1.0 + 2.0 * g / kc.c_tilde));
  Eigen::SelfAdjointEigenSolver<Mat> es(B, Eigen::EigenvaluesOnly);
  return {B, es.eigenvalues()};
}

std::pair<double, double> usf_profile_extreme_eigenvalues(double alpha, const KernelConstants& kc) {
  const double q = kc.d * usf_spectrum(alpha, kc).gamma / kc.c_tilde;
  const double root = std::sqrt(q * (1.0 + q));
  return {1.0 + q + root, 1.0 + q - root};
}

TemperatureCoeffs usf_temperature_coeffs(const MomentState& B0, double alpha,
                                         const KernelConstants& kc) {
  if (!(alpha > 0.0)) throw DomainError("temperature coefficients need alpha > 0");
  const int d = kc.d;
  const double ct = kc.c_tilde;
  const UsfSpectrum s = usf_spectrum(alpha, kc);
  const double g = s.gamma, sg = s.sigma, w = s.omega;
  const double T0 = B0.B.trace(), b12 = B0.B(0, 1), b22 = B0.B(1, 1);
  const double a2 = alpha * alpha;
  const double pref = 2.0 * d / (ct * ct * a2) / std::sqrt(27.0 + 2.0 * d * ct * ct / a2);
  const double X = ct * g - 8.0 * w * w;
  const double y = 2.0 * sg - g;
  TemperatureCoeffs c;
  c.c0 = pref * (4.0 * ct * w * (sg * sg + w * w) * T0 + 2.0 * ct * alpha * w * y * b12 +
                 2.0 * ct * a2 * w * b22);
  c.r = pref * (-2.0 / 3.0 * ct * w * X * T0 - ct * alpha * w * y * b12 - ct * a2 * w * b22);
  c.m = pref * (ct * ct * X / 6.0 * T0 - 0.5 * ct * alpha * X * b12 +
                0.5 * ct * a2 * (ct + 3.0 * g) * b22);
  return c;
}

double usf_temperature(const TemperatureCoeffs& c, const UsfSpectrum& s, const KernelConstants& kc,
                       double beta, double t) {
  const double main = c.c0 * std::exp((2.0 * s.gamma - kc.zeta) * t);
  const double osc = std::exp((2.0 * s.sigma - kc.zeta) * t) *
                     (2.0 * c.r * std::cos(2.0 * s.omega * t) - 2.0 * c.m * std::sin(2.0 * s.omega * t));
  return std::exp(-2.0 * beta * t) * (main + osc);
}

std::string to_string(Trend t) {
  switch (t) {
    case Trend::grows: return "grows";
    case Trend::decays: return "decays";
    case Trend::converges: return "converges";
  }
  return "?";
}

Classification classify_temperature(double alpha, const KernelConstants& kc) {
  const UsfSpectrum s = usf_spectrum(alpha, kc);
  if (std::abs(alpha - kc.alpha0) <= 1e-12 * std::max(1.0, kc.alpha0))
    return {Trend::converges, kc.zeta - 2.0 * s.sigma};
  if (alpha > kc.alpha0) return {Trend::grows, 2.0 * s.gamma - kc.zeta};
  return {Trend::decays, kc.zeta - 2.0 * s.gamma};
}

Mat R_matrix(const Mat& W, const Mat& A, const KernelConstants& kc, double beta_tilde) {
  const int d = static_cast<int>(W.rows());
  Mat Ab = A + beta_tilde * Mat::Identity(d, d);
  Mat R = Ab.transpose() * W + W * Ab + kc.c_tilde * W;
  R.diagonal().array() -= kc.c_tilde * W.trace() / d;
  return R;
}

bool check_R_positive(const Mat& W, const Mat& A, const KernelConstants& kc, double beta_tilde) {
  return min_sym_eigenvalue(R_matrix(W, A, kc, beta_tilde)) > 0.0;
}

double ObstructionReport::minor(const std::string& label) const {
  for (const auto& [k, v] : minors)
    if (k == label) return v;
  throw DomainError("no minor labelled " + label);
}

ObstructionReport check_2d_usf_obstruction(double alpha, const KernelConstants& kc) {
  if (kc.d != 2) throw DomainError("the obstruction matrix is defined for d = 2 only");
  ObstructionReport rep;
  rep.alpha = alpha;
  const double a = alpha, c = kc.c_tilde;
  const double b = usf_spectrum(alpha, kc).gamma;
  rep.beta_tilde = b;
  const double p = c * (4.0 * b + c) / 4.0;
  const double q = (2.0 * b + c) * (2.0 * b + c) / 4.0;
  const double e = a * c / 4.0;
  const double f = 2.0 * b * b + p;
  Eigen::Matrix4d& S = rep.S;
  S << -a * a - p, -e, -e, f,
       -e, -q, -q, -e,
       -e, -q, -q, -e,
       f, -e, -e, -p;

  using MatL = Eigen::Matrix<long double, Eigen::Dynamic, Eigen::Dynamic>;
  rep.neg_S_psd = true;
  for (int mask = 1; mask < 16; ++mask) {
    std::vector<int> idx;
    std::string label = "M";
    for (int i = 0; i < 4; ++i)
      if (mask & (1 << i)) {
        idx.push_back(i);
        label += char('1' + i);
      }
    const int n = static_cast<int>(idx.size());
    MatL sub(n, n);
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j) sub(i, j) = -static_cast<long double>(S(idx[i], idx[j]));
    double v = static_cast<double>(sub.determinant());
    rep.minors.emplace_back(label, v);
    if (v < -1e-12) rep.neg_S_psd = false;
  }
  // order minors by size then lexicographically, as conventionally listed
  std::stable_sort(rep.minors.begin(), rep.minors.end(),
                   [](const auto& x, const auto& y) {
                     return x.first.size() != y.first.size() ? x.first.size() < y.first.size()
                                                             : x.first < y.first;
                   });
  rep.det = rep.minor("M1234");
  return rep;
}

}  // namespace ishear::moments
