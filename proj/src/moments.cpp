#include "ishear/moments.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>

#include "ishear/errors.hpp"

namespace ishear::moments {

Mat usf_shear(int d, double alpha) {
  Mat A = Mat::Zero(d, d);
  A(0, 1) = alpha;
  return A;
}

Mat apply_moment_operator(const Mat& B, const Mat& A, const KernelConstants& kc, double beta) {
  const int d = static_cast<int>(B.rows());
  Mat out = (2.0 * beta + kc.zeta + kc.c_tilde) * B + A * B + B * A.transpose();
  out.diagonal().array() -= kc.c_tilde / d * B.trace();
  return out;
}

Mat build_moment_operator(const Mat& A, const KernelConstants& kc, double beta) {
  const int d = static_cast<int>(A.rows());
  if (A.cols() != d || d != kc.d) throw DomainError("shear matrix must be d x d");
  SymBasis basis(d);
  Mat M(basis.dim, basis.dim);
  for (int k = 0; k < basis.dim; ++k)
    M.col(k) = basis.vec(apply_moment_operator(basis.element(k), A, kc, beta));
  return M;
}

namespace {

double max_growth_rate(const Mat& M) {
  Eigen::EigenSolver<Mat> es(M, false);
  double g = -std::numeric_limits<double>::infinity();
  for (int i = 0; i < es.eigenvalues().size(); ++i) g = std::max(g, -es.eigenvalues()(i).real());
  return g;
}

void check_finite(const Mat& B, const Mat& M, double t) {
  if (!B.allFinite() || B.cwiseAbs().maxCoeff() > 1e300) {
    double g = max_growth_rate(M);
    throw OverflowError("second-moment evolution overflowed at t = " + std::to_string(t) +
                            " (growth rate " + std::to_string(g) + ")",
                        g);
  }
}

}  // namespace

MomentState evolve_second_moment(const MomentState& B0, const Mat& A, const KernelConstants& kc,
                                 double beta, double t) {
  if (t < 0.0) throw DomainError("evolve_second_moment: t must be >= 0");
  SymBasis basis(kc.d);
  Mat M = build_moment_operator(A, kc, beta);
  Mat E = expm(-t * M);
  MomentState out{basis.mat(E * basis.vec(B0.B)), B0.t + t};
  check_finite(out.B, M, out.t);
  return out;
}

MomentState evolve_second_moment_rk4(const MomentState& B0, const Mat& A,
                                     const KernelConstants& kc, double beta, double t,
                                     double h) {
  if (t < 0.0) throw DomainError("evolve_second_moment_rk4: t must be >= 0");
  auto f = [&](const Mat& B) -> Mat { return -apply_moment_operator(B, A, kc, beta); };
  Mat B = B0.B;
  long steps = std::max(1L, static_cast<long>(std::ceil(t / h - 1e-9)));
  double dt = t / steps;
  for (long s = 0; s < steps; ++s) {
    Mat k1 = f(B);
    Mat k2 = f(B + 0.5 * dt * k1);
    Mat k3 = f(B + 0.5 * dt * k2);
    Mat k4 = f(B + dt * k3);
    B += dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
  }
  MomentState out{B, B0.t + t};
  check_finite(out.B, build_moment_operator(A, kc, beta), out.t);
  return out;
}

SelfSimilarParams find_beta(const Mat& A, const KernelConstants& kc) {
  SymBasis basis(kc.d);
  Mat K = build_moment_operator(A, kc, 0.0);
  Eigen::EigenSolver<Mat> es(K);
  const auto& mu = es.eigenvalues();
  const auto& V = es.eigenvectors();
  const int n = static_cast<int>(mu.size());

  std::vector<int> order(n);
  for (int i = 0; i < n; ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](int a, int b) { return mu(a).real() < mu(b).real(); });

  for (int idx : order) {
    std::complex<double> m = mu(idx);
    if (std::abs(m.imag()) > 1e-10 * std::max(1.0, std::abs(m))) continue;
    Eigen::VectorXcd v = V.col(idx);
    int jmax = 0;
    v.cwiseAbs().maxCoeff(&jmax);
    std::complex<double> phase = std::conj(v(jmax)) / std::abs(v(jmax));
    Vec vr = (v * phase).real();
    Mat B = basis.mat(vr);
    B = 0.5 * (B + B.transpose());
    if (B.trace() < 0.0) B = -B;
    if (!(B.trace() > 0.0)) continue;
    double scale = B.norm();
    if (min_sym_eigenvalue(B) < -1e-10 * scale) continue;

    SelfSimilarParams out;
    out.beta = -0.5 * m.real();
    out.beta_tilde = out.beta + 0.5 * kc.zeta;
    out.B_profile = B / B.trace();
    double gap = std::numeric_limits<double>::infinity();
    for (int j = 0; j < n; ++j)
      if (j != idx) gap = std::min(gap, mu(j).real() - m.real());
    out.nu = std::isfinite(gap) ? gap : 0.0;
    return out;
  }
  throw NoProfileError("no eigen-rate of the second-moment operator admits a PSD eigenvector");
}

}  // namespace ishear::moments
