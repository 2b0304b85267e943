#pragma once
#include <array>
#include <string>
#include <vector>

#include "ishear/kernel.hpp"
#include "ishear/linalg.hpp"

namespace ishear::moments {

using kernel::KernelConstants;

struct MomentState {
  Mat B;
  double t = 0.0;
  double temperature() const { return B.trace(); }
};

struct SelfSimilarParams {
  double beta = 0.0;
  double beta_tilde = 0.0;
  Mat B_profile;  // trace 1
  double nu = 0.0;
};

// Uniform shear A = alpha E_12 in dimension d.
Mat usf_shear(int d, double alpha);

// M with dB/dt = -M vec(B) in the orthonormal symmetric basis.
Mat build_moment_operator(const Mat& A, const KernelConstants& kc, double beta);

// Applies (2 beta + zeta + c~) B + A B + B A^T - (c~/d) tr(B) I.
Mat apply_moment_operator(const Mat& B, const Mat& A, const KernelConstants& kc, double beta);

MomentState evolve_second_moment(const MomentState& B0, const Mat& A, const KernelConstants& kc,
                                 double beta, double t);
// Classical RK4 on the matrix ODE; independent of the exponential path.
MomentState evolve_second_moment_rk4(const MomentState& B0, const Mat& A,
                                     const KernelConstants& kc, double beta, double t,
                                     double h = 1e-3);

SelfSimilarParams find_beta(const Mat& A, const KernelConstants& kc);

// ---- uniform shear flow closed forms ----

struct UsfSpectrum {
  double gamma = 0.0;
  double sigma = 0.0;
  double omega = 0.0;
  double Theta = 0.0;
};

struct TemperatureCoeffs {
  double c0 = 0.0, r = 0.0, m = 0.0;
};

UsfSpectrum usf_spectrum(double alpha, const KernelConstants& kc);

// bt (4 bt + 2 c~)^2 - 2 z^2 c11 alpha^2, divided by the scale of its terms.
double usf_cubic_residual(double beta_tilde, double alpha, const KernelConstants& kc);
double usf_cubic(double beta_tilde, double alpha, const KernelConstants& kc);

struct UsfProfile {
  Mat B;
  Vec eigenvalues;  // ascending
};
UsfProfile usf_profile_matrix(double alpha, const KernelConstants& kc, double trace);

// Closed-form extreme eigenvalues (Lambda_1, Lambda_d) at trace d (1 + 2 gamma / c~).
std::pair<double, double> usf_profile_extreme_eigenvalues(double alpha, const KernelConstants& kc);

TemperatureCoeffs usf_temperature_coeffs(const MomentState& B0, double alpha,
                                         const KernelConstants& kc);

// T(t) reconstructed from the three temperature modes, in the frame scaled by beta.
double usf_temperature(const TemperatureCoeffs& c, const UsfSpectrum& s,
                       const KernelConstants& kc, double beta, double t);

enum class Trend { grows, decays, converges };
std::string to_string(Trend t);

struct Classification {
  Trend trend;
  double rate;
};
Classification classify_temperature(double alpha, const KernelConstants& kc);

Mat R_matrix(const Mat& W, const Mat& A, const KernelConstants& kc, double beta_tilde);
bool check_R_positive(const Mat& W, const Mat& A, const KernelConstants& kc, double beta_tilde);

struct ObstructionReport {
  double alpha = 0.0;
  double beta_tilde = 0.0;
  Eigen::Matrix4d S;
  // label ("M1", "M23", "M1234", ...) and value, for all 15 principal minors of -S
  std::vector<std::pair<std::string, double>> minors;
  double det = 0.0;
  bool neg_S_psd = false;
  double minor(const std::string& label) const;
};
ObstructionReport check_2d_usf_obstruction(double alpha, const KernelConstants& kc);

}  // namespace ishear::moments
