#pragma once
#include <string>
#include <vector>

#include "ishear/fourier.hpp"
#include "ishear/moments.hpp"

namespace ishear::fourier {

struct ProfileOptions {
  GridSpec grid;            // geometry chosen from d when use_default_geometry is set
  bool use_default_geometry = true;
  double temperature = 1.0;  // target second-moment trace of the profile
  double t_max = 0.0;        // 0: 40 / b0
  int time_nodes = 64;
  GainOptions gain;
};

struct ProfileResult {
  CharGrid Phi;
  double beta = 0.0;
  double beta_tilde = 0.0;
  double lambda_scale = 0.0;
  double p = 3.0;
  int iterations = 0;
  bool converged = false;
  std::vector<double> residuals;           // |P Phi_n - Phi_n|_p, n = 0, 1, ...
  std::vector<double> contraction_ratios;  // residual_n / residual_{n-1}
  double theoretical_ratio = 0.0;
  double observed_ratio = 0.0;
  double lambda_p = 0.0;
  double A_norm = 0.0;
  double nu = 0.0;
  double eta = 0.0;
  double tail_bound = 0.0;
  Mat B_profile;
  Mat C_fit;  // second-moment matrix of Phi from the small-k quadratic fit
  std::vector<std::string> warnings;
};

// Everything the fixed-point map needs, fixed once per solve.
class PicardMap {
 public:
  PicardMap(const Mat& A, double beta, const kernel::KernelModel& k, const GridSpec& grid,
            double t_max, int time_nodes, const GainOptions& gain);
  CharGrid apply(const CharGrid& phi) const;
  double b0() const { return b0_; }

 private:
  Mat A_;
  double beta_;
  kernel::KernelModel kernel_;
  GridSpec grid_;
  GainOptions gain_;
  double b0_;
  std::vector<double> weight_;
  std::vector<Mat> pull_;
};

GridSpec default_profile_grid(int d);

// Gaussian characteristic function exp(-1/2 C:k k) on the grid.
CharGrid gaussian_grid(const GridSpec& spec, const Mat& C);

// Second-moment matrix from 1 - Re phi over the given number of smallest shells.
Mat quadratic_fit(const CharGrid& phi, int shells = 8);

double convergence_eta(double lambda_p, double p, double beta, double A_norm, double nu,
                       double zeta);

ProfileResult stationary_profile(const Mat& A, const kernel::KernelModel& k, double p, double tol,
                                 int max_iter, const ProfileOptions& opt = {});

struct RateFit {
  double rate = 0.0;
  bool degenerate = false;
  std::vector<double> distances;
};

// Decay rate of sup_k |phi(t,k) - Phi(lambda k)| / (|k|^p + |k|^2) over uniformly spaced samples.
RateFit convergence_rate_fit(const std::vector<CharGrid>& series, const std::vector<double>& times,
                             const CharGrid& Phi, double lambda_scale, double p);

// Log-log slope of the per-shell maximum of |a - b| over shells with r in [r_lo, r_hi].
double small_k_exponent(const CharGrid& a, const CharGrid& b, double r_lo, double r_hi);

}  // namespace ishear::fourier
