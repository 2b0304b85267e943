#pragma once
#include <cstdint>
#include <vector>

#include "ishear/execution.hpp"
#include "ishear/kernel.hpp"
#include "ishear/linalg.hpp"
#include "ishear/rng.hpp"
#include "ishear/timeseries.hpp"

namespace ishear::dsmc {

constexpr int kJackknifeBlocks = 20;

// N velocities in R^d stored row-major. With groups > 1 the particles are
// partitioned into contiguous independent sub-systems that only collide
// internally; the partition matches the jackknife blocks when groups == 20.
struct ParticleEnsemble {
  int d = 3;
  std::size_t N = 0;
  int groups = 1;
  std::vector<double> v;
  Philox rng;
  double t = 0.0;

  double* vel(std::size_t i) { return v.data() + i * d; }
  const double* vel(std::size_t i) const { return v.data() + i * d; }
  std::size_t group_begin(int g) const { return N * std::size_t(g) / std::size_t(groups); }

  // Draws v = L xi with L L^T = B0, then removes each group's mean velocity.
  static ParticleEnsemble gaussian(std::size_t N, int d, const Mat& B0, std::uint64_t seed,
                                   std::uint64_t stream, int groups = 1);
};

struct DsmcConfig {
  std::size_t N = 100000;
  Mat A;  // d x d; empty means zero
  kernel::KernelModel kernel;
  Mat B0;  // empty means identity
  double t_end = 10.0;
  double dt = 0.01;
  int sample_every = 10;
  std::uint64_t seed = 24301;
  bool rescale = false;
  double beta = 0.0;  // used when rescale is set
  int groups = 1;
  Exec exec = Exec::parallel;

  void validate(double b0) const;
};

// Inverse-CDF sampler for sigma with density b(e.sigma)/b0.
class SigmaSampler {
 public:
  explicit SigmaSampler(const kernel::KernelModel& k, int nodes = 4096);
  // Writes a unit vector into out (length d).
  void sample(const double* e_hat, Philox& rng, double* out) const;
  double sample_polar(Philox& rng) const;
  int dimension() const { return d_; }

 private:
  int d_;
  std::vector<double> theta_, cdf_;
};

void advect(ParticleEnsemble& ens, const Mat& A, double dt, Exec exec = Exec::parallel);
// Applies a precomputed propagator v <- E v.
void apply_linear_map(ParticleEnsemble& ens, const Mat& E, Exec exec = Exec::parallel);

void collide_pair(double* v, double* v_star, const double* sigma, double z, int d);

struct CollisionLog {
  long long collisions = 0;
  double energy_change = 0.0;            // sum of |v'|^2 + |v*'|^2 - |v|^2 - |v*|^2
  double max_identity_error = 0.0;       // vs -z(1-z)|u|^2 (1 - cos theta)
};

long long collision_step(ParticleEnsemble& ens, const SigmaSampler& sampler, double z, double b0,
                         double dt, CollisionLog* log = nullptr);

struct MomentSample {
  double T = 0, T_err = 0;
  Mat B, B_err;
  double m4 = 0, m4_err = 0;
  Vec mean;
};

MomentSample measure_moments(const ParticleEnsemble& ens, Exec exec = Exec::parallel);

// Column layout: t, T, T_err, B11, B12, ..., m4, B11_err, ..., m4_err.
std::vector<std::string> series_columns(int d);

TimeSeries run(const DsmcConfig& cfg, std::uint64_t stream = 0);
std::vector<TimeSeries> run_replicas(const DsmcConfig& cfg, int replicas,
                                     Exec exec = Exec::parallel);

}  // namespace ishear::dsmc
