#pragma once
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "ishear/char_grid.hpp"
#include "ishear/execution.hpp"
#include "ishear/kernel.hpp"
#include "ishear/linalg.hpp"

namespace ishear::fourier {

// k- = (z/2)(k - |k| sigma), k+ = k - k-.
std::pair<Vec, Vec> k_plus_minus(const Vec& k, const Vec& sigma, double z);

struct GainOptions {
  int quad_order = 48;  // Gauss-Legendre nodes in theta for radial grids; planar uses 2x this
  RangePolicy policy = RangePolicy::clamp;
  Exec exec = Exec::parallel;
};

// Angular rule used by the gain operator: nodes theta_l with weights that
// already include b(cos theta_l) and the sphere measure.
struct AngularRule {
  std::vector<double> theta, weight;
  double b0 = 0.0;  // sum of weights
};
AngularRule angular_rule(const kernel::KernelModel& k, Geometry g, int quad_order);

// Q+(phi, phi) at every node.
CharGrid gain_fourier(const CharGrid& phi, const kernel::KernelModel& k,
                      const GainOptions& opt = {});
// Same, divided by b0, so that the result is again a characteristic function.
CharGrid normalized_gain(const CharGrid& phi, const kernel::KernelModel& k,
                         const GainOptions& opt = {});

// int b (|phi - psi|(k+) + |phi - psi|(k-)) dsigma at every node (real part used).
CharGrid lipschitz_envelope(const CharGrid& phi, const CharGrid& psi, const kernel::KernelModel& k,
                            const GainOptions& opt = {});

struct ToscaniResult {
  double distance = 0.0;
  int j = 0, m = 0;  // maximizing node
  double r = 0.0, angle = 0.0;
};
ToscaniResult toscani_distance(const CharGrid& phi, const CharGrid& psi, double p);

struct MildOptions {
  int inner_sweeps = 2;
  GainOptions gain;
  double instability_tol = 1e-6;
  int observe_every = 0;  // steps between observer calls (0: never)
};

using Observer = std::function<void(double t, const CharGrid& phi)>;

CharGrid evolve_mild(const CharGrid& phi0, const Mat& A, double beta, const kernel::KernelModel& k,
                     double t_end, double dt, const MildOptions& opt = {},
                     const Observer& observer = {});

double up_bound(double p, double A_norm, const kernel::KernelModel& k, double t);

// Helpers shared with the profile solver.
Mat pullback_matrix(const Mat& A, double beta, double s);
void for_each_node(std::size_t n, Exec exec, const std::function<void(std::size_t)>& f);

}  // namespace ishear::fourier
