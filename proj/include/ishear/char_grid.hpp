#pragma once
#include <atomic>
#include <complex>
#include <functional>
#include <memory>
#include <vector>

namespace ishear::fourier {

using cplx = std::complex<double>;

// planar: d = 2, nodes r_j (cos a_m, sin a_m) with a_m in [0, pi); the other
// half plane follows from phi(-k) = conj(phi(k)).
// radial: phi depends on |k| only, any d >= 2.
enum class Geometry { planar, radial };

struct GridSpec {
  Geometry geometry = Geometry::planar;
  int dim = 2;
  int n_radial = 128;
  int n_angle = 64;
  double r_min = 1e-3;
  double r_max = 1e2;

  void validate() const;
  bool operator==(const GridSpec&) const = default;
};

// Characteristic function on a grid. The deficit 1 - phi is what is stored,
// so that values near k = 0 keep full relative precision.
class CharGrid {
 public:
  CharGrid() = default;
  explicit CharGrid(const GridSpec& spec);

  // f receives (r, angle) and returns the deficit 1 - phi.
  static CharGrid from_deficit(const GridSpec& spec, const std::function<cplx(double, double)>& f);
  static CharGrid from_value(const GridSpec& spec, const std::function<cplx(double, double)>& f);

  const GridSpec& spec() const { return spec_; }
  int n_radial() const { return spec_.n_radial; }
  int n_angle() const { return spec_.geometry == Geometry::planar ? spec_.n_angle : 1; }
  std::size_t size() const { return deficit_.size(); }

  double radius(int j) const { return r_[j]; }
  double angle(int m) const;
  std::size_t index(int j, int m) const { return std::size_t(j) * n_angle() + m; }

  cplx deficit(int j, int m) const { return deficit_[index(j, m)]; }
  cplx value(int j, int m) const { return 1.0 - deficit_[index(j, m)]; }
  std::vector<cplx>& deficits() { return deficit_; }
  const std::vector<cplx>& deficits() const { return deficit_; }

 private:
  GridSpec spec_;
  std::vector<double> r_;
  std::vector<cplx> deficit_;
};

enum class RangePolicy { clamp, error };

// Off-grid evaluation. Interpolates w = -log(phi) / |k|^2, cubically in log|k|
// (linearly next to the end shells)
// and by trigonometric interpolation over the full circle in angle, with
// -log phi saturated at 36 where phi is below working precision; below
// r_min w is extended linearly in |k|^2 from the two innermost shells, above
// r_max it is held at the outermost shell (or an error is raised).
class Interpolant {
 public:
  explicit Interpolant(const CharGrid& g, RangePolicy policy = RangePolicy::clamp);

  cplx deficit_planar(double kx, double ky) const;
  cplx deficit_radial(double r) const;
  cplx value_planar(double kx, double ky) const { return 1.0 - deficit_planar(kx, ky); }

  long clamped() const { return clamped_->load(); }
  const GridSpec& spec() const { return spec_; }

 private:
  cplx shell_w(int j, cplx e) const;
  cplx w_from(double r, cplx e) const;

  GridSpec spec_;
  RangePolicy policy_;
  double log_r0_, dlog_;
  std::vector<double> r_;
  // per shell: coefficients c_q for q = -Q..Q stored at offset Q
  std::vector<std::vector<cplx>> coeff_;
  std::vector<int> order_;
  // Real w (phi real and even): only even harmonics survive and the sum is
  // evaluated as a real cosine/sine series.
  bool real_ = false;
  std::unique_ptr<std::atomic<long>> clamped_;
};

// Deficit 1 - phi from w with an accurate complex expm1.
cplx deficit_from_w(double r2, cplx w);
// -log(1 - delta) with full relative accuracy for small delta.
cplx neg_log1m(cplx delta);

}  // namespace ishear::fourier
