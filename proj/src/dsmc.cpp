#include "ishear/dsmc.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <numbers>
#include <random>

#include "ishear/errors.hpp"
#include "ishear/stats.hpp"

namespace ishear::dsmc {

ParticleEnsemble ParticleEnsemble::gaussian(std::size_t N, int d, const Mat& B0,
                                            std::uint64_t seed, std::uint64_t stream,
                                            int groups) {
  if (N < 2) throw ConfigError("ensemble needs N >= 2");
  if (groups < 1 || N / std::size_t(groups) < 2) throw ConfigError("each group needs >= 2 particles");
  ParticleEnsemble e;
  e.d = d;
  e.N = N;
  e.groups = groups;
  e.rng = Philox(seed, stream);
  e.v.resize(N * d);
  Eigen::LLT<Mat> llt(B0);
  Mat L;
  if (llt.info() == Eigen::Success) {
    L = llt.matrixL();
  } else {
    // semidefinite B0: fall back to a symmetric square root
    Eigen::SelfAdjointEigenSolver<Mat> es(B0);
    L = es.eigenvectors() * es.eigenvalues().cwiseMax(0.0).cwiseSqrt().asDiagonal() *
        es.eigenvectors().transpose();
  }
  Vec xi(d);
  for (std::size_t i = 0; i < N; ++i) {
    for (int a = 0; a < d; ++a) xi(a) = e.rng.normal();
    Vec w = L * xi;
    for (int a = 0; a < d; ++a) e.v[i * d + a] = w(a);
  }
  for (int g = 0; g < groups; ++g) {
    std::size_t lo = e.group_begin(g), hi = e.group_begin(g + 1);
    for (int a = 0; a < d; ++a) {
      CompensatedSum s;
      for (std::size_t i = lo; i < hi; ++i) s.add(e.v[i * d + a]);
      double m = s.value() / double(hi - lo);
      for (std::size_t i = lo; i < hi; ++i) e.v[i * d + a] -= m;
    }
  }
  return e;
}

void DsmcConfig::validate(double b0) const {
  if (N < 2) throw ConfigError("N must be >= 2");
  if (!(dt > 0.0)) throw ConfigError("dt must be positive");
  if (dt * b0 > 0.5) throw ConfigError("dt * b0 must not exceed 0.5");
  if (!(t_end > 0.0)) throw ConfigError("t_end must be positive");
  if (sample_every < 1) throw ConfigError("sample_every must be >= 1");
  if (groups < 1) throw ConfigError("groups must be >= 1");
  if (A.size() != 0 && (A.rows() != kernel.d || A.cols() != kernel.d))
    throw ConfigError("shear matrix must be d x d");
  if (B0.size() != 0 && (B0.rows() != kernel.d || B0.cols() != kernel.d))
    throw ConfigError("initial second-moment matrix must be d x d");
}

SigmaSampler::SigmaSampler(const kernel::KernelModel& k, int nodes) : d_(k.d) {
  theta_.resize(nodes);
  cdf_.resize(nodes);
  std::vector<double> dens(nodes);
  for (int i = 0; i < nodes; ++i) {
    theta_[i] = std::numbers::pi * i / (nodes - 1);
    dens[i] = k(std::cos(theta_[i])) * std::pow(std::sin(theta_[i]), d_ - 2);
    if (!(dens[i] >= 0.0) || !std::isfinite(dens[i]))
      throw InvalidKernelError("kernel must be finite and nonnegative");
  }
  cdf_[0] = 0.0;
  for (int i = 1; i < nodes; ++i)
    cdf_[i] = cdf_[i - 1] + 0.5 * (dens[i] + dens[i - 1]) * (theta_[i] - theta_[i - 1]);
  const double total = cdf_.back();
  if (!(total > 0.0)) throw DegenerateKernelError("kernel integrates to zero");
  for (double& c : cdf_) c /= total;
}

double SigmaSampler::sample_polar(Philox& rng) const {
  const double u = rng.uniform();
  auto it = std::upper_bound(cdf_.begin(), cdf_.end(), u);
  std::size_t j = std::clamp<std::size_t>(std::size_t(it - cdf_.begin()), 1, cdf_.size() - 1);
  const double c0 = cdf_[j - 1], c1 = cdf_[j];
  const double f = c1 > c0 ? (u - c0) / (c1 - c0) : 0.5;
  return theta_[j - 1] + f * (theta_[j] - theta_[j - 1]);
}

void SigmaSampler::sample(const double* e, Philox& rng, double* out) const {
  const double th = sample_polar(rng);
  double g[16];
  double w2 = 0.0;
  do {
    double dot = 0.0;
    for (int a = 0; a < d_; ++a) {
      g[a] = rng.normal();
      dot += g[a] * e[a];
    }
    w2 = 0.0;
    for (int a = 0; a < d_; ++a) {
      g[a] -= dot * e[a];
      w2 += g[a] * g[a];
    }
  } while (w2 < 1e-24);
  const double inv = 1.0 / std::sqrt(w2);
  const double c = std::cos(th), s = std::sin(th);
  for (int a = 0; a < d_; ++a) out[a] = c * e[a] + s * g[a] * inv;
}

namespace {

bool is_identity(const Mat& E) {
  return E.isIdentity(0.0);
}

template <int D>
void apply_fixed(ParticleEnsemble& ens, const Mat& Em, bool parallel);

void apply_serial(ParticleEnsemble& ens, const Mat& E) {
  switch (ens.d) {
    case 2: apply_fixed<2>(ens, E, false); return;
    case 3: apply_fixed<3>(ens, E, false); return;
    default: break;
  }
  const int d = ens.d;
  std::vector<double> tmp(d);
  for (std::size_t i = 0; i < ens.N; ++i) {
    double* v = ens.vel(i);
    for (int a = 0; a < d; ++a) {
      double s = 0.0;
      for (int b = 0; b < d; ++b) s += E(a, b) * v[b];
      tmp[a] = s;
    }
    for (int a = 0; a < d; ++a) v[a] = tmp[a];
  }
}

template <int D>
void apply_fixed(ParticleEnsemble& ens, const Mat& Em, bool parallel) {
  double E[D][D];
  for (int a = 0; a < D; ++a)
    for (int b = 0; b < D; ++b) E[a][b] = Em(a, b);
  double* data = ens.v.data();
  const long long n = static_cast<long long>(ens.N);
#pragma omp parallel for schedule(static) if (parallel)
  for (long long i = 0; i < n; ++i) {
    double* v = data + i * D;
    double tmp[D];
    for (int a = 0; a < D; ++a) {
      double s = 0.0;
      for (int b = 0; b < D; ++b) s += E[a][b] * v[b];
      tmp[a] = s;
    }
    for (int a = 0; a < D; ++a) v[a] = tmp[a];
  }
}

void apply_parallel(ParticleEnsemble& ens, const Mat& E) {
  switch (ens.d) {
    case 2: apply_fixed<2>(ens, E, true); return;
    case 3: apply_fixed<3>(ens, E, true); return;
    default: break;
  }
  const int d = ens.d;
  const long long n = static_cast<long long>(ens.N);
#pragma omp parallel
  {
    std::vector<double> tmp(d);
#pragma omp for schedule(static)
    for (long long i = 0; i < n; ++i) {
      double* v = ens.vel(std::size_t(i));
      for (int a = 0; a < d; ++a) {
        double s = 0.0;
        for (int b = 0; b < d; ++b) s += E(a, b) * v[b];
        tmp[a] = s;
      }
      for (int a = 0; a < d; ++a) v[a] = tmp[a];
    }
  }
}

}  // namespace

void apply_linear_map(ParticleEnsemble& ens, const Mat& E, Exec exec) {
  if (is_identity(E)) return;
  if (exec == Exec::serial) apply_serial(ens, E);
  else apply_parallel(ens, E);
}

void advect(ParticleEnsemble& ens, const Mat& A, double dt, Exec exec) {
  if (dt < 0.0) throw DomainError("advect: dt must be >= 0");
  apply_linear_map(ens, expm(-dt * A), exec);
}

void collide_pair(double* v, double* w, const double* sigma, double z, int d) {
  double u2 = 0.0;
  for (int a = 0; a < d; ++a) u2 += (v[a] - w[a]) * (v[a] - w[a]);
  const double un = std::sqrt(u2);
  for (int a = 0; a < d; ++a) {
    const double V = 0.5 * (v[a] + w[a]);
    const double h = 0.5 * (1.0 - z) * (v[a] - w[a]) + 0.5 * z * un * sigma[a];
    v[a] = V + h;
    w[a] = V - h;
  }
}

long long collision_step(ParticleEnsemble& ens, const SigmaSampler& sampler, double z, double b0,
                         double dt, CollisionLog* log) {
  const int d = ens.d;
  double e[16], sg[16];
  long long total = 0;
  for (int g = 0; g < ens.groups; ++g) {
    const std::size_t lo = ens.group_begin(g), n = ens.group_begin(g + 1) - lo;
    std::poisson_distribution<long long> pois(double(n - 1) * b0 * dt / 2.0);
    const long long count = pois(ens.rng);
    for (long long c = 0; c < count; ++c) {
      std::size_t i = ens.rng.below(n);
      std::size_t j = ens.rng.below(n - 1);
      if (j >= i) ++j;
      double* v = ens.vel(lo + i);
      double* w = ens.vel(lo + j);
      double u2 = 0.0;
      for (int a = 0; a < d; ++a) {
        e[a] = v[a] - w[a];
        u2 += e[a] * e[a];
      }
      if (u2 == 0.0) continue;
      const double inv = 1.0 / std::sqrt(u2);
      for (int a = 0; a < d; ++a) e[a] *= inv;
      sampler.sample(e, ens.rng, sg);
      if (log) {
        double before = 0.0, cth = 0.0;
        for (int a = 0; a < d; ++a) {
          before += v[a] * v[a] + w[a] * w[a];
          cth += e[a] * sg[a];
        }
        collide_pair(v, w, sg, z, d);
        double after = 0.0;
        for (int a = 0; a < d; ++a) after += v[a] * v[a] + w[a] * w[a];
        const double de = after - before;
        const double predicted = -z * (1.0 - z) * u2 * (1.0 - cth);
        log->energy_change += de;
        log->max_identity_error =
            std::max(log->max_identity_error, std::abs(de - predicted) / std::max(u2, 1e-300));
        ++log->collisions;
      } else {
        collide_pair(v, w, sg, z, d);
      }
    }
    total += count;
  }
  return total;
}

MomentSample measure_moments(const ParticleEnsemble& ens, Exec exec) {
  const int d = ens.d;
  const SymBasis basis(d);
  const int D = basis.dim;
  const int nb = kJackknifeBlocks;
  // per block: d mean components, D second moments, |v|^2, |v|^4
  const int width = d + D + 2;
  std::vector<double> blocks(std::size_t(nb) * width, 0.0);
  std::vector<double> sizes(nb);
  const long long N = static_cast<long long>(ens.N);

  auto do_block = [&](int b) {
    const std::size_t lo = ens.N * std::size_t(b) / nb, hi = ens.N * std::size_t(b + 1) / nb;
    std::vector<CompensatedSum> acc(width);
    for (std::size_t i = lo; i < hi; ++i) {
      const double* v = ens.vel(i);
      double e2 = 0.0;
      for (int a = 0; a < d; ++a) {
        acc[a].add(v[a]);
        e2 += v[a] * v[a];
      }
      for (int k = 0; k < D; ++k) acc[d + k].add(v[basis.pairs[k].first] * v[basis.pairs[k].second]);
      acc[d + D].add(e2);
      acc[d + D + 1].add(e2 * e2);
    }
    for (int q = 0; q < width; ++q) blocks[std::size_t(b) * width + q] = acc[q].value();
    sizes[b] = double(hi - lo);
  };
  if (exec == Exec::parallel) {
#pragma omp parallel for schedule(static)
    for (int b = 0; b < nb; ++b) do_block(b);
  } else {
    for (int b = 0; b < nb; ++b) do_block(b);
  }

  std::vector<double> pooled(width), se(width);
  std::vector<double> means(nb);
  for (int q = 0; q < width; ++q) {
    CompensatedSum s;
    for (int b = 0; b < nb; ++b) {
      s.add(blocks[std::size_t(b) * width + q]);
      means[b] = sizes[b] > 0 ? blocks[std::size_t(b) * width + q] / sizes[b] : 0.0;
    }
    pooled[q] = s.value() / double(N);
    se[q] = jackknife_se(means, sizes);
  }

  MomentSample m;
  m.mean = Vec(d);
  for (int a = 0; a < d; ++a) m.mean(a) = pooled[a];
  m.B = Mat(d, d);
  m.B_err = Mat(d, d);
  for (int k = 0; k < D; ++k) {
    auto [i, j] = basis.pairs[k];
    m.B(i, j) = m.B(j, i) = pooled[d + k];
    m.B_err(i, j) = m.B_err(j, i) = se[d + k];
  }
  m.T = pooled[d + D];
  m.T_err = se[d + D];
  m.m4 = pooled[d + D + 1];
  m.m4_err = se[d + D + 1];
  return m;
}

std::vector<std::string> series_columns(int d) {
  SymBasis basis(d);
  auto name = [](int i, int j) { return "B" + std::to_string(i + 1) + std::to_string(j + 1); };
  std::vector<std::pair<int, int>> upper;
  for (int i = 0; i < d; ++i)
    for (int j = i; j < d; ++j) upper.emplace_back(i, j);
  std::vector<std::string> cols = {"t", "T", "T_err"};
  for (auto [i, j] : upper) cols.push_back(name(i, j));
  cols.push_back("m4");
  for (auto [i, j] : upper) cols.push_back(name(i, j) + "_err");
  cols.push_back("m4_err");
  return cols;
}

namespace {

std::vector<double> series_row(double t, const MomentSample& m, int d) {
  std::vector<double> row = {t, m.T, m.T_err};
  for (int i = 0; i < d; ++i)
    for (int j = i; j < d; ++j) row.push_back(m.B(i, j));
  row.push_back(m.m4);
  for (int i = 0; i < d; ++i)
    for (int j = i; j < d; ++j) row.push_back(m.B_err(i, j));
  row.push_back(m.m4_err);
  return row;
}

}  // namespace

TimeSeries run(const DsmcConfig& cfg, std::uint64_t stream) {
  const auto kc = kernel::derive_constants(cfg.kernel);
  cfg.validate(kc.b0);
  const int d = cfg.kernel.d;
  const Mat A = cfg.A.size() ? cfg.A : Mat::Zero(d, d);
  const Mat B0 = cfg.B0.size() ? cfg.B0 : Mat::Identity(d, d);
  const double beta = cfg.rescale ? cfg.beta : 0.0;
  const Mat Ehalf = expm(-(0.5 * cfg.dt) * (A + beta * Mat::Identity(d, d)));

  const long long nsteps = std::llround(cfg.t_end / cfg.dt);
  if (nsteps < 1 || std::abs(double(nsteps) * cfg.dt - cfg.t_end) > 1e-9 * cfg.t_end)
    throw ConfigError("t_end must be an integer multiple of dt");

  ParticleEnsemble ens = ParticleEnsemble::gaussian(cfg.N, d, B0, cfg.seed, stream, cfg.groups);
  SigmaSampler sampler(cfg.kernel);
  TimeSeries ts(series_columns(d));

  auto record = [&]() {
    MomentSample m = measure_moments(ens, cfg.exec);
    if (!std::isfinite(m.T) || !std::isfinite(m.m4))
      throw NumericalFailure("non-finite particle velocity detected at t = " +
                             format_number(ens.t) + " (stream " + std::to_string(stream) + ")");
    ts.add_row(series_row(ens.t, m, d));
  };

  record();
  for (long long s = 1; s <= nsteps; ++s) {
    apply_linear_map(ens, Ehalf, cfg.exec);
    collision_step(ens, sampler, kc.z, kc.b0, cfg.dt);
    apply_linear_map(ens, Ehalf, cfg.exec);
    ens.t = double(s) * cfg.dt;
    if (s % cfg.sample_every == 0 || s == nsteps) record();
  }
  return ts;
}

std::vector<TimeSeries> run_replicas(const DsmcConfig& cfg, int replicas, Exec exec) {
  if (replicas < 1) throw ConfigError("replicas must be >= 1");
  std::vector<TimeSeries> out(replicas);
  std::vector<std::exception_ptr> errors(replicas);
  DsmcConfig inner = cfg;
  if (exec == Exec::parallel && replicas > 1) inner.exec = Exec::serial;
#pragma omp parallel for schedule(dynamic) if (exec == Exec::parallel)
  for (int r = 0; r < replicas; ++r) {
    try {
      out[r] = run(inner, std::uint64_t(r));
    } catch (...) {
      errors[r] = std::current_exception();
    }
  }
  for (auto& e : errors)
    if (e) std::rethrow_exception(e);
  return out;
}

}  // namespace ishear::dsmc
