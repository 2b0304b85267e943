#include "cli.hpp"

#include <CLI11.hpp>
#include <boost/math/distributions/students_t.hpp>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <json.hpp>
#include <numbers>
#include <sstream>

#include "ishear/acceptance.hpp"
#include "ishear/dsmc.hpp"
#include "ishear/errors.hpp"
#include "ishear/kernel.hpp"
#include "ishear/moments.hpp"
#include "ishear/profile.hpp"
#include "ishear/stats.hpp"
#include "ishear/timeseries.hpp"

namespace ishear::cli {

namespace {

using nlohmann::json;
namespace fs = std::filesystem;

// Reads a JSON config file, either a bare {"subcommand": {...}} object or a
// metadata sidecar, whose "config" member has that shape.
class JsonConfig : public CLI::Config {
 public:
  std::string to_config(const CLI::App*, bool, bool, std::string) const override {
    throw CLI::ConfigError("JSON config output is not supported; use the metadata sidecar");
  }

  std::vector<CLI::ConfigItem> from_config(std::istream& is) const override {
    json j;
    try {
      j = json::parse(is);
    } catch (const json::exception& e) {
      throw CLI::ConfigError(std::string("invalid JSON config: ") + e.what());
    }
    if (j.contains("config")) j = j["config"];
    std::vector<CLI::ConfigItem> items;
    walk(j, {}, items);
    return items;
  }

 private:
  static std::string scalar(const json& v) {
    if (v.is_string()) return v.get<std::string>();
    if (v.is_boolean()) return v.get<bool>() ? "true" : "false";
    return v.dump();
  }

  static void walk(const json& j, const std::vector<std::string>& parents,
                   std::vector<CLI::ConfigItem>& items) {
    if (!j.is_object()) throw CLI::ConfigError("JSON config must be an object");
    for (const auto& [key, v] : j.items()) {
      if (v.is_object()) {
        auto p = parents;
        p.push_back(key);
        walk(v, p, items);
        continue;
      }
      if (v.is_null() || (v.is_array() && v.empty())) continue;
      CLI::ConfigItem item;
      item.parents = parents;
      item.name = key;
      if (v.is_array())
        for (const auto& e : v) item.inputs.push_back(scalar(e));
      else
        item.inputs.push_back(scalar(v));
      items.push_back(std::move(item));
    }
  }
};

// Options of one subcommand whose resolved values are echoed into the sidecar.
class Block {
 public:
  explicit Block(CLI::App* app) : app_(app) {}

  template <class T>
  CLI::Option* add(const std::string& name, T& var, const std::string& desc) {
    fields_.emplace_back(name, [&var] { return json(var); });
    return app_->add_option("--" + name, var, desc)->capture_default_str();
  }

  CLI::Option* flag(const std::string& name, bool& var, const std::string& desc) {
    fields_.emplace_back(name, [&var] { return json(var); });
    return app_->add_flag("--" + name, var, desc);
  }

  json resolved() const {
    json j = json::object();
    for (const auto& [name, get] : fields_) j[name] = get();
    return j;
  }

  CLI::App* app() const { return app_; }

 private:
  CLI::App* app_;
  std::vector<std::pair<std::string, std::function<json()>>> fields_;
};

struct KernelArgs {
  std::string family = "isotropic";
  std::vector<double> coefficients;
  std::vector<double> table;
  int d = 3;
  double z = 0.75;
  int quadrature_order = 64;

  void add(Block& b) {
    b.add("family", family, "kernel family: isotropic, series, table")
        ->check(CLI::IsMember({"isotropic", "series", "table"}));
    b.add("coefficients", coefficients, "series coefficients c0 c1 c2 of b(c) = c0 + c1 c + c2 c^2");
    b.add("table", table, "b at Chebyshev-Lobatto nodes cos(pi j/(n-1))");
    b.add("d", d, "velocity dimension");
    b.add("z", z, "z = (1 + e_res)/2");
    b.add("quadrature-order", quadrature_order, "Gauss-Legendre order of polar-angle integrals");
  }

  kernel::KernelModel build() const {
    kernel::KernelModel k;
    switch (kernel::family_from_string(family)) {
      case kernel::Family::isotropic:
        k = kernel::KernelModel::isotropic(d, z);
        break;
      case kernel::Family::series:
        if (coefficients.empty()) throw ConfigError("series kernel needs --coefficients");
        k = kernel::KernelModel::series(d, z, coefficients);
        break;
      case kernel::Family::table:
        if (table.empty()) throw ConfigError("table kernel needs --table");
        k = kernel::KernelModel::tabulated(d, z, table);
        break;
    }
    k.quadrature_order = quadrature_order;
    k.validate();
    return k;
  }
};

json constants_json(const kernel::KernelConstants& kc) {
  return {{"d", kc.d},       {"z", kc.z},       {"b0", kc.b0},           {"b1", kc.b1},
          {"b2", kc.b2},     {"zeta", kc.zeta}, {"c11", kc.c11},         {"c_tilde", kc.c_tilde},
          {"alpha0", kc.alpha0}};
}

json matrix_json(const Mat& M) {
  json j = json::array();
  for (int i = 0; i < M.rows(); ++i) {
    json row = json::array();
    for (int k = 0; k < M.cols(); ++k) row.push_back(M(i, k));
    j.push_back(row);
  }
  return j;
}

Mat read_matrix_csv(const std::string& path, int d) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open matrix file " + path);
  std::vector<std::vector<double>> rows;
  std::string line;
  while (std::getline(in, line)) {
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    std::vector<double> row;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
      try {
        row.push_back(std::stod(cell));
      } catch (const std::exception&) {
        throw ConfigError("non-numeric entry '" + cell + "' in " + path);
      }
    }
    rows.push_back(row);
  }
  if (int(rows.size()) != d) throw ConfigError("matrix file must have d rows");
  Mat B(d, d);
  for (int i = 0; i < d; ++i) {
    if (int(rows[i].size()) != d) throw ConfigError("matrix file must have d columns");
    for (int k = 0; k < d; ++k) B(i, k) = rows[i][k];
  }
  if ((B - B.transpose()).norm() > 1e-12 * B.norm()) throw ConfigError("B0 must be symmetric");
  if (min_sym_eigenvalue(B) < -1e-12 * B.norm()) throw ConfigError("B0 must be positive semidefinite");
  return B;
}

// Upper-triangle moment columns t, T, B11, B12, ...
TimeSeries moment_series(int d) {
  std::vector<std::string> cols = {"t", "T"};
  for (int i = 0; i < d; ++i)
    for (int j = i; j < d; ++j) cols.push_back("B" + std::to_string(i + 1) + std::to_string(j + 1));
  return TimeSeries(cols);
}

struct Context {
  std::string output_dir;
  std::string name;
  std::ostream* out;
  std::vector<std::string> files;

  fs::path path(const std::string& suffix) {
    fs::create_directories(output_dir);
    const fs::path p = fs::path(output_dir) / (name + suffix);
    files.push_back(p.filename().string());
    return p;
  }

  void write_text(const std::string& suffix, const std::string& text) {
    std::ofstream f(path(suffix), std::ios::binary);
    f << text;
    if (!f) throw Error("failed writing " + (fs::path(output_dir) / (name + suffix)).string());
  }

  void write_series(const std::string& suffix, const TimeSeries& ts) { ts.write_csv(path(suffix).string()); }

  void sidecar(const std::string& sub, const json& config, const json& results) {
    const json meta = {{"tool", "ishear"},
                       {"version", kVersion},
                       {"subcommand", sub},
                       {"config", {{sub, config}}},
                       {"outputs", files},
                       {"results", results}};
    const fs::path p = fs::path(output_dir) / (name + ".json");
    fs::create_directories(output_dir);
    std::ofstream f(p, std::ios::binary);
    f << meta.dump(2) << "\n";
    if (!f) throw Error("failed writing " + p.string());
    *out << results.dump(2) << "\n";
  }
};

// ---------------- subcommands ----------------

struct ConstantsCmd {
  KernelArgs kernel;
  std::uint64_t seed = kDefaultSeed;
  double p_max = 6.0, p_step = 0.25;

  void add(Block& b) {
    kernel.add(b);
    b.add("seed", seed, "RNG seed (unused by this subcommand)");
    b.add("p-max", p_max, "largest p in the lambda_p table");
    b.add("p-step", p_step, "p grid spacing");
  }

  json run(Context& ctx) const {
    if (!(p_step > 0.0) || p_max < 0.0) throw ConfigError("need p-step > 0 and p-max >= 0");
    const auto k = kernel.build();
    const auto kc = kernel::derive_constants(k);
    json res = constants_json(kc);
    json table = json::array();
    const int n = int(std::floor(p_max / p_step + 1e-9));
    for (int i = 0; i <= n; ++i) {
      const double p = i * p_step;
      table.push_back({{"p", p}, {"lambda_p", kernel::lambda_p(k, p)}});
    }
    res["lambda_table"] = table;
    res["p0"] = kernel::lambda_root(k);
    const double l2 = kernel::lambda_p(k, 2.0);
    res["lambda2_minus_zeta"] = l2 - kc.zeta;
    res["lambda2_equals_zeta"] = std::abs(l2 - kc.zeta) <= 1e-10;
    (void)ctx;
    return res;
  }
};

struct MomentsCmd {
  KernelArgs kernel;
  std::uint64_t seed = kDefaultSeed;
  double alpha = 0.0, beta = 0.0, t_max = 10.0, dt_sample = 0.1;
  std::string b0_matrix;
  bool self_similar = false;

  void add(Block& b) {
    kernel.add(b);
    b.add("seed", seed, "RNG seed (unused by this subcommand)");
    b.add("alpha", alpha, "uniform shear rate");
    b.add("beta", beta, "self-similar frame rate (ignored with --self-similar)");
    b.flag("self-similar", self_similar, "evolve in the frame of the self-similar beta");
    b.add("b0-matrix", b0_matrix, "CSV file with the initial d x d second-moment matrix (default I)");
    b.add("t-max", t_max, "final time");
    b.add("dt-sample", dt_sample, "sampling interval");
  }

  json run(Context& ctx) const {
    if (!(dt_sample > 0.0) || !(t_max >= 0.0)) throw ConfigError("need dt-sample > 0 and t-max >= 0");
    const auto k = kernel.build();
    const auto kc = kernel::derive_constants(k);
    const int d = k.d;
    const Mat A = moments::usf_shear(d, alpha);
    const Mat B0 = b0_matrix.empty() ? Mat::Identity(d, d) : read_matrix_csv(b0_matrix, d);
    json res = {{"alpha0", kc.alpha0}, {"zeta", kc.zeta}, {"c_tilde", kc.c_tilde}};
    double b = beta;
    try {
      const auto ss = moments::find_beta(A, kc);
      res["beta_self_similar"] = ss.beta;
      res["nu"] = ss.nu;
      res["B_profile"] = matrix_json(ss.B_profile);
      if (self_similar) b = ss.beta;
    } catch (const NoProfileError& e) {
      if (self_similar) throw;
      res["beta_self_similar"] = nullptr;
    }
    res["beta"] = b;
    if (alpha > 0.0) {
      const auto s = moments::usf_spectrum(alpha, kc);
      res["gamma"] = s.gamma;
      res["sigma"] = s.sigma;
      res["omega"] = s.omega;
      res["Theta"] = s.Theta;
      const auto c = moments::usf_temperature_coeffs({B0, 0.0}, alpha, kc);
      res["temperature_coeffs"] = {{"c0", c.c0}, {"r", c.r}, {"m", c.m}};
    }
    const auto cls = moments::classify_temperature(alpha, kc);
    res["classification"] = moments::to_string(cls.trend);
    res["rate"] = cls.rate;

    TimeSeries ts = moment_series(d);
    const long long n = std::llround(std::floor(t_max / dt_sample + 1e-9));
    for (long long i = 0; i <= n; ++i) {
      const double t = double(i) * dt_sample;
      const Mat B = moments::evolve_second_moment({B0, 0.0}, A, kc, b, t).B;
      std::vector<double> row = {t, B.trace()};
      for (int a = 0; a < d; ++a)
        for (int c = a; c < d; ++c) row.push_back(B(a, c));
      ts.add_row(row);
    }
    ctx.write_series(".csv", ts);
    return res;
  }
};

double t_quantile(double p, int dof) {
  if (dof < 1) return std::numeric_limits<double>::quiet_NaN();
  return boost::math::quantile(boost::math::students_t(dof), p);
}

struct DsmcCmd {
  KernelArgs kernel;
  std::uint64_t seed = kDefaultSeed;
  std::size_t n = 100000;
  double alpha = 0.0, t_end = 10.0, dt = 0.01;
  int sample_every = 10, replicas = 1, groups = 1;
  bool rescale_beta = false;

  void add(Block& b) {
    kernel.add(b);
    b.add("seed", seed, "RNG seed");
    b.add("n", n, "particles per replica");
    b.add("alpha", alpha, "uniform shear rate");
    b.add("t-end", t_end, "final time (integer multiple of dt)");
    b.add("dt", dt, "splitting step");
    b.add("sample-every", sample_every, "steps between samples");
    b.add("replicas", replicas, "independent replicas (one RNG stream each)");
    b.add("groups", groups, "independent collision sub-systems per replica");
    b.flag("rescale-beta", rescale_beta, "evolve in the self-similar frame with beta from the moment equations");
  }

  json run(Context& ctx) const {
    dsmc::DsmcConfig cfg;
    cfg.kernel = kernel.build();
    const auto kc = kernel::derive_constants(cfg.kernel);
    const int d = cfg.kernel.d;
    cfg.N = n;
    cfg.A = moments::usf_shear(d, alpha);
    cfg.t_end = t_end;
    cfg.dt = dt;
    cfg.sample_every = sample_every;
    cfg.seed = seed;
    cfg.groups = groups;
    json res = {{"zeta", kc.zeta}, {"alpha0", kc.alpha0}};
    if (rescale_beta) {
      cfg.rescale = true;
      cfg.beta = moments::find_beta(cfg.A, kc).beta;
      res["beta"] = cfg.beta;
    }
    const auto runs = dsmc::run_replicas(cfg, replicas);
    std::vector<double> rates;
    json per = json::array();
    for (int r = 0; r < replicas; ++r) {
      const TimeSeries& ts = runs[r];
      ctx.write_series(replicas == 1 ? ".csv" : "_rep" + std::to_string(r) + ".csv", ts);
      std::vector<double> t = ts.column("t"), y = ts.column("T");
      for (double& v : y) v = std::log(v);
      const auto fit = linear_fit(t, y);
      rates.push_back(fit.slope);
      per.push_back({{"log_T_slope", fit.slope}, {"slope_se", fit.slope_se}});
    }
    const double m = mean(rates);
    double se, q;
    if (replicas > 1) {
      se = stddev(rates) / std::sqrt(double(replicas));
      q = t_quantile(0.975, replicas - 1);
    } else {
      // single replica: regression error, which ignores trajectory correlation
      se = per[0]["slope_se"].get<double>();
      q = 1.959963984540054;
    }
    res["replicas"] = per;
    res["log_T_slope"] = m;
    res["log_T_slope_se"] = se;
    res["log_T_slope_ci95"] = {m - q * se, m + q * se};
    if (alpha > 0.0) res["expected_slope"] = 2.0 * moments::usf_spectrum(alpha, kc).gamma - kc.zeta;
    else res["expected_slope"] = -kc.zeta;
    return res;
  }
};

struct ProfileCmd {
  KernelArgs kernel;
  std::uint64_t seed = kDefaultSeed;
  double alpha = 0.05, p = 3.0, tol = 1e-8, t_max = 0.0, temperature = 1.0;
  int max_iter = 400, time_nodes = 64;
  std::vector<double> grid = {128, 64, 1e-3, 1e2};

  ProfileCmd() {
    kernel.family = "series";
    kernel.coefficients = {1.0 / std::numbers::pi};
    kernel.d = 2;
    kernel.z = 0.95;
  }

  void add(Block& b) {
    kernel.add(b);
    b.add("seed", seed, "RNG seed (unused by this subcommand)");
    b.add("alpha", alpha, "uniform shear rate (d = 2 only)");
    b.add("p", p, "Toscani order in (2, 4]");
    b.add("tol", tol, "Picard stopping tolerance");
    b.add("max-iter", max_iter, "iteration cap");
    b.add("grid", grid, "radial count, angle count, r_min, r_max")->expected(4);
    b.add("t-max", t_max, "time-integral truncation (0: 40/b0)");
    b.add("time-nodes", time_nodes, "Gauss-Legendre nodes of the time integral");
    b.add("temperature", temperature, "trace of the starting Gaussian's covariance");
  }

  json run(Context& ctx) const {
    const auto k = kernel.build();
    if (grid.size() != 4) throw ConfigError("--grid needs 4 values");
    fourier::ProfileOptions opt;
    opt.grid.n_radial = int(grid[0]);
    opt.grid.n_angle = int(grid[1]);
    opt.grid.r_min = grid[2];
    opt.grid.r_max = grid[3];
    opt.t_max = t_max;
    opt.time_nodes = time_nodes;
    opt.temperature = temperature;
    const Mat A = moments::usf_shear(k.d, alpha);
    const auto resu = fourier::stationary_profile(alpha > 0.0 ? A : Mat(), k, p, tol, max_iter, opt);

    std::ostringstream csv;
    csv << "r,angle,re_phi,im_phi\n";
    const auto& Phi = resu.Phi;
    for (int j = 0; j < Phi.n_radial(); ++j)
      for (int m = 0; m < Phi.n_angle(); ++m) {
        const auto v = Phi.value(j, m);
        csv << format_number(Phi.radius(j)) << ',' << format_number(Phi.angle(m)) << ','
            << format_number(v.real()) << ',' << format_number(v.imag()) << '\n';
      }
    ctx.write_text(".csv", csv.str());
    std::ostringstream rt;
    rt << "iteration,residual,ratio\n";
    for (std::size_t i = 0; i < resu.residuals.size(); ++i)
      rt << i << ',' << format_number(resu.residuals[i]) << ','
         << (i ? format_number(resu.contraction_ratios[i - 1]) : std::string("")) << '\n';
    ctx.write_text("_ratios.csv", rt.str());

    return {{"beta", resu.beta},
            {"beta_tilde", resu.beta_tilde},
            {"lambda", resu.lambda_scale},
            {"p", resu.p},
            {"iterations", resu.iterations},
            {"converged", resu.converged},
            {"theoretical_ratio", resu.theoretical_ratio},
            {"observed_ratio", resu.observed_ratio},
            {"lambda_p", resu.lambda_p},
            {"A_norm", resu.A_norm},
            {"nu", resu.nu},
            {"eta", resu.eta},
            {"tail_bound", resu.tail_bound},
            {"B_profile", matrix_json(resu.B_profile)},
            {"C_fit", matrix_json(resu.C_fit)},
            {"warnings", resu.warnings}};
  }
};

struct SweepCmd {
  KernelArgs kernel;
  std::uint64_t seed = kDefaultSeed;
  double alpha_min = 0.01, alpha_max = 2.0;
  int n_alpha = 41;

  void add(Block& b) {
    kernel.add(b);
    b.add("seed", seed, "RNG seed (unused by this subcommand)");
    b.add("alpha-min", alpha_min, "smallest alpha (log grid)");
    b.add("alpha-max", alpha_max, "largest alpha");
    b.add("n-alpha", n_alpha, "grid points (alpha0 is inserted as well)");
  }

  json run(Context& ctx) const {
    if (!(alpha_min > 0.0) || !(alpha_max > alpha_min) || n_alpha < 2)
      throw ConfigError("need 0 < alpha-min < alpha-max and n-alpha >= 2");
    const auto k = kernel.build();
    const auto kc = kernel::derive_constants(k);
    std::vector<double> grid;
    for (int i = 0; i < n_alpha; ++i)
      grid.push_back(alpha_min * std::pow(alpha_max / alpha_min, double(i) / (n_alpha - 1)));
    if (kc.alpha0 > alpha_min && kc.alpha0 < alpha_max) grid.push_back(kc.alpha0);
    std::sort(grid.begin(), grid.end());
    grid.erase(std::unique(grid.begin(), grid.end()), grid.end());

    auto f = [&](double a) { return 2.0 * moments::usf_spectrum(a, kc).gamma - kc.zeta; };
    std::ostringstream csv;
    csv << "alpha,gamma,two_gamma_minus_zeta,classification,beta\n";
    bool monotone = true;
    double prev_gamma = -1.0;
    std::vector<double> g;
    for (double a : grid) {
      const double gamma = moments::usf_spectrum(a, kc).gamma;
      if (!(gamma > prev_gamma)) monotone = false;
      prev_gamma = gamma;
      g.push_back(f(a));
      const auto cls = moments::classify_temperature(a, kc);
      const double beta = moments::find_beta(moments::usf_shear(k.d, a), kc).beta;
      csv << format_number(a) << ',' << format_number(gamma) << ',' << format_number(g.back()) << ','
          << moments::to_string(cls.trend) << ',' << format_number(beta) << '\n';
    }
    ctx.write_text(".csv", csv.str());

    json res = {{"alpha0", kc.alpha0}, {"gamma_monotone", monotone}};
    // first strict sign change of 2 gamma - zeta between grid neighbours
    for (std::size_t i = 0; i + 1 < grid.size(); ++i) {
      double lo = grid[i], hi = grid[i + 1];
      if (!(f(lo) < 0.0 && f(hi) >= 0.0)) continue;
      for (int it = 0; it < 200 && hi - lo > 1e-15 * hi; ++it) {
        const double mid = 0.5 * (lo + hi);
        (f(mid) < 0.0 ? lo : hi) = mid;
      }
      const double root = 0.5 * (lo + hi);
      res["bracket"] = {grid[i], grid[i + 1]};
      res["root"] = root;
      res["root_error"] = std::abs(root - kc.alpha0);
      res["root_matches_alpha0"] = std::abs(root - kc.alpha0) <= 1e-10;
      break;
    }
    if (!res.contains("root")) res["root"] = nullptr;
    return res;
  }
};

struct Check2dCmd {
  KernelArgs kernel;
  std::uint64_t seed = kDefaultSeed;
  std::vector<double> alpha = {0.01, 5.0};
  std::vector<double> z_range = {0.55, 0.99};
  int n_alpha = 20, n_z = 20;

  Check2dCmd() { kernel.d = 2; }

  void add(Block& b) {
    kernel.add(b);
    b.add("seed", seed, "RNG seed (unused by this subcommand)");
    b.add("alpha-range", alpha, "alpha interval")->expected(2);
    b.add("z-range", z_range, "z interval (overrides --z)")->expected(2);
    b.add("n-alpha", n_alpha, "alpha grid points");
    b.add("n-z", n_z, "z grid points");
  }

  json run(Context& ctx) const {
    if (n_alpha < 1 || n_z < 1) throw ConfigError("grid sizes must be >= 1");
    if (kernel.d != 2) throw ConfigError("check-2d-usf requires d = 2");
    std::ostringstream csv;
    bool header = false;
    double min_minor = 0.0, max_det = 0.0;
    bool all_psd = true;
    for (int i = 0; i < n_alpha; ++i)
      for (int j = 0; j < n_z; ++j) {
        const double a = n_alpha == 1 ? alpha[0] : alpha[0] + (alpha[1] - alpha[0]) * i / (n_alpha - 1);
        KernelArgs ka = kernel;
        ka.z = n_z == 1 ? z_range[0] : z_range[0] + (z_range[1] - z_range[0]) * j / (n_z - 1);
        const auto kc = kernel::derive_constants(ka.build());
        const auto rep = moments::check_2d_usf_obstruction(a, kc);
        if (!header) {
          csv << "alpha,z,beta_tilde";
          for (const auto& [label, v] : rep.minors) csv << ',' << label;
          csv << ",det,neg_S_psd\n";
          header = true;
        }
        csv << format_number(a) << ',' << format_number(ka.z) << ',' << format_number(rep.beta_tilde);
        for (const auto& [label, v] : rep.minors) {
          csv << ',' << format_number(v);
          min_minor = std::min(min_minor, v);
        }
        csv << ',' << format_number(rep.det) << ',' << (rep.neg_S_psd ? 1 : 0) << '\n';
        max_det = std::max(max_det, std::abs(rep.det));
        all_psd = all_psd && rep.neg_S_psd;
      }
    ctx.write_text(".csv", csv.str());
    return {{"min_minor", min_minor}, {"max_abs_det", max_det}, {"neg_S_psd_everywhere", all_psd}};
  }
};

struct ValidateCmd {
  std::uint64_t seed = kDefaultSeed;
  std::vector<int> only;
  double inject_zeta = 1.0;

  void add(Block& b) {
    b.add("seed", seed, "RNG seed for the particle criteria");
    b.add("only", only, "criterion numbers to run (default all)");
    b.add("inject-zeta", inject_zeta, "scale of the reference cooling rate (1.1 is the negative control)");
  }

  json run(Context& ctx, bool& all_pass) const {
    acceptance::SuiteOptions opt;
    opt.seed = seed;
    opt.only = only;
    opt.zeta_scale = inject_zeta;
    json list = json::array();
    all_pass = true;
    acceptance::run_suite(opt, [&](const acceptance::CriterionResult& r) {
      list.push_back({{"id", r.id},
                      {"name", r.name},
                      {"pass", r.pass},
                      {"measured", r.measured},
                      {"expected", r.expected},
                      {"runtime_s", r.runtime_s},
                      {"note", r.note}});
      all_pass = all_pass && r.pass;
      *ctx.out << (r.pass ? "PASS" : "FAIL") << "  [" << r.id << "] " << r.name << ": " << r.measured
               << " (expected " << r.expected << ") [" << format_number(r.runtime_s) << " s]\n";
    });
    return {{"all_pass", all_pass}, {"criteria", list}};
  }
};

std::string config_path(const std::vector<std::string>& args) {
  for (std::size_t i = 1; i < args.size(); ++i) {
    if (args[i] == "--config" && i + 1 < args.size()) return args[i + 1];
    if (args[i].rfind("--config=", 0) == 0) return args[i].substr(9);
  }
  return "";
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Inelastic Maxwell molecules under shear: moments, DSMC and Fourier profiles", "ishear"};
  app.set_version_flag("--version", kVersion);
  app.set_config("--config", "", "TOML config file, or a JSON config / metadata sidecar");
  const std::string cfg = config_path(args);
  if (cfg.size() >= 5 && cfg.substr(cfg.size() - 5) == ".json")
    app.config_formatter(std::make_shared<JsonConfig>());
  const char* env = std::getenv(kOutputDirEnv);
  std::string output_dir = env && *env ? env : ".";
  std::string name;
  app.add_option("--output-dir", output_dir, "output directory (default $" + std::string(kOutputDirEnv) + " or .)");
  app.add_option("--name", name, "output file stem (default: the subcommand name)");
  app.require_subcommand(1);
  app.fallthrough();  // --output-dir and --name may follow the subcommand

  ConstantsCmd constants;
  MomentsCmd moments_cmd;
  DsmcCmd dsmc_cmd;
  ProfileCmd profile;
  SweepCmd sweep;
  Check2dCmd check2d;
  ValidateCmd validate;
  Block b_constants(app.add_subcommand("constants", "kernel constants and the lambda_p table"));
  Block b_moments(app.add_subcommand("moments", "second-moment trajectory and USF closed forms"));
  Block b_dsmc(app.add_subcommand("dsmc", "direct simulation Monte Carlo run"));
  Block b_profile(app.add_subcommand("profile", "self-similar profile by Picard iteration"));
  Block b_sweep(app.add_subcommand("sweep-alpha", "temperature trend across a shear-rate grid"));
  Block b_check(app.add_subcommand("check-2d-usf", "principal minors of the 2-D USF obstruction matrix"));
  Block b_validate(app.add_subcommand("validate", "run the acceptance suite"));
  constants.add(b_constants);
  moments_cmd.add(b_moments);
  dsmc_cmd.add(b_dsmc);
  profile.add(b_profile);
  sweep.add(b_sweep);
  check2d.add(b_check);
  validate.add(b_validate);

  std::vector<std::string> rev(args.rbegin(), args.rend() - 1);  // CLI11 wants reversed, no argv[0]
  try {
    app.parse(rev);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kConfigError;
  }

  Context ctx{output_dir, "", &out, {}};
  try {
    for (Block* b : {&b_constants, &b_moments, &b_dsmc, &b_profile, &b_sweep, &b_check, &b_validate}) {
      if (!b->app()->parsed()) continue;
      const std::string sub = b->app()->get_name();
      ctx.name = name.empty() ? sub : name;
      json res;
      bool ok = true;
      if (b == &b_constants) res = constants.run(ctx);
      else if (b == &b_moments) res = moments_cmd.run(ctx);
      else if (b == &b_dsmc) res = dsmc_cmd.run(ctx);
      else if (b == &b_profile) res = profile.run(ctx);
      else if (b == &b_sweep) res = sweep.run(ctx);
      else if (b == &b_check) res = check2d.run(ctx);
      else res = validate.run(ctx, ok);
      ctx.sidecar(sub, b->resolved(), res);
      return ok ? kOk : kNumericalFailure;
    }
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << "\n";
    return kConfigError;
  } catch (const DegenerateKernelError& e) {
    err << "degenerate kernel: " << e.what() << "\n";
    return kConfigError;
  } catch (const InvalidKernelError& e) {
    err << "invalid kernel: " << e.what() << "\n";
    return kConfigError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kNumericalFailure;
  }
  return kConfigError;
}

}  // namespace ishear::cli
