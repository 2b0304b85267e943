#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <json.hpp>
#include <sstream>

#include "../tools/cli.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

struct Result {
  int code;
  std::string out, err;
};

Result cli(std::vector<std::string> args) {
  args.insert(args.begin(), "ishear");
  std::ostringstream out, err;
  const int code = ishear::cli::run(args, out, err);
  return {code, out.str(), err.str()};
}

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("ishear_cli_test_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::ostringstream s;
  s << f.rdbuf();
  return s.str();
}

json sidecar(const fs::path& dir, const std::string& stem) { return json::parse(slurp(dir / (stem + ".json"))); }

}  // namespace

TEST_CASE("constants subcommand") {
  const auto dir = scratch("constants");
  auto r = cli({"constants", "--output-dir", dir.string()});
  REQUIRE(r.code == 0);
  const json res = json::parse(r.out);
  CHECK(res["alpha0"].get<double>() == doctest::Approx(0.46875).epsilon(1e-12));
  CHECK(res["zeta"].get<double>() == doctest::Approx(3.0 / 16).epsilon(1e-12));
  CHECK(res["lambda2_equals_zeta"].get<bool>());
  const json meta = sidecar(dir, "constants");
  CHECK(meta["config"]["constants"]["seed"].get<std::uint64_t>() == ishear::cli::kDefaultSeed);
  CHECK(meta["config"]["constants"]["z"].get<double>() == 0.75);

  r = cli({"constants", "--z", "1", "--output-dir", dir.string()});
  REQUIRE(r.code == 0);
  CHECK(json::parse(r.out)["zeta"].get<double>() == doctest::Approx(0.0).epsilon(1e-14));
}

TEST_CASE("sweep-alpha finds alpha0") {
  const auto dir = scratch("sweep");
  const auto r = cli({"sweep-alpha", "--output-dir", dir.string()});
  REQUIRE(r.code == 0);
  const json res = json::parse(r.out);
  CHECK(res["gamma_monotone"].get<bool>());
  CHECK(res["root_matches_alpha0"].get<bool>());
  const std::string csv = slurp(dir / "sweep-alpha.csv");
  std::istringstream is(csv);
  std::string line;
  bool found = false;
  while (std::getline(is, line)) {
    const double a = std::atof(line.c_str());
    if (std::abs(a - 0.46875) < 1e-12) {
      found = true;
      CHECK(line.find(",converges,") != std::string::npos);
    }
  }
  CHECK(found);
}

TEST_CASE("configuration errors exit with code 2") {
  const auto dir = scratch("errors");
  CHECK(cli({"constants", "--family", "series", "--coefficients", "0", "--output-dir", dir.string()}).code == 2);
  CHECK(cli({"constants", "--no-such-flag"}).code == 2);
  CHECK(cli({}).code == 2);
  CHECK(cli({"dsmc", "--dt", "0.9", "--output-dir", dir.string()}).code == 2);
  CHECK(cli({"profile", "--p", "5", "--output-dir", dir.string()}).code != 0);
  CHECK(cli({"--help"}).code == 0);
}

TEST_CASE("outputs regenerate byte-identically from the sidecar") {
  const auto a = scratch("regen_a"), b = scratch("regen_b");
  auto r = cli({"moments", "--alpha", "0.8", "--self-similar", "--t-max", "3", "--output-dir", a.string()});
  REQUIRE(r.code == 0);
  r = cli({"--config", (a / "moments.json").string(), "moments", "--output-dir", b.string()});
  REQUIRE(r.code == 0);
  CHECK(slurp(a / "moments.csv") == slurp(b / "moments.csv"));
  CHECK(slurp(a / "moments.json") == slurp(b / "moments.json"));

  r = cli({"dsmc", "--n", "2000", "--t-end", "1", "--dt", "0.05", "--replicas", "2", "--output-dir", a.string()});
  REQUIRE(r.code == 0);
  r = cli({"--config", (a / "dsmc.json").string(), "dsmc", "--output-dir", b.string()});
  REQUIRE(r.code == 0);
  CHECK(slurp(a / "dsmc_rep0.csv") == slurp(b / "dsmc_rep0.csv"));
  CHECK(slurp(a / "dsmc_rep1.csv") == slurp(b / "dsmc_rep1.csv"));
  CHECK(slurp(a / "dsmc_rep0.csv") != slurp(a / "dsmc_rep1.csv"));
}

TEST_CASE("TOML config with command-line override") {
  const auto dir = scratch("toml");
  {
    std::ofstream f(dir / "run.toml");
    f << "[constants]\nz = 0.9\nd = 2\n";
  }
  auto r = cli({"--config", (dir / "run.toml").string(), "constants", "--output-dir", dir.string()});
  REQUIRE(r.code == 0);
  json res = json::parse(r.out);
  CHECK(res["z"].get<double>() == 0.9);
  CHECK(res["d"].get<int>() == 2);
  r = cli({"--config", (dir / "run.toml").string(), "constants", "--z", "0.6", "--output-dir", dir.string()});
  REQUIRE(r.code == 0);
  res = json::parse(r.out);
  CHECK(res["z"].get<double>() == 0.6);
  CHECK(res["d"].get<int>() == 2);
}

TEST_CASE("output directory from the environment and --name") {
  const auto dir = scratch("env");
  setenv(ishear::cli::kOutputDirEnv, dir.string().c_str(), 1);
  const auto r = cli({"check-2d-usf", "--n-alpha", "3", "--n-z", "3", "--name", "grid"});
  unsetenv(ishear::cli::kOutputDirEnv);
  REQUIRE(r.code == 0);
  CHECK(fs::exists(dir / "grid.csv"));
  CHECK(fs::exists(dir / "grid.json"));
  CHECK(json::parse(r.out)["neg_S_psd_everywhere"].get<bool>());
}

TEST_CASE("validate reports per-criterion lines") {
  const auto dir = scratch("validate");
  const auto r = cli({"validate", "--only", "1", "--output-dir", dir.string()});
  CHECK(r.code == 0);
  CHECK(r.out.find("PASS  [1]") != std::string::npos);
  CHECK(r.out.find(" s]") != std::string::npos);
  const json meta = sidecar(dir, "validate");
  CHECK(meta["results"]["all_pass"].get<bool>());
  CHECK(meta["results"]["criteria"][0]["runtime_s"].get<double>() >= 0.0);
}

TEST_CASE("inflated cooling rate is rejected by the Haff-law criterion") {
  const auto dir = scratch("negative");
  const auto r = cli({"validate", "--only", "7", "--inject-zeta", "1.1", "--output-dir", dir.string()});
  CHECK(r.code == 1);
  CHECK(r.out.find("FAIL  [7]") != std::string::npos);
}
