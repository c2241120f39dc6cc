#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "dal/experiments.hpp"

using namespace dal;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  REQUIRE(f.good());
  std::stringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() / ("dal_test_" + std::to_string(::getpid()) + "_" +
                                        std::to_string(counter()++));
    fs::remove_all(path);
  }
  ~TempDir() { fs::remove_all(path); }
  static int& counter() {
    static int c = 0;
    return c;
  }
};

}  // namespace

TEST_CASE("config parsing") {
  auto cfg = parse_config_text(
      "# a comment\n"
      "command = wegner\n"
      "geometry.kind = periodic   # trailing comment\n"
      "geometry.d = 1\n"
      "run.nsamples = 100\n");
  CHECK(cfg.command == "wegner");
  CHECK(cfg.get("geometry.kind") == "periodic");
  CHECK(cfg.get("run.nsamples") == "100");
  CHECK(cfg.get_or("absent", "x") == "x");
  CHECK_THROWS_AS(cfg.get("absent"), ConfigError);

  CHECK_THROWS_AS(parse_config_text("a = 1\na = 2\n"), ConfigError);
  CHECK_THROWS_AS(parse_config_text("nonsense line\n"), ConfigError);
}

TEST_CASE("config validation is strict") {
  auto cfg = parse_config_text("command = delone-gen\ngeometry.kind = periodic\n");
  validate_config(cfg);

  auto bad = parse_config_text("command = delone-gen\nbogus.key = 1\n");
  CHECK_THROWS_AS(validate_config(bad), ConfigError);

  auto unknown = parse_config_text("command = not-a-thing\n");
  CHECK_THROWS_AS(validate_config(unknown), ConfigError);

  ExperimentConfig none;
  CHECK_THROWS_AS(validate_config(none), ConfigError);
}

TEST_CASE("overrides") {
  auto cfg = parse_config_text("command = delone-gen\ngeometry.kind = periodic\n");
  apply_overrides(cfg, {"geometry.k=5", "command=delone-analyze"});
  CHECK(cfg.command == "delone-analyze");
  CHECK(cfg.get("geometry.k") == "5");
  CHECK_THROWS_AS(apply_overrides(cfg, {"no-equals-sign"}), ConfigError);
}

TEST_CASE("delone-gen runs and manifests are reproducible") {
  TempDir tmp;
  auto cfg = parse_config_text(
      "command = delone-gen\n"
      "geometry.kind = periodic\n"
      "geometry.d = 1\n"
      "geometry.k = 3\n"
      "geometry.window = 0:30\n");
  RunOptions opts;
  opts.out_dir = (tmp.path / "a").string();
  RunManifest m1;
  CHECK(run_experiment(cfg, opts, &m1) == 0);
  CHECK(fs::exists(tmp.path / "a" / "delone.txt"));
  CHECK(fs::exists(tmp.path / "a" / "summary.json"));
  CHECK(fs::exists(tmp.path / "a" / "manifest.json"));

  auto j = nlohmann::json::parse(slurp(tmp.path / "a" / "summary.json"));
  CHECK(j["computed_R"] == 2);
  CHECK(j["points"] == 11);

  RunOptions opts2;
  opts2.out_dir = (tmp.path / "b").string();
  RunManifest m2;
  CHECK(run_experiment(cfg, opts2, &m2) == 0);
  REQUIRE(m1.artifacts.size() == m2.artifacts.size());
  for (size_t i = 0; i < m1.artifacts.size(); ++i) {
    CHECK(m1.artifacts[i].name == m2.artifacts[i].name);
    CHECK(m1.artifacts[i].checksum == m2.artifacts[i].checksum);
  }
  CHECK(m1.config_hash == m2.config_hash);
}

TEST_CASE("usage errors leave no artifacts") {
  TempDir tmp;
  auto cfg = parse_config_text("command = delone-gen\nbogus = 1\n");
  RunOptions opts;
  opts.out_dir = (tmp.path / "x").string();
  CHECK_THROWS_AS(run_experiment(cfg, opts), ConfigError);
  CHECK(!fs::exists(tmp.path / "x"));
}

TEST_CASE("certify-lemma experiment passes on the full lattice") {
  TempDir tmp;
  auto cfg = parse_config_text(
      "command = certify-lemma\n"
      "geometry.kind = periodic\n"
      "geometry.d = 1\n"
      "geometry.k = 1\n"
      "geometry.window = -250:250\n"
      "box.center = 0\n"
      "box.L = 200\n"
      "run.q = 0.5\n"
      "run.nsamples = 20\n"
      "run.master_seed = 7\n");
  RunOptions opts;
  opts.out_dir = (tmp.path / "lemma").string();
  CHECK(run_experiment(cfg, opts) == 0);
  auto csv = slurp(tmp.path / "lemma" / "certifier.csv");
  CHECK(csv.find("lemma-we") != std::string::npos);
  CHECK(csv.find("covering") != std::string::npos);
  CHECK(csv.find("true") != std::string::npos);
}

TEST_CASE("spectrum experiment artifacts") {
  TempDir tmp;
  auto cfg = parse_config_text(
      "command = spectrum\n"
      "geometry.kind = periodic\n"
      "geometry.d = 1\n"
      "geometry.k = 2\n"
      "geometry.window = -40:40\n"
      "disorder.law = uniform\n"
      "disorder.M = 1\n"
      "box.center = 0\n"
      "box.L = 10\n"
      "run.export_operator = true\n");
  RunOptions opts;
  opts.out_dir = (tmp.path / "spec").string();
  CHECK(run_experiment(cfg, opts) == 0);
  auto csv = slurp(tmp.path / "spec" / "spectrum.csv");
  CHECK(csv.rfind("index,eigenvalue,residual", 0) == 0);
  CHECK(fs::exists(tmp.path / "spec" / "operator.txt"));
}

TEST_CASE("wegner experiment emits the documented schema") {
  TempDir tmp;
  auto cfg = parse_config_text(
      "command = wegner\n"
      "geometry.kind = periodic\n"
      "geometry.d = 1\n"
      "geometry.k = 1\n"
      "geometry.window = -30:30\n"
      "disorder.law = uniform\n"
      "disorder.M = 1\n"
      "box.centers = 0\n"
      "box.Ls = 0\n"
      "run.E = 2.5\n"
      "run.etas = 0.05,0.1\n"
      "run.nsamples = 400\n"
      "run.master_seed = 11\n");
  RunOptions opts;
  opts.out_dir = (tmp.path / "weg").string();
  CHECK(run_experiment(cfg, opts) == 0);
  auto csv = slurp(tmp.path / "weg" / "wegner.csv");
  CHECK(csv.rfind("E,eta,L,center,nsamples,phat,ci_lo,ci_hi", 0) == 0);
  auto j = nlohmann::json::parse(slurp(tmp.path / "weg" / "summary.json"));
  CHECK(j["q_w"].is_number());
  CHECK(j["uniformity"].is_number());
  CHECK(j.contains("seed"));
  CHECK(fs::exists(tmp.path / "weg" / "wegner_phat_vs_eta.dat"));
}

TEST_CASE("dynamics experiment summary") {
  TempDir tmp;
  auto cfg = parse_config_text(
      "command = dynamics\n"
      "geometry.kind = periodic\n"
      "geometry.d = 1\n"
      "geometry.k = 1\n"
      "geometry.window = -25:25\n"
      "disorder.law = uniform\n"
      "disorder.M = 1\n"
      "box.center = 0\n"
      "box.L = 12\n"
      "run.interval = 0:9\n"
      "run.moment_p = 2\n"
      "run.times = 0,1,5\n"
      "run.nsamples = 2\n");
  RunOptions opts;
  opts.out_dir = (tmp.path / "dyn").string();
  CHECK(run_experiment(cfg, opts) == 0);
  auto csv = slurp(tmp.path / "dyn" / "dynamics.csv");
  CHECK(csv.rfind("t,sample,m_p,p,interval_lo,interval_hi", 0) == 0);
  auto j = nlohmann::json::parse(slurp(tmp.path / "dyn" / "summary.json"));
  CHECK(j["running_sup"].is_number());
  CHECK(j["negligible_fraction"] == 0.0);
}

TEST_CASE("fnv1a64 reference values") {
  // FNV-1a test vectors: empty string and "a"
  CHECK(fnv1a64("", 0) == 0xcbf29ce484222325ULL);
  const char a = 'a';
  CHECK(fnv1a64(&a, 1) == 0xaf63dc4c8601ec8cULL);
}
