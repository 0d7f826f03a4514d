#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cstdio>
#include <fstream>
#include <sstream>

#include "oplab/harness.hpp"

using namespace oplab;

namespace {
std::string write_temp(const std::string& body) {
  const std::string path = "harness_test_config.txt";
  std::ofstream os(path);
  os << body;
  return path;
}
}  // namespace

TEST_CASE("config validation") {
  SuiteConfig cfg;
  CHECK_NOTHROW(cfg.validate());
  SuiteConfig bad = cfg;
  bad.tol.quadrature = -1.0;
  CHECK_THROWS_AS(bad.validate(), ConfigError);
  bad = cfg;
  bad.dims = {};
  CHECK_THROWS_AS(bad.validate(), ConfigError);
  bad = cfg;
  bad.dims = {0};
  CHECK_THROWS_AS(bad.validate(), ConfigError);
  bad = cfg;
  bad.suites = {"no_such_suite"};
  CHECK_THROWS_AS(bad.validate(), ConfigError);
  bad = cfg;
  bad.n_instances = 0;
  CHECK_THROWS_AS(bad.validate(), ConfigError);
}

TEST_CASE("config file roundtrip") {
  const std::string path = write_temp(
      "# comment line\n"
      "seed = 42\n"
      "dims = 2,3\n"
      "n_instances = 2\n"
      "gap = 0.25   # trailing comment\n"
      "suites = core,funcalc\n"
      "tol_quad = 1e-9\n"
      "out = somewhere\n");
  const SuiteConfig cfg = SuiteConfig::from_file(path);
  CHECK(cfg.seed == 42);
  CHECK(cfg.dims == std::vector<int>{2, 3});
  CHECK(cfg.n_instances == 2);
  CHECK(cfg.gap == doctest::Approx(0.25));
  CHECK(cfg.suites == std::vector<std::string>{"core", "funcalc"});
  CHECK(cfg.tol.quadrature == doctest::Approx(1e-9));
  CHECK(cfg.out_dir == "somewhere");
  std::remove(path.c_str());
}

TEST_CASE("config file diagnostics carry the line number") {
  const std::string path = write_temp("seed = 1\nnot a key value pair\n");
  try {
    SuiteConfig::from_file(path);
    CHECK(false);
  } catch (const ConfigError& e) {
    CHECK(std::string(e.what()).find(":2") != std::string::npos);
  }
  std::remove(path.c_str());

  const std::string path2 = write_temp("seed = notanumber\n");
  CHECK_THROWS_AS(SuiteConfig::from_file(path2), ConfigError);
  std::remove(path2.c_str());

  CHECK_THROWS_AS(SuiteConfig::from_file("no_such_file.txt"), ConfigError);
}

TEST_CASE("small core run passes and is deterministic modulo timing") {
  SuiteConfig cfg;
  cfg.suites = {"core"};
  cfg.dims = {2};
  cfg.n_instances = 1;
  cfg.seed = 3;
  cfg.out_dir = "harness_test_out";
  const Report a = run_suite(cfg);
  const Report b = run_suite(cfg);
  CHECK(a.ok());
  nlohmann::json ja = a.to_json();
  nlohmann::json jb = b.to_json();
  CHECK(ja.contains("timing"));
  ja.erase("timing");
  jb.erase("timing");
  CHECK(ja == jb);
  CHECK(ja["version"] == kArtifactVersion);
}

TEST_CASE("failing checks carry a repro command") {
  SuiteConfig cfg;
  cfg.suites = {"doi"};
  cfg.dims = {2};
  cfg.n_instances = 1;
  cfg.seed = 3;
  cfg.tol.residual = 1e-30;  // force failures
  cfg.out_dir = "harness_test_out";
  const Report rep = run_suite(cfg);
  CHECK_FALSE(rep.ok());
  for (const CheckResult& cr : rep.failures) {
    CHECK(cr.repro.find("oplab verify") != std::string::npos);
    CHECK(cr.repro.find("--seed") != std::string::npos);
    CHECK_FALSE(cr.pass);
  }
}

TEST_CASE("matrix artifacts use hex floats") {
  std::ostringstream os;
  CMat m(1, 2);
  m << cplx(1.5, -0.25), cplx(0.0, 2.0);
  write_matrix_artifact(os, "M", m);
  const std::string text = os.str();
  CHECK(text.find("M") != std::string::npos);
  CHECK(text.find("0x") != std::string::npos);
}
