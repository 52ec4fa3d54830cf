#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>
#include <sstream>

#include "bhl/config.hpp"
#include "bhl/errors.hpp"
#include "bhl/field_io.hpp"

using namespace bhl;

TEST_CASE("config sections: globals first, then the command section") {
  const std::string text =
      "# run settings\n"
      "p = 3\n"
      "c = 0.5   # potential\n"
      "[singular]\n"
      "p = 1.5\n"
      "K = 4\n"
      "[harnack]\n"
      "p = 4\n";
  auto s = RunConfig::parse(text, "singular");
  CHECK(s.p == 1.5);
  CHECK(s.K == 4);
  CHECK(s.c == 0.5);
  auto h = RunConfig::parse(text, "harnack");
  CHECK(h.p == 4.0);
  CHECK(h.K == 5);
  auto e = RunConfig::parse(text, "exponent");
  CHECK(e.p == 3.0);
}

TEST_CASE("config serialization round-trips exactly") {
  RunConfig cfg;
  cfg.command = "exponent";
  cfg.p = 1.0 / 3.0 + 1.0;
  cfg.opening = std::numbers::pi / 7;
  cfg.p_list = {1.5, 2.0, 3.0};
  cfg.N_list = {2, 3};
  cfg.c_list = {0.0, 0.1};
  cfg.kind = "regular";
  cfg.out = "somewhere/else";
  auto back = RunConfig::parse(cfg.serialize(), "exponent");
  CHECK(back == cfg);
  CHECK(back.hash() == cfg.hash());
  back.c = 1e-300;
  CHECK(back.hash() != cfg.hash());
}

TEST_CASE("config hash is a 16-digit FNV-1a digest") {
  // published FNV-1a 64-bit test vectors
  CHECK(fnv1a64("") == 0xcbf29ce484222325ULL);
  CHECK(fnv1a64("a") == 0xaf63dc4c8601ec8cULL);
  CHECK(fnv1a64("foobar") == 0x85944171f73967e8ULL);
  CHECK(RunConfig{}.hash().size() == 16);
}

TEST_CASE("config errors") {
  RunConfig cfg;
  CHECK_THROWS_AS(cfg.set("nonsense", "1"), ConfigError);
  CHECK_THROWS_AS(cfg.set("p", "two"), ConfigError);
  CHECK_THROWS_AS(cfg.set("K", "2.5"), ConfigError);
  CHECK_THROWS_AS(RunConfig::parse("[solve\np = 2\n", "solve"), ConfigError);
  CHECK_THROWS_AS(RunConfig::parse("p 2\n", "solve"), ConfigError);
  CHECK_THROWS_AS(RunConfig::load("/nonexistent/run.cfg", "solve"), ConfigError);
  cfg.p = 1.0;
  try {
    cfg.validate();
    FAIL("expected an error");
  } catch (const ConfigError& e) {
    CHECK(e.module() == Module::cli);
    CHECK(e.kind() == "config");
  }
  RunConfig bad;
  bad.epsilon = 2.0;
  CHECK_THROWS_AS(bad.validate(), ConfigError);
}

TEST_CASE("grid and field CSV round-trip") {
  auto dom = DomainSpec::half_disk(2.0);
  auto g = std::make_shared<const PolarGrid>(build_polar_grid(dom, 9, 7, 0.25));
  auto f = sample_field(g, [](Point x) { return x.y * std::exp(x.x); });
  std::stringstream gs, fs;
  write_grid_csv(gs, *g, "0123456789abcdef");
  write_field_csv(fs, f, "0123456789abcdef");
  CHECK(gs.str().rfind("# config-hash: 0123456789abcdef\n", 0) == 0);
  auto g2 = std::make_shared<const PolarGrid>(read_grid_csv(gs, dom));
  REQUIRE(g2->size() == g->size());
  CHECK(g2->radii() == g->radii());
  CHECK(g2->angles() == g->angles());
  CHECK(g2->tags() == g->tags());
  auto f2 = read_field_csv(fs, g2);
  CHECK(f2.values() == f.values());
}

TEST_CASE("malformed CSV is rejected") {
  auto g = std::make_shared<const PolarGrid>(build_polar_grid(DomainSpec::half_disk(1.0), 5, 5, 0.25));
  std::stringstream bad("node_id,r,theta\n0,1,2\n");
  CHECK_THROWS_AS(read_grid_csv(bad), ConfigError);
  std::stringstream shortf("node_id,r,theta,value\n0,0.25,0,1\n");
  CHECK_THROWS_AS(read_field_csv(shortf, g), ConfigError);
}

TEST_CASE("solver log JSON carries the hash") {
  SolverLog log;
  log.iterations = 7;
  auto js = solver_log_json(log, "feedfacecafebeef");
  CHECK(js.find("\"config_hash\": \"feedfacecafebeef\"") != std::string::npos);
  CHECK(js.find("\"iterations\": 7") != std::string::npos);
}

TEST_CASE("atomic writes replace the whole file") {
  const auto dir = std::filesystem::temp_directory_path() / "bhl_io_test";
  std::filesystem::create_directories(dir);
  const auto path = (dir / "out.txt").string();
  write_file_atomic(path, "first version, longer\n");
  write_file_atomic(path, "second\n");
  std::ifstream in(path);
  std::stringstream ss;
  ss << in.rdbuf();
  CHECK(ss.str() == "second\n");
  CHECK_FALSE(std::filesystem::exists(path + ".tmp"));
  std::filesystem::remove_all(dir);
}
