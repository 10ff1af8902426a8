#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "ggibbs/experiments.hpp"
#include "ggibbs/json_io.hpp"
#include "ggibbs/measure.hpp"
#include "ggibbs/version.hpp"

using namespace ggibbs;
namespace fs = std::filesystem;

namespace {

std::string fresh_dir(const std::string& tag) {
  auto p = fs::temp_directory_path() / ("ggibbs_test_" + tag);
  fs::remove_all(p);
  fs::create_directories(p);
  return p.string();
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in.good());
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

}  // namespace

TEST_CASE("config resolution and validation") {
  for (const auto& name : experiment_names()) {
    Json cfg = default_config(name);
    Json resolved = resolve_config(cfg, CliOverrides{});
    CHECK(resolved.at("experiment").get<std::string>() == name);
    CHECK(resolved.at("schema_version").get<int>() == kConfigSchemaVersion);
  }

  // unknown experiment
  Json bad;
  bad["experiment"] = "no-such-thing";
  CHECK_THROWS_AS(resolve_config(bad, CliOverrides{}), SchemaError);

  // schedule must be strictly increasing
  Json cfg = default_config("vp-1d");
  cfg["schedule"] = {4, 4, 8};
  CHECK_THROWS_AS(resolve_config(cfg, CliOverrides{}), SchemaError);

  // schema_version pinned
  Json cfg2 = default_config("vp-1d");
  cfg2["schema_version"] = 99;
  CHECK_THROWS_AS(resolve_config(cfg2, CliOverrides{}), SchemaError);

  // MC experiments always end up with a seed after resolution
  Json explicit_cfg;
  explicit_cfg["experiment"] = "grising";
  Json ok = resolve_config(explicit_cfg, CliOverrides{});
  CHECK(ok.contains("seed"));

  // overrides win
  CliOverrides ov;
  ov.seed = 777;
  ov.schedule = {2, 3};
  ov.out_dir = "/tmp/somewhere";
  Json r = resolve_config(default_config("grising"), ov);
  CHECK(r.at("seed").get<std::uint64_t>() == 777);
  CHECK(r.at("schedule").get<std::vector<int>>() == std::vector<int>{2, 3});
  CHECK(r.at("out_dir").get<std::string>() == "/tmp/somewhere");
}

TEST_CASE("experiment artifacts embed the resolved config and version") {
  std::string dir = fresh_dir("artifact");
  CliOverrides ov;
  ov.out_dir = dir;
  Json cfg = resolve_config(default_config("vp-product"), ov);
  CHECK(run_experiment(cfg) == kExitOk);
  Json artifact = Json::parse(slurp(dir + "/vp-product.json"));
  CHECK(artifact.at("version").get<std::string>() == kVersion);
  CHECK(artifact.at("config") == cfg);
  for (const auto& row : artifact.at("results").at("rows"))
    CHECK(row.at("abs_diff").get<double>() <= 1e-10);
}

TEST_CASE("resource caps exit with code 3") {
  std::string dir = fresh_dir("cap");
  CliOverrides ov;
  ov.out_dir = dir;
  Json cfg = default_config("corr-decay");
  cfg["params"]["window"] = 40;  // 2^40 states: over the enumeration cap
  Json resolved = resolve_config(cfg, ov);
  CHECK(run_experiment(resolved) == kExitResource);
}

TEST_CASE("identical config and seed give byte-identical outputs") {
  std::string d1 = fresh_dir("repA");
  Json cfg = default_config("grising");
  cfg["params"]["replicas"] = 8;
  cfg["schedule"] = {3, 4};
  CliOverrides ov;
  ov.out_dir = d1;
  ov.seed = 991;
  Json resolved = resolve_config(cfg, ov);

  // two runs of the very same config: every artifact byte-identical
  CHECK(run_experiment(resolved) == kExitOk);
  std::string json1 = slurp(d1 + "/grising.json");
  std::string csv1 = slurp(d1 + "/grising.csv");
  std::string jsonl1 = slurp(d1 + "/grising_samples.jsonl");
  CHECK(run_experiment(resolved) == kExitOk);
  CHECK(slurp(d1 + "/grising.json") == json1);
  CHECK(slurp(d1 + "/grising.csv") == csv1);
  CHECK(slurp(d1 + "/grising_samples.jsonl") == jsonl1);

  // a different worker count must not change any result payload
  std::string d2 = fresh_dir("repB");
  Json resolved2 = resolved;
  resolved2["out_dir"] = d2;
  resolved2["workers"] = 2;
  CHECK(run_experiment(resolved2) == kExitOk);
  CHECK(slurp(d2 + "/grising_samples.jsonl") == jsonl1);
  CHECK(slurp(d2 + "/grising.csv") == csv1);
  Json a = Json::parse(json1);
  Json b = Json::parse(slurp(d2 + "/grising.json"));
  CHECK(a.at("results") == b.at("results"));

  // a different seed changes the sample stream
  std::string d3 = fresh_dir("repC");
  CliOverrides ov3;
  ov3.out_dir = d3;
  ov3.seed = 992;
  CHECK(run_experiment(resolve_config(cfg, ov3)) == kExitOk);
  CHECK(jsonl1 != slurp(d3 + "/grising_samples.jsonl"));
}

TEST_CASE("sample sets round-trip through JSON lines") {
  std::string dir = fresh_dir("jsonl");
  SampleSet s;
  s.window = Window::interval(0, 3);
  s.q = 3;
  s.sampler_id = "test";
  s.seed = 5;
  s.sweeps = 2;
  s.burn_in = 1;
  s.samples = {{0, 1, 2, 0}, {2, 2, 1, 0}};
  write_sample_set(s, dir + "/s.jsonl");
  SampleSet r = read_sample_set(dir + "/s.jsonl");
  CHECK(r.window == s.window);
  CHECK(r.q == s.q);
  CHECK(r.seed == s.seed);
  CHECK(r.samples == s.samples);
}

TEST_CASE("configuration and potential JSON round-trips") {
  auto cfg = Configuration(Window::box2(-1, 0, 1, 1), SpinAlphabet::ising(), {1, 0, 1, 1, 0, 0},
                           Exterior::lex_split(origin(), 0, 1));
  Json j = to_json(cfg);
  CHECK(configuration_from_json(j) == cfg);

  auto phi = ising_potential(2, 0.75, 0.25);
  Json pj = to_json(phi);
  auto phi2 = potential_from_json(pj);
  CHECK(phi2.range() == phi.range());
  Window vol = Window::box2(0, 0, 1, 1);
  auto omega = Configuration::constant(vol.expanded(1), SpinAlphabet::ising(), 1);
  CHECK(log_partition(phi2, vol, Boundary::fixed(omega)) ==
        doctest::Approx(log_partition(phi, vol, Boundary::fixed(omega))).epsilon(1e-15));
}
