#include <catch2/catch_amalgamated.hpp>

#include <sstream>

#include "flowmux/config.hpp"

using namespace flowmux;

TEST_CASE("defaults reproduce the headline experiment") {
  ScenarioConfig cfg;
  cfg.validate();
  CHECK(cfg.mode == SimMode::MECHANISM);
  CHECK(cfg.replications == 20);
  CHECK(cfg.thresholds.size() == 12);
  CHECK(cfg.thresholds.front() == std::pair{0.80, 0.4});
  CHECK(cfg.metrics.norm == 1);
  CHECK(cfg.metrics.warn == 1000);
  CHECK(cfg.metrics.cong == 65535);
  CHECK(cfg.traffic.pareto_shape == 1.5);
  CHECK(cfg.traffic.mean_size_bytes == 500e3);
  CHECK(cfg.traffic.mean_interarrival_s == 3e-3);
  CHECK(cfg.traffic.sim_time_s == 100.0);
  CHECK(cfg.traffic.warmup_s == 10.0);
  CHECK(cfg.gc_timeout_s == 1.0);
}

TEST_CASE("parse, serialize, parse is identity") {
  std::string text =
      "topology = data/us_backbone39.topo\n"
      "mode = legacy\n"
      "replications = 5\n"
      "seed = 99\n"
      "[thresholds]\n"
      "pairs = 0.8:0.4 0.9:0.7\n"
      "[traffic]\n"
      "sim_time_s = 30\n"
      "warmup_s = 5\n";
  std::istringstream in(text);
  ScenarioConfig a = parse_config(in);
  std::string ser = serialize_config(a);
  std::istringstream in2(ser);
  ScenarioConfig b = parse_config(in2);
  CHECK(serialize_config(b) == ser);
  CHECK(b.mode == SimMode::LEGACY);
  CHECK(b.replications == 5);
  CHECK(b.seed == 99);
  CHECK(b.thresholds == std::vector<std::pair<double, double>>{{0.8, 0.4}, {0.9, 0.7}});
  CHECK(b.traffic.sim_time_s == 30.0);
}

TEST_CASE("config rejections") {
  auto parse = [](const std::string& text) {
    std::istringstream in(text);
    return parse_config(in, "cfg");
  };
  CHECK_THROWS_AS(parse("replications = 0\n"), std::invalid_argument);
  CHECK_THROWS_AS(parse("mode = reactive\n"), ConfigError);
  CHECK_THROWS_AS(parse("bogus = 1\n"), ConfigError);
  CHECK_THROWS_AS(parse("[thresholds]\npairs = 0.4:0.8\n"), std::invalid_argument);
  CHECK_THROWS_AS(parse("[thresholds]\npairs = 0.8-0.4\n"), ConfigError);
  CHECK_THROWS_AS(parse("[traffic]\nwarmup_s = 200\n"), std::invalid_argument);
  CHECK_THROWS_WITH(parse("replications = x\n"),
                    Catch::Matchers::ContainsSubstring("bad integer"));
}

TEST_CASE("comments and sections") {
  std::string text =
      "# suite setup\n"
      "seed = 7   # trailing comment\n"
      "[metrics]\n"
      "warn = 2000 ; alt comment\n";
  std::istringstream in(text);
  ScenarioConfig cfg = parse_config(in);
  CHECK(cfg.seed == 7);
  CHECK(cfg.metrics.warn == 2000);
}
