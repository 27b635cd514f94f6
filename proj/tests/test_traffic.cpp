#include <catch2/catch_amalgamated.hpp>

#include <algorithm>
#include <set>
#include <sstream>

#include "flowmux/traffic.hpp"

using namespace flowmux;

TEST_CASE("pareto scale from mean") {
  // mean = scale * shape / (shape - 1)  =>  scale = 500 kB / 3 for shape 1.5
  CHECK_THAT(pareto_scale(1.5, 500e3), Catch::Matchers::WithinRel(500e3 / 3.0, 1e-15));
}

TEST_CASE("identical seeds give identical streams") {
  TrafficConfig cfg;
  cfg.sim_time_s = 5.0;
  cfg.warmup_s = 1.0;
  cfg.seed = 77;
  std::vector<NodeId> pes{0, 3, 9};
  auto a = generate_arrivals(cfg, pes);
  auto b = generate_arrivals(cfg, pes);
  REQUIRE(a.size() == b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    CHECK(a[i].time == b[i].time);
    CHECK(a[i].size_bytes == b[i].size_bytes);
    CHECK(a[i].tuple == b[i].tuple);
  }
}

TEST_CASE("stream properties") {
  TrafficConfig cfg;
  cfg.sim_time_s = 20.0;
  cfg.warmup_s = 1.0;
  cfg.seed = 5;
  std::vector<NodeId> pes{1, 4, 6, 9};
  auto arrivals = generate_arrivals(cfg, pes);
  REQUIRE(arrivals.size() > 1000);

  double prev = 0.0;
  std::set<FiveTuple> tuples;
  const double scale = pareto_scale(cfg.pareto_shape, cfg.mean_size_bytes);
  for (const FlowArrival& a : arrivals) {
    CHECK(a.time > prev);  // strictly increasing
    prev = a.time;
    CHECK(a.src_pe != a.dst_pe);
    CHECK(a.size_bytes >= scale);
    CHECK(network_of(a.tuple.dst_addr) == a.dst_pe);
    CHECK(network_of(a.tuple.src_addr) == a.src_pe);
    CHECK(tuples.insert(a.tuple).second);  // five-tuples never repeat
  }
}

TEST_CASE("replication seeds are independent but reproducible") {
  CHECK(mix_seed(42, 0) == mix_seed(42, 0));
  CHECK(mix_seed(42, 0) != mix_seed(42, 1));
  CHECK(mix_seed(42, 1) != mix_seed(43, 1));

  TrafficConfig cfg;
  cfg.sim_time_s = 2.0;
  cfg.warmup_s = 0.5;
  std::vector<NodeId> pes{0, 1};
  cfg.seed = mix_seed(7, 0);
  auto a = generate_arrivals(cfg, pes);
  cfg.seed = mix_seed(7, 1);
  auto b = generate_arrivals(cfg, pes);
  REQUIRE(!a.empty());
  REQUIRE(!b.empty());
  CHECK(a[0].time != b[0].time);
}

TEST_CASE("needs two PEs") {
  TrafficConfig cfg;
  CHECK_THROWS_AS(generate_arrivals(cfg, {3}), std::invalid_argument);
}

TEST_CASE("config validation") {
  TrafficConfig cfg;
  cfg.pareto_shape = 1.0;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  cfg = {};
  cfg.warmup_s = cfg.sim_time_s;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
}

TEST_CASE("inter-arrival mean over a million samples") {
  Rng rng(20240101);
  const double mean = 3e-3;
  const int n = 1'000'000;
  double sum = 0.0;
  for (int i = 0; i < n; ++i) sum += rng.exponential(mean);
  double empirical = sum / n;
  CHECK(std::abs(empirical - mean) / mean < 0.01);
}

TEST_CASE("pareto sizes over a million samples") {
  Rng rng(20240202);
  const double shape = 1.5, mean = 500e3;
  const double scale = pareto_scale(shape, mean);
  const int n = 1'000'000;

  // infinite variance: check the overall mean loosely and batch medians
  // against the analytic median scale * 2^(1/shape)
  double sum = 0.0;
  const int batches = 100, per_batch = n / batches;
  std::vector<double> medians;
  std::vector<double> batch(per_batch);
  for (int b = 0; b < batches; ++b) {
    for (int i = 0; i < per_batch; ++i) {
      batch[i] = rng.pareto(scale, shape);
      sum += batch[i];
    }
    std::nth_element(batch.begin(), batch.begin() + per_batch / 2, batch.end());
    medians.push_back(batch[per_batch / 2]);
  }
  double empirical_mean = sum / n;
  CHECK(std::abs(empirical_mean - mean) / mean < 0.05);

  double analytic_median = scale * std::pow(2.0, 1.0 / shape);
  std::nth_element(medians.begin(), medians.begin() + batches / 2, medians.end());
  double median_of_medians = medians[batches / 2];
  CHECK(std::abs(median_of_medians - analytic_median) / analytic_median < 0.02);
}

TEST_CASE("arrival csv round trip") {
  TrafficConfig cfg;
  cfg.sim_time_s = 1.0;
  cfg.warmup_s = 0.1;
  cfg.seed = 3;
  auto arrivals = generate_arrivals(cfg, {0, 2, 5});
  std::ostringstream os;
  write_arrivals_csv(os, arrivals);
  std::istringstream is(os.str());
  auto back = read_arrivals_csv(is);
  REQUIRE(back.size() == arrivals.size());
  for (std::size_t i = 0; i < back.size(); ++i) {
    CHECK(back[i].time == arrivals[i].time);
    CHECK(back[i].size_bytes == arrivals[i].size_bytes);
    CHECK(back[i].tuple == arrivals[i].tuple);
    CHECK(back[i].src_pe == arrivals[i].src_pe);
    CHECK(back[i].dst_pe == arrivals[i].dst_pe);
  }
}
