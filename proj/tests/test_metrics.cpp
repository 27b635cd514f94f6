#include <catch2/catch_amalgamated.hpp>

#include "flowmux/metrics.hpp"

using namespace flowmux;

namespace {

SecondSample sample(double avg_labels, std::int64_t flows) {
  SecondSample s;
  s.avg_labels_p = avg_labels;
  s.active_flows = flows;
  return s;
}

}  // namespace

TEST_CASE("rx gain") {
  CHECK(rx_gain_pct(10e9, 10e9) == 0.0);
  CHECK_THAT(rx_gain_pct(13.2e9, 10.0e9), Catch::Matchers::WithinAbs(32.0, 1e-9));
  // table-scale cross-check: 14.5 GB at +32.2% implies a ~10.97 GB baseline
  CHECK_THAT(rx_gain_pct(14.5e9, 10.96822995461422e9),
             Catch::Matchers::WithinAbs(32.2, 1e-9));
  CHECK_THROWS_AS(rx_gain_pct(1.0, 0.0), std::invalid_argument);
}

TEST_CASE("peak flow reduction") {
  // 85 labels per P node against 13700 concurrent flows
  std::vector<SecondSample> s{sample(85.0, 13700)};
  CHECK_THAT(max_flow_reduction_pct(s), Catch::Matchers::WithinAbs(99.37956204379562, 1e-9));

  // labels equal to flows: no aggregation at all
  s = {sample(40.0, 40)};
  CHECK(max_flow_reduction_pct(s) == 0.0);

  // the max over time wins; zero-flow samples are skipped
  s = {sample(0.0, 0), sample(50.0, 1000), sample(10.0, 1000)};
  CHECK_THAT(max_flow_reduction_pct(s), Catch::Matchers::WithinAbs(99.0, 1e-9));

  s = {sample(0.0, 0)};
  CHECK_THROWS_AS(max_flow_reduction_pct(s), std::invalid_argument);
}

TEST_CASE("peak flow reduction is scale invariant") {
  std::mt19937_64 rng(11);
  for (int iter = 0; iter < 50; ++iter) {
    std::vector<SecondSample> a, b;
    double k = 1.0 + double(rng() % 50);
    for (int i = 0; i < 20; ++i) {
      double labels = double(rng() % 1000) / 7.0;
      std::int64_t flows = 1 + std::int64_t(rng() % 20000);
      a.push_back(sample(labels, flows));
      b.push_back(sample(labels * k, std::int64_t(double(flows) * k)));
    }
    CHECK_THAT(max_flow_reduction_pct(a),
               Catch::Matchers::WithinAbs(max_flow_reduction_pct(b), 1e-6));
  }
}

TEST_CASE("comparative flow reduction") {
  CHECK(comparative_flow_reduction_pct(85.0, 85.0) == 0.0);
  CHECK_THAT(comparative_flow_reduction_pct(85.0, 2014.2),
             Catch::Matchers::WithinAbs(95.77996226789793, 1e-9));
  CHECK_THROWS_AS(comparative_flow_reduction_pct(85.0, 0.0), std::invalid_argument);
}

TEST_CASE("student t quantiles") {
  CHECK_THAT(student_t_quantile(0.975, 4),
             Catch::Matchers::WithinAbs(2.7764451051977987, 1e-7));
  CHECK_THAT(student_t_quantile(0.975, 19),
             Catch::Matchers::WithinAbs(2.093024054408263, 1e-7));
  CHECK_THAT(student_t_quantile(0.975, 1), Catch::Matchers::WithinAbs(12.7062047362, 1e-6));
}

TEST_CASE("confidence interval") {
  // constant samples collapse to zero width
  MeanCi c = confidence_interval({2.5, 2.5, 2.5});
  CHECK(c.mean == 2.5);
  CHECK_THAT(c.half_width, Catch::Matchers::WithinAbs(0.0, 1e-12));

  // hand-computed t interval on {1..5}: mean 3, s = 1.5811, t = 2.7764
  MeanCi h = confidence_interval({1, 2, 3, 4, 5});
  CHECK_THAT(h.mean, Catch::Matchers::WithinAbs(3.0, 1e-12));
  CHECK_THAT(h.half_width, Catch::Matchers::WithinAbs(1.9632431614775607, 1e-6));

  CHECK_THROWS_AS(confidence_interval({1.0}), std::invalid_argument);
}

TEST_CASE("run aggregation pairs seeds and uses the t interval") {
  std::vector<RunResult> runs(20);
  for (int i = 0; i < 20; ++i) {
    runs[i].rx_bytes = 1e9 + 1e7 * i;
    runs[i].tx_bytes = runs[i].rx_bytes;
    runs[i].avg_tput_mbps = 1000.0 + i;
    runs[i].mode = "mechanism";
    runs[i].ctrl_msgs_per_s_max = 100.0 + i;
  }
  KpiReport rep = aggregate_runs(runs);
  CHECK(rep.runs == 20);
  CHECK_THAT(rep.rx_gb.mean, Catch::Matchers::WithinRel(1.095, 1e-12));
  CHECK(rep.ctrl_msgs_per_s_worst == 119.0);
  // n = 20 uses t(0.975, 19)
  std::vector<double> v;
  for (auto& r : runs) v.push_back(r.avg_tput_mbps);
  double s = 0, mean = 1009.5;
  for (double x : v) s += (x - mean) * (x - mean);
  s = std::sqrt(s / 19.0);
  double expect = 2.093024054408263 * s / std::sqrt(20.0);
  CHECK_THAT(rep.avg_tput_mbps.half_width, Catch::Matchers::WithinAbs(expect, 1e-9));
}

TEST_CASE("throughput consistency with byte totals") {
  RunResult r;
  r.rx_bytes = 13.2e9;
  r.avg_tput_mbps = r.rx_bytes * 8.0 / 90.0 / 1e6;
  CHECK_THAT(r.avg_tput_mbps * 1e6 * 90.0 / 8.0,
             Catch::Matchers::WithinRel(r.rx_bytes, 1e-6));
}
