#include <catch2/catch_amalgamated.hpp>

#include "flowmux/topology.hpp"

using namespace flowmux;

TEST_CASE("shipped backbone file parses") {
  auto [topo, lsdb] = load_topology(std::string(FLOWMUX_SOURCE_DIR) +
                                    "/data/us_backbone39.topo");
  CHECK(topo.node_count() == 39);
  CHECK(topo.link_count() == 122);  // 61 bidirectional
  CHECK(topo.pe_nodes().size() == 10);
  for (LinkId l = 0; l < LinkId(topo.link_count()); ++l) {
    CHECK(topo.link(l).capacity_bps == 100e6);
    CHECK(lsdb.metric_class(l) == MetricClass::NORM);
    CHECK(lsdb.effective_metric(l) == 1);
  }
  // every bilink present in both directions
  for (LinkId l = 0; l < LinkId(topo.link_count()); ++l) {
    const DirectedLink& d = topo.link(l);
    CHECK(topo.find_link(d.to, d.from) != kNoLink);
  }
}

TEST_CASE("degenerate single node") {
  Topology t = Topology::parse_text("node 0 P\n");
  CHECK(t.node_count() == 1);
  CHECK(t.link_count() == 0);
  CHECK(t.pe_nodes().empty());
}

TEST_CASE("parse errors carry the offending line") {
  SECTION("unknown node reference") {
    std::string text =
        "node 0 PE\nnode 1 PE\nnode 2 P\nnode 3 P\nnode 4 P\n"
        "link 0 99 100e6 0.001 1\n";
    CHECK_THROWS_WITH(Topology::parse_text(text, "five.topo"),
                      Catch::Matchers::ContainsSubstring("five.topo:6") &&
                          Catch::Matchers::ContainsSubstring("unknown node 99"));
  }
  SECTION("duplicate directed link") {
    std::string text =
        "node 0 PE\nnode 1 PE\n"
        "link 0 1 1e6 0 1\nlink 0 1 2e6 0 1\n";
    CHECK_THROWS_WITH(Topology::parse_text(text),
                      Catch::Matchers::ContainsSubstring("duplicate link 0 -> 1"));
  }
  SECTION("bilink collides with explicit link") {
    std::string text =
        "node 0 PE\nnode 1 PE\n"
        "link 1 0 1e6 0 1\nbilink 0 1 1e6 0 1\n";
    CHECK_THROWS_AS(Topology::parse_text(text), TopologyError);
  }
  SECTION("nonpositive capacity") {
    std::string text = "node 0 PE\nnode 1 PE\nlink 0 1 0 0.001 1\n";
    CHECK_THROWS_WITH(Topology::parse_text(text, "t"),
                      Catch::Matchers::ContainsSubstring("t:3") &&
                          Catch::Matchers::ContainsSubstring("capacity"));
  }
  SECTION("zero metric") {
    CHECK_THROWS_AS(Topology::parse_text("node 0 PE\nnode 1 PE\nlink 0 1 1e6 0 0\n"),
                    TopologyError);
  }
  SECTION("sparse node ids") {
    CHECK_THROWS_WITH(Topology::parse_text("node 0 PE\nnode 2 PE\n"),
                      Catch::Matchers::ContainsSubstring("missing 1"));
  }
  SECTION("duplicate node") {
    CHECK_THROWS_AS(Topology::parse_text("node 0 PE\nnode 0 P\n"), TopologyError);
  }
  SECTION("self link") {
    CHECK_THROWS_AS(Topology::parse_text("node 0 PE\nlink 0 0 1e6 0 1\n"), TopologyError);
  }
  SECTION("unknown directive") {
    CHECK_THROWS_AS(Topology::parse_text("nodes 0 PE\n"), TopologyError);
  }
}

TEST_CASE("bilink expands to two directed links") {
  Topology t = Topology::parse_text("node 0 PE\nnode 1 P\nbilink 0 1 5e6 0.002 3\n");
  REQUIRE(t.link_count() == 2);
  LinkId fwd = t.find_link(0, 1), rev = t.find_link(1, 0);
  REQUIRE(fwd != kNoLink);
  REQUIRE(rev != kNoLink);
  CHECK(t.link(fwd).base_metric == 3);
  CHECK(t.link(rev).base_metric == 3);
  CHECK(t.link(rev).capacity_bps == 5e6);
}

TEST_CASE("lsdb metric transitions") {
  Topology t = Topology::parse_text("node 0 PE\nnode 1 PE\nbilink 0 1 1e8 0.001 7\n");
  Lsdb lsdb(t, MetricValues{});
  LinkId l = t.find_link(0, 1);

  CHECK(lsdb.effective_metric(l) == 7);  // NORM keeps the base metric
  CHECK(lsdb.set_metric(l, MetricClass::CONG));
  CHECK_FALSE(lsdb.set_metric(l, MetricClass::CONG));  // idempotent
  CHECK(lsdb.effective_metric(l) == 65535);
  CHECK(lsdb.set_metric(l, MetricClass::WARN));
  CHECK(lsdb.effective_metric(l) == 1000);
  CHECK(lsdb.set_metric(l, MetricClass::NORM));  // reversion is a change
  CHECK(lsdb.effective_metric(l) == 7);
  CHECK_THROWS_AS(lsdb.set_metric(99, MetricClass::NORM), std::logic_error);
}

TEST_CASE("metric value ordering enforced") {
  Topology t = Topology::parse_text("node 0 PE\n");
  CHECK_THROWS_AS(Lsdb(t, MetricValues{10, 5, 100}), std::invalid_argument);
  CHECK_THROWS_AS(Lsdb(t, MetricValues{1, 1000, 1000}), std::invalid_argument);
}
