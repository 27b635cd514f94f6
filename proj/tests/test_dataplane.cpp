#include <catch2/catch_amalgamated.hpp>

#include "flowmux/dataplane.hpp"

using namespace flowmux;

namespace {

FiveTuple tuple_to(NodeId dst_net, std::uint16_t dport = 80, std::uint16_t sport = 4000) {
  FiveTuple t;
  t.src_addr = make_addr(0, 7);
  t.dst_addr = make_addr(dst_net, 1);
  t.src_port = sport;
  t.dst_port = dport;
  return t;
}

}  // namespace

TEST_CASE("pe pipeline: DFT hit, CFT copy, table miss") {
  SwitchState pe(0, NodeRole::PE);
  pe.cft_replace(5, 16, 2);

  FiveTuple f = tuple_to(5);
  auto first = pe.pe_admit(f, 0.0, 1.0);
  CHECK(first.kind == AdmitResult::CftCopied);  // switch-local insertion
  CHECK(first.label == 16);
  CHECK(first.out_link == 2);
  CHECK(pe.dft_size() == 1);

  auto second = pe.pe_admit(f, 0.5, 1.0);
  CHECK(second.kind == AdmitResult::DftHit);  // no table growth
  CHECK(second.label == 16);
  CHECK(pe.dft_size() == 1);

  FiveTuple other = tuple_to(9);
  CHECK(pe.pe_admit(other, 0.6, 1.0).kind == AdmitResult::NoMatch);
  CHECK(pe.dft_size() == 1);

  pe.cft_set_table_miss(true);
  CHECK(pe.pe_admit(other, 0.7, 1.0).kind == AdmitResult::PacketIn);
}

TEST_CASE("extended CFT rule outranks the plain prefix rule") {
  SwitchState pe(0, NodeRole::PE);
  pe.cft_replace(5, 20, 1);                       // plain: label 20 out 1
  pe.cft_add_rule({5, true, 443, 10, 21, 3});     // dst_port 443: label 21 out 3

  auto https = pe.pe_admit(tuple_to(5, 443, 4001), 0.0, 1.0);
  CHECK(https.kind == AdmitResult::CftCopied);
  CHECK(https.label == 21);
  CHECK(https.out_link == 3);

  auto web = pe.pe_admit(tuple_to(5, 80, 4002), 0.0, 1.0);
  CHECK(web.label == 20);
  CHECK(web.out_link == 1);
}

TEST_CASE("pe_admit rejects non-PE nodes") {
  SwitchState p(3, NodeRole::P);
  CHECK_THROWS_AS(p.pe_admit(tuple_to(5), 0.0, 1.0), std::logic_error);
}

TEST_CASE("label forwarding and faults") {
  SwitchState p(4, NodeRole::P);
  p.install_label(16, 9, 0.0);
  CHECK(p.p_forward(16, 1.0) == 9);
  CHECK(p.p_forward(999, 1.0) == kNoLink);  // unknown label: fault
}

TEST_CASE("dft garbage collection honors activity and idle timeout") {
  SwitchState pe(0, NodeRole::PE);
  pe.cft_replace(5, 16, 2);
  FiveTuple f = tuple_to(5);
  pe.pe_admit(f, 0.0, 1.0);

  // active flow: the entry cannot idle out no matter how long
  for (double t : {1.0, 5.0, 50.0}) {
    auto rep = pe.gc_tick(t);
    CHECK(rep.dft_removed == 0);
  }
  CHECK(pe.dft_size() == 1);

  pe.dft_flow_done(f, 100.0);
  CHECK(pe.gc_tick(100.5).dft_removed == 0);  // idle 0.5 < timeout 1
  auto rep = pe.gc_tick(101.5);               // idle 1.5 >= timeout
  CHECK(rep.dft_removed == 1);
  CHECK(pe.dft_size() == 0);
}

TEST_CASE("label entries: infinite entries persist, demoted ones expire") {
  SwitchState p(4, NodeRole::P);
  p.install_label(16, 9, 0.0);

  // a very long idle period does not expire an infinite entry
  CHECK(p.gc_tick(1e6).expired_labels.empty());
  CHECK(p.has_label(16));

  // attach a flow, demote, and verify forwarding keeps working until the
  // flow ends and the timeout elapses
  p.label_flow_attach(16, 2.0);
  p.demote_label(16, 1.0, 3.0);
  CHECK(p.p_forward(16, 3.5) == 9);
  CHECK(p.gc_tick(10.0).expired_labels.empty());  // still hit by a live flow
  p.label_flow_detach(16, 12.0);
  CHECK(p.gc_tick(12.5).expired_labels.empty());  // idle 0.5 < timeout
  auto rep = p.gc_tick(13.0);                     // idle 1.0 >= timeout
  REQUIRE(rep.expired_labels.size() == 1);
  CHECK(rep.expired_labels[0].first == 16);
  CHECK_FALSE(p.has_label(16));
}

TEST_CASE("demoting an unknown label reports failure") {
  SwitchState p(4, NodeRole::P);
  CHECK_FALSE(p.demote_label(77, 1.0, 0.0));
  p.install_label(77, 1, 0.0);
  CHECK(p.demote_label(77, 1.0, 0.0));
}

TEST_CASE("legacy admission installs one entry per switch on the path") {
  std::vector<SwitchState> switches;
  for (NodeId n = 0; n < 6; ++n)
    switches.emplace_back(n, n < 2 ? NodeRole::PE : NodeRole::P);

  std::vector<NodeId> path{0, 2, 3, 1};
  int packet_in = legacy_admit(switches, path, 0.0);
  CHECK(packet_in == 4);  // one Packet_IN per switch
  for (NodeId n : path) CHECK(switches[n].legacy_count() == 1);
  CHECK(switches[4].legacy_count() == 0);  // off-path nodes untouched

  // entries expire gc_timeout after the flow ends
  for (NodeId n : path) switches[n].legacy_flow_done(10.0, 1.0);
  for (NodeId n : path) CHECK(switches[n].gc_tick(10.5).legacy_removed == 0);
  for (NodeId n : path) CHECK(switches[n].gc_tick(11.0).legacy_removed == 1);
  for (NodeId n : path) CHECK(switches[n].legacy_count() == 0);
}

TEST_CASE("table dump emits one json object per entry") {
  SwitchState pe(0, NodeRole::PE);
  pe.cft_replace(5, 16, 2);
  pe.pe_admit(tuple_to(5), 0.0, 1.0);
  pe.install_label(18, 4, 0.0);
  std::string dump = pe.dump_json_lines();
  CHECK(dump.find("\"table\":\"dft\"") != std::string::npos);
  CHECK(dump.find("\"table\":\"cft\"") != std::string::npos);
  CHECK(dump.find("\"table\":\"label\"") != std::string::npos);
  CHECK(std::count(dump.begin(), dump.end(), '\n') == 3);
}
