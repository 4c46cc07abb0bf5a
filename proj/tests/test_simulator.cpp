#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <map>
#include <sstream>

#include "wsn/chipset.hpp"
#include "wsn/errors.hpp"
#include "wsn/rng.hpp"
#include "wsn/simulator.hpp"

using namespace wsn;

namespace {

Deployment line_deployment(std::size_t count, double spacing_cm = 100.0) {
  Deployment d;
  d.kind = DeploymentKind::Random;
  d.area = {spacing_cm * count + 1.0, 10.0};
  for (std::size_t i = 0; i < count; ++i)
    d.positions.push_back({spacing_cm * i, 0.0});
  return d;
}

Scenario base_scenario(const Deployment& d, TableKind kind,
                       double duration_s = 60.0) {
  Scenario sc;
  sc.topology = build_topology(d, 150.0);
  sc.table = build_table(kind);
  sc.profile = default_profiles()[0];
  sc.duration_s = duration_s;
  sc.seed = 99;
  sc.traffic.report_interval_s = 0.0;  // tests opt in to traffic explicitly
  return sc;
}

bool results_equal(const RunResult& a, const RunResult& b) {
  if (a.total_energy_j != b.total_energy_j) return false;
  if (a.packets_generated != b.packets_generated) return false;
  if (a.packets_delivered != b.packets_delivered) return false;
  if (a.collisions != b.collisions) return false;
  if (a.retransmissions != b.retransmissions) return false;
  if (a.dropped != b.dropped) return false;
  if (a.in_flight != b.in_flight) return false;
  if (a.mean_upstream_latency_frames != b.mean_upstream_latency_frames)
    return false;
  for (std::size_t i = 0; i < a.per_node.size(); ++i) {
    if (a.per_node[i].energy_j != b.per_node[i].energy_j) return false;
    for (RadioState s : kRadioStates)
      if (a.per_node[i].duration(s) != b.per_node[i].duration(s)) return false;
  }
  return true;
}

}  // namespace

TEST_CASE("contend: single candidate wins, empty set idles") {
  CsmaConfig csma;
  Rng rng(1);
  const ContendOutcome idle = contend({}, csma, rng);
  CHECK(idle.kind == ContendOutcome::Kind::Idle);

  const ContendOutcome one = contend({7}, csma, rng);
  CHECK(one.kind == ContendOutcome::Kind::Winner);
  REQUIRE(one.transmitters.size() == 1);
  CHECK(one.transmitters[0] == 7);
  CHECK(one.backoff >= 0);
  CHECK(one.backoff < csma.contention_window);
}

TEST_CASE("contend: two-candidate collision rate matches 1/W") {
  CsmaConfig csma;
  csma.contention_window = 8;
  Rng rng(424242);
  const int trials = 100000;
  int collisions = 0;
  for (int i = 0; i < trials; ++i) {
    const ContendOutcome o = contend({1, 2}, csma, rng);
    if (o.kind == ContendOutcome::Kind::Collision) ++collisions;
  }
  const double p = 1.0 / csma.contention_window;
  const double sigma = std::sqrt(p * (1 - p) / trials);
  const double observed = static_cast<double>(collisions) / trials;
  CHECK(std::fabs(observed - p) <= 3.0 * sigma);
}

TEST_CASE("deliver outcomes") {
  Packet pkt;
  CHECK(deliver(pkt, 3, 3, 1) == DeliverOutcome::Received);
  CHECK(deliver(pkt, 3, 3, 2) == DeliverOutcome::Collided);
  CHECK(deliver(pkt, 4, 3, 1) == DeliverOutcome::Overheard);
}

TEST_CASE("two-node topology, one packet, no contention") {
  Scenario sc = base_scenario(line_deployment(2), TableKind::X, 30.0);
  sc.injections = {{1, 0.0}};
  const RunResult r = run(sc);
  CHECK(r.packets_generated == 1);
  CHECK(r.packets_delivered == 1);
  CHECK(r.collisions == 0);
  CHECK(r.dropped == 0);
  CHECK(r.in_flight == 0);
  CHECK(r.mean_upstream_latency_frames == 1.0);
}

TEST_CASE("zero-traffic run is the pure schedule duty cycle") {
  const Deployment d = line_deployment(5);
  for (TableKind kind : kAllTableKinds) {
    Scenario sc = base_scenario(d, kind, 60.0);
    const RunResult r = run(sc);
    const SchedulingTable& t = sc.table;
    const long long frames = static_cast<long long>(
        std::floor(sc.duration_s / sc.slot_s + 1e-9)) / t.slots_per_frame;
    INFO(to_string(kind));
    for (std::size_t i = 0; i < 5; ++i) {
      CHECK(r.per_node[i].duration(RadioState::Transmit) == 0.0);
      // expected per-frame composition straight from the table row
      double listen = 0, receive = 0, sleep = 0;
      for (int s = 0; s < t.slots_per_frame; ++s) {
        const SlotAction a = slot_action(t, sc.topology.zone[i], s);
        if (a == SlotAction::Sleep) {
          sleep += sc.slot_s;
        } else if (is_receive(a)) {
          receive += sc.slot_s;
        } else if (t.sleep_when_done) {
          sleep += sc.slot_s;  // nothing queued: straight back to sleep
        } else {
          listen += sc.slot_s;  // idle channel sensing
        }
      }
      CHECK(r.per_node[i].duration(RadioState::Listen) ==
            doctest::Approx(listen * frames).epsilon(1e-12));
      CHECK(r.per_node[i].duration(RadioState::Receive) ==
            doctest::Approx(receive * frames).epsilon(1e-12));
      CHECK(r.per_node[i].duration(RadioState::Sleep) ==
            doctest::Approx(sleep * frames).epsilon(1e-12));
    }
  }
}

TEST_CASE("per-node state durations sum to the simulated time") {
  Scenario sc = base_scenario(line_deployment(9), TableKind::V9x9, 120.0);
  sc.traffic.report_interval_s = 5.0;
  sc.traffic.extra_payload_bits = 512;
  const RunResult r = run(sc);
  for (const auto& acct : r.per_node)
    CHECK(acct.total_duration_s() ==
          doctest::Approx(r.simulated_s).epsilon(1e-9));
  // and the energy ledger recomputes from the durations
  for (const auto& acct : r.per_node) {
    double e = 0;
    for (RadioState s : kRadioStates)
      e += power_draw(sc.profile, s) * acct.duration(s);
    CHECK(acct.energy_j == doctest::Approx(e).epsilon(1e-9));
  }
}

TEST_CASE("identical scenarios give identical results") {
  Scenario sc = base_scenario(line_deployment(7), TableKind::X, 90.0);
  sc.traffic.report_interval_s = 3.0;
  const RunResult a = run(sc);
  const RunResult b = run(sc);
  CHECK(results_equal(a, b));

  Scenario other = sc;
  other.seed = sc.seed + 1;
  const RunResult c = run(other);
  CHECK_FALSE(results_equal(a, c));
}

TEST_CASE("single packet delivery matches the analytic slot chase") {
  // 9-zone line: one uncontended upstream packet from every origin zone,
  // against uncontended_latency_frames for all six tables.
  const Deployment d = line_deployment(9);
  for (TableKind kind : kAllTableKinds) {
    for (NodeId origin = 1; origin <= 8; ++origin) {
      Scenario sc = base_scenario(d, kind, 120.0);
      sc.injections = {{origin, 0.0}};
      const RunResult r = run(sc);
      INFO(to_string(kind), " origin zone ", origin);
      REQUIRE(r.packets_delivered == 1);
      CHECK(r.collisions == 0);
      const int expect = uncontended_latency_frames(sc.table, origin);
      CHECK(r.mean_upstream_latency_frames == static_cast<double>(expect));
    }
  }
}

TEST_CASE("X crosses 8 zones in one frame, V9x9 needs two") {
  const Deployment d = line_deployment(9);
  Scenario sc = base_scenario(d, TableKind::X, 30.0);
  sc.injections = {{8, 0.0}};
  CHECK(run(sc).mean_upstream_latency_frames == 1.0);

  Scenario sc9 = base_scenario(d, TableKind::V9x9, 30.0);
  sc9.injections = {{8, 0.0}};
  CHECK(run(sc9).mean_upstream_latency_frames == 2.0);
}

TEST_CASE("forced tie: both same-zone transmitters collide and drop") {
  // gateway at the middle; nodes 1 and 2 both zone 1, sharing the gateway
  // as parent; a window of one micro-slot forces every draw to tie.
  Deployment d;
  d.area = {400.0, 10.0};
  d.positions = {{200.0, 0.0}, {100.0, 0.0}, {300.0, 0.0}};
  Scenario sc;
  sc.topology = build_topology(d, 150.0);
  sc.table = build_table(TableKind::V);
  sc.profile = default_profiles()[0];
  sc.duration_s = 60.0;
  sc.traffic.report_interval_s = 0.0;
  sc.csma.contention_window = 1;
  sc.injections = {{1, 0.0}, {2, 0.0}};
  const RunResult r = run(sc);
  CHECK(r.packets_generated == 2);
  CHECK(r.packets_delivered == 0);
  CHECK(r.collisions >= 1);
  CHECK(r.dropped == 2);
  CHECK(r.retransmissions == static_cast<std::uint64_t>(2 * sc.csma.max_retries));
  CHECK(r.in_flight == 0);
}

TEST_CASE("overhearing costs receive energy whether or not in range") {
  // G(0) -- P1(1), P2(2) in zone 1, T(3) in zone 2 under P1. In the
  // triangle variant T is also in range of P2, so P2 overhears T's
  // transmissions; its receive bill is identical either way because a
  // receive slot is paid in full.
  Deployment tri;
  tri.area = {400.0, 400.0};
  tri.positions = {{0.0, 0.0}, {100.0, 0.0}, {0.0, 100.0}, {140.0, 75.0}};
  Deployment far = tri;
  far.positions[3] = {210.0, 40.0};  // out of P2's range, still under P1

  RunResult rr[2];
  int variant = 0;
  for (const Deployment* d : {&tri, &far}) {
    Scenario sc;
    sc.topology = build_topology(*d, 150.0);
    REQUIRE(sc.topology.zone[3] == 2);
    REQUIRE(sc.topology.parent[3] == 1);
    sc.table = build_table(TableKind::V);
    sc.profile = default_profiles()[0];
    sc.duration_s = 40.0;
    sc.traffic.report_interval_s = 0.0;
    sc.injections = {{3, 0.0}};
    rr[variant++] = run(sc);
  }
  CHECK(rr[0].packets_delivered == 1);
  CHECK(rr[1].packets_delivered == 1);
  CHECK(rr[0].per_node[2].duration(RadioState::Receive) > 0.0);
  CHECK(rr[0].per_node[2].duration(RadioState::Receive) ==
        rr[1].per_node[2].duration(RadioState::Receive));
  CHECK(rr[0].per_node[2].energy_j == rr[1].per_node[2].energy_j);
}

TEST_CASE("bounded queues drop on overflow but the ledger still balances") {
  Scenario sc = base_scenario(line_deployment(6), TableKind::V9x9, 120.0);
  sc.traffic.report_interval_s = 0.2;  // far beyond the service rate
  sc.queue_capacity = 4;
  const RunResult r = run(sc);
  CHECK(r.dropped > 0);
  CHECK(r.packets_delivered + r.dropped + r.in_flight == r.packets_generated);
}

TEST_CASE("packet count formula for periodic generation") {
  Scenario sc = base_scenario(line_deployment(3), TableKind::V, 120.0);
  sc.traffic.report_interval_s = 10.0;
  sc.queue_capacity = 1000;
  const RunResult r = run(sc);
  // 2 sensing nodes x 12 reports each (jitter < one frame << interval)
  CHECK(r.packets_generated == 24);
}

TEST_CASE("energy is non-decreasing in extra payload on a fixed timeline") {
  const Deployment d = deploy_random(12, {400.0, 300.0}, 5);
  for (TableKind kind : {TableKind::X, TableKind::Leon4x4CrossedShifted}) {
    double prev = -1.0;
    std::uint64_t delivered0 = 0, collisions0 = 0;
    for (unsigned bits : {0u, 256u, 512u, 1023u}) {
      Scenario sc;
      sc.topology = build_topology(d, 150.0);
      sc.table = build_table(kind);
      sc.profile = default_profiles()[1];
      sc.duration_s = 120.0;
      sc.seed = 31337;
      sc.traffic.report_interval_s = 6.0;
      sc.traffic.extra_payload_bits = bits;
      const RunResult r = run(sc);
      if (prev >= 0.0) {
        CHECK(r.total_energy_j >= prev);
        CHECK(r.packets_delivered == delivered0);
        CHECK(r.collisions == collisions0);
      } else {
        delivered0 = r.packets_delivered;
        collisions0 = r.collisions;
      }
      prev = r.total_energy_j;
    }
  }
}

TEST_CASE("chipsets share the timeline; dominance orders the energy") {
  const Deployment d = deploy_random(15, {500.0, 300.0}, 77);
  const auto profiles = default_profiles();
  std::vector<RunResult> results;
  for (const auto& p : profiles) {
    Scenario sc;
    sc.topology = build_topology(d, 150.0);
    sc.table = build_table(TableKind::V9x9);
    sc.profile = p;
    sc.duration_s = 120.0;
    sc.seed = 4242;
    sc.traffic.report_interval_s = 7.0;
    results.push_back(run(sc));
  }
  CHECK(results[0].packets_delivered == results[1].packets_delivered);
  CHECK(results[1].packets_delivered == results[2].packets_delivered);
  CHECK(results[0].collisions == results[1].collisions);
  CHECK(results[1].collisions == results[2].collisions);
  for (std::size_t i = 0; i < results[0].per_node.size(); ++i)
    for (RadioState s : kRadioStates)
      CHECK(results[0].per_node[i].duration(s) ==
            results[1].per_node[i].duration(s));
  CHECK(results[0].total_energy_j < results[1].total_energy_j);
  CHECK(results[1].total_energy_j < results[2].total_energy_j);
}

TEST_CASE("event log: transmissions only in transmit slots, jittered reports") {
  Scenario sc = base_scenario(line_deployment(5), TableKind::X, 40.0);
  sc.traffic.report_interval_s = 4.0;
  std::ostringstream log;
  sc.event_log = &log;
  const RunResult r = run(sc);
  CHECK(r.packets_generated > 0);

  std::istringstream in(log.str());
  std::string line;
  int tx_events = 0;
  const double frame_s = sc.table.frame_time_s(sc.slot_s);
  while (std::getline(in, line)) {
    std::istringstream ls(line);
    double t;
    long long frame;
    int slot;
    unsigned node;
    std::string event;
    REQUIRE(ls >> t >> frame >> slot >> node >> event);
    if (event == "tx") {
      ++tx_events;
      const SlotAction a = slot_action(sc.table, sc.topology.zone[node], slot);
      CHECK(is_transmit(a));
    }
    if (event == "gen") {
      std::string dir, tpart;
      ls >> dir >> tpart;
      const double created = std::stod(tpart.substr(2));
      // created = jitter + k * interval with jitter < one frame
      const double jitter =
          created - std::floor(created / sc.traffic.report_interval_s) *
                        sc.traffic.report_interval_s;
      CHECK(jitter < frame_s);
    }
  }
  CHECK(tx_events > 0);
}

TEST_CASE("upstream hop traces walk strictly down the zones") {
  Scenario sc = base_scenario(line_deployment(9), TableKind::V, 60.0);
  sc.injections = {{8, 0.0}};
  std::ostringstream log;
  sc.event_log = &log;
  run(sc);
  std::istringstream in(log.str());
  std::string line;
  int last_zone = 9;
  while (std::getline(in, line)) {
    std::istringstream ls(line);
    double t;
    long long frame;
    int slot;
    unsigned node;
    std::string event;
    ls >> t >> frame >> slot >> node >> event;
    if (event == "tx") {
      const int z = sc.topology.zone[node];
      CHECK(z == last_zone - 1);
      last_zone = z;
    }
  }
  CHECK(last_zone == 1);  // the final transmitter was zone 1
}

TEST_CASE("scenario validation rejects broken configurations") {
  const Deployment d = line_deployment(3);
  Scenario sc = base_scenario(d, TableKind::V, 10.0);

  Scenario bad = sc;
  bad.duration_s = 0.0;
  CHECK_THROWS_AS(run(bad), ConfigError);

  bad = sc;
  bad.traffic.payload_bytes = 128;
  CHECK_THROWS_AS(run(bad), ConfigError);

  bad = sc;
  bad.traffic.payload_bytes = 127;
  bad.traffic.extra_payload_bits = 1023;  // 2199 bits exceed a 100 ms slot
  CHECK_THROWS_AS(run(bad), ConfigError);

  bad = sc;
  bad.csma.contention_window = 0;
  CHECK_THROWS_AS(run(bad), ConfigError);

  bad = sc;
  bad.table.cell(1, 0) = SlotAction::Sleep;  // break pairing
  CHECK_THROWS_AS(run(bad), ConfigError);

  bad = sc;
  bad.injections = {{0, 0.0}};  // gateway cannot inject upstream
  CHECK_THROWS_AS(run(bad), ConfigError);
}

TEST_CASE("downstream traffic flows away from the gateway") {
  Scenario sc = base_scenario(line_deployment(4), TableKind::X, 200.0);
  sc.traffic.downstream_interval_s = 20.0;
  const RunResult r = run(sc);
  CHECK(r.packets_generated > 0);
  CHECK(r.packets_delivered > 0);
  CHECK(r.packets_delivered + r.dropped + r.in_flight == r.packets_generated);
}
