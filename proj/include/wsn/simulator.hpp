#pragma once

#include <cstdint>
#include <iosfwd>
#include <vector>

#include "wsn/scheduling.hpp"
#include "wsn/topology.hpp"
#include "wsn/types.hpp"

namespace wsn {

struct TrafficConfig {
  double report_interval_s = 10.0;     // 0 disables periodic upstream reports
  unsigned payload_bytes = 0;          // 0..127
  unsigned extra_payload_bits = 0;     // 0..1023
  unsigned header_bytes = 16;
  double downstream_interval_s = 0.0;  // 0 disables gateway downstream traffic
};

struct CsmaConfig {
  int contention_window = 8;   // backoff micro-slots, draw in [0, window)
  double micro_slot_s = 0.001;
  int max_retries = 5;         // retransmissions after the first attempt
};

/// Test/diagnostic hook: a single upstream packet handed to `node` at
/// `at_s`, bypassing the periodic generator.
struct Injection {
  NodeId node = 0;
  double at_s = 0.0;
};

struct Scenario {
  Topology topology;
  SchedulingTable table;
  ChipsetProfile profile;
  TrafficConfig traffic;
  double duration_s = 1200.0;
  std::uint64_t seed = 1;
  double slot_s = 0.1;
  CsmaConfig csma;
  int queue_capacity = 32;
  std::vector<Injection> injections;
  std::ostream* event_log = nullptr;  // optional, not owned
};

struct RunResult {
  std::vector<EnergyAccount> per_node;
  double total_energy_j = 0.0;
  double simulated_s = 0.0;  // whole slots actually simulated
  std::uint64_t packets_generated = 0;
  std::uint64_t packets_delivered = 0;
  std::uint64_t collisions = 0;
  std::uint64_t retransmissions = 0;
  std::uint64_t dropped = 0;
  std::uint64_t in_flight = 0;  // still queued when the run ended
  double mean_upstream_latency_frames = 0.0;
  std::size_t excluded_nodes = 0;
};

/// Outcome of one CSMA contention round inside a slot.
struct ContendOutcome {
  enum class Kind { Idle, Winner, Collision } kind = Kind::Idle;
  std::vector<NodeId> transmitters;  // the winner, or every tied node
  int backoff = 0;                   // micro-slots waited by the transmitters
};

class Rng;

/// Every candidate draws a uniform backoff in [0, contention_window); a
/// unique minimum wins, tied minima all transmit. Draws are consumed in
/// candidate order.
ContendOutcome contend(const std::vector<NodeId>& candidates,
                       const CsmaConfig& csma, Rng& rng);

enum class DeliverOutcome { Received, Collided, Overheard };

/// Classification of one reception: clean and addressed to us, destroyed
/// by concurrent in-range transmissions, or cleanly heard but meant for
/// somebody else (energy was spent either way).
DeliverOutcome deliver(const Packet& pkt, NodeId receiver, NodeId next_hop,
                       std::size_t concurrent_tx_in_range);

/// Deterministic slot-driven simulation of one scenario. Identical
/// scenarios (seed included) produce identical results bit for bit.
/// Throws ConfigError before simulating anything if a component is
/// invalid (bad table, packet too long for the slot, ...).
RunResult run(const Scenario& scenario);

}  // namespace wsn
