#include "wsn/simulator.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <deque>
#include <ostream>
#include <string>

#include "wsn/chipset.hpp"
#include "wsn/errors.hpp"
#include "wsn/rng.hpp"

namespace wsn {

ContendOutcome contend(const std::vector<NodeId>& candidates,
                       const CsmaConfig& csma, Rng& rng) {
  ContendOutcome out;
  if (candidates.empty()) return out;
  std::vector<int> draws(candidates.size());
  int min_draw = csma.contention_window;
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    draws[i] = static_cast<int>(
        rng.below(static_cast<std::uint32_t>(csma.contention_window)));
    min_draw = std::min(min_draw, draws[i]);
  }
  for (std::size_t i = 0; i < candidates.size(); ++i)
    if (draws[i] == min_draw) out.transmitters.push_back(candidates[i]);
  out.backoff = min_draw;
  out.kind = out.transmitters.size() == 1 ? ContendOutcome::Kind::Winner
                                          : ContendOutcome::Kind::Collision;
  return out;
}

DeliverOutcome deliver(const Packet&, NodeId receiver, NodeId next_hop,
                       std::size_t concurrent_tx_in_range) {
  if (receiver != next_hop) return DeliverOutcome::Overheard;
  return concurrent_tx_in_range == 1 ? DeliverOutcome::Received
                                     : DeliverOutcome::Collided;
}

namespace {

struct QueuedPacket {
  Packet pkt;
  long long eligible_from_slot = 0;
  int retries_used = 0;
};

struct NodeState {
  std::deque<QueuedPacket> queue;
  double jitter_s = 0.0;
  double next_report_s = -1.0;   // < 0: no periodic traffic
  double next_downstream_s = -1.0;
};

struct ActiveTx {
  NodeId node = 0;
  int zone = 0;
  SlotAction action = SlotAction::Sleep;
  int backoff = 0;
  std::size_t queue_index = 0;
  bool retransmission = false;
};

bool direction_matches(SlotAction a, Direction d) {
  switch (a) {
    case SlotAction::TransmitUp: return d == Direction::Upstream;
    case SlotAction::TransmitDown: return d == Direction::Downstream;
    case SlotAction::TransmitBroadcast:
      return d == Direction::Downstream || d == Direction::Broadcast;
    default: return false;
  }
}

void validate_scenario(const Scenario& sc, double air_s) {
  if (!(sc.duration_s > 0.0)) throw ConfigError("duration_s must be positive");
  if (!(sc.slot_s > 0.0)) throw ConfigError("slot_s must be positive");
  if (sc.csma.contention_window < 1)
    throw ConfigError("contention_window must be >= 1");
  if (sc.csma.micro_slot_s < 0.0)
    throw ConfigError("micro_slot_s must be non-negative");
  if (sc.csma.max_retries < 0) throw ConfigError("max_retries must be >= 0");
  if (sc.queue_capacity < 1) throw ConfigError("queue_capacity must be >= 1");
  if (sc.traffic.payload_bytes > kMaxPayloadBytes)
    throw ConfigError("payload_bytes exceeds 127");
  if (sc.traffic.extra_payload_bits > kMaxExtraPayloadBits)
    throw ConfigError("extra_payload_bits exceeds 1023");
  if (sc.traffic.report_interval_s < 0.0 || sc.traffic.downstream_interval_s < 0.0)
    throw ConfigError("traffic intervals must be non-negative");
  validate_profile(sc.profile);

  const ValidationReport rep = validate_table(sc.table);
  if (!rep.ok())
    throw ConfigError("scheduling table is invalid: " + rep.violations.front());

  if (sc.topology.count() < 2) throw ConfigError("topology needs >= 2 nodes");
  if (sc.topology.zone[kGatewayId] != 0)
    throw ConfigError("topology: gateway must be in zone 0");

  const double worst = (sc.csma.contention_window - 1) * sc.csma.micro_slot_s + air_s;
  if (worst > sc.slot_s)
    throw ConfigError(
        "slot_s too short: worst-case backoff plus packet airtime is " +
        std::to_string(worst) + " s");

  for (const auto& inj : sc.injections) {
    if (inj.node >= sc.topology.count() || !sc.topology.active(inj.node) ||
        inj.node == kGatewayId)
      throw ConfigError("injection target must be an active non-gateway node");
    if (inj.at_s < 0.0) throw ConfigError("injection time must be >= 0");
  }
}

}  // namespace

RunResult run(const Scenario& sc) {
  const std::size_t n = sc.topology.count();
  const Topology& topo = sc.topology;
  const SchedulingTable& table = sc.table;

  Packet proto;  // every packet in a run has the same wire size
  proto.header_bytes = sc.traffic.header_bytes;
  proto.payload_bytes = sc.traffic.payload_bytes;
  proto.extra_payload_bits = sc.traffic.extra_payload_bits;
  const double air_s = airtime_s(packet_bits(proto, sc.profile), sc.profile);

  validate_scenario(sc, air_s);

  const int slots_per_frame = table.slots_per_frame;
  const double frame_s = table.frame_time_s(sc.slot_s);
  const long long n_slots =
      static_cast<long long>(std::floor(sc.duration_s / sc.slot_s + 1e-9));

  RunResult res;
  res.per_node.resize(n);
  res.simulated_s = n_slots * sc.slot_s;
  res.excluded_nodes = topo.excluded.size();

  // Static structure: per-zone membership, children lists, flat in-range
  // matrix (the unit-disk adjacency is exactly the interference range).
  const int max_zone = topo.max_zone();
  std::vector<std::vector<NodeId>> zone_nodes(max_zone + 1);
  for (std::size_t i = 0; i < n; ++i)
    if (topo.active(static_cast<NodeId>(i)))
      zone_nodes[topo.zone[i]].push_back(static_cast<NodeId>(i));

  std::vector<std::vector<NodeId>> children(n);
  for (std::size_t i = 0; i < n; ++i) {
    const NodeId p = topo.parent[i];
    if (p != static_cast<NodeId>(i)) children[p].push_back(static_cast<NodeId>(i));
  }

  std::vector<std::uint8_t> in_range(n * n, 0);
  for (std::size_t u = 0; u < n; ++u)
    for (NodeId v : topo.adjacency[u]) in_range[u * n + v] = 1;
  auto adjacent = [&](NodeId a, NodeId b) { return in_range[a * n + b] != 0; };

  Rng rng(sc.seed);
  std::vector<NodeState> nodes(n);
  for (std::size_t i = 0; i < n; ++i) {
    nodes[i].jitter_s = rng.unit() * frame_s;
    if (!topo.active(static_cast<NodeId>(i))) continue;
    if (i != kGatewayId && sc.traffic.report_interval_s > 0.0)
      nodes[i].next_report_s = nodes[i].jitter_s;
    if (i == kGatewayId && sc.traffic.downstream_interval_s > 0.0)
      nodes[i].next_downstream_s = nodes[i].jitter_s;
  }

  std::vector<Injection> injections = sc.injections;
  std::stable_sort(injections.begin(), injections.end(),
                   [](const Injection& a, const Injection& b) {
                     return a.at_s != b.at_s ? a.at_s < b.at_s : a.node < b.node;
                   });
  std::size_t next_injection = 0;

  std::uint64_t latency_frames_sum = 0;
  std::uint64_t latency_count = 0;

  std::ostream* log = sc.event_log;
  char logbuf[160];
  auto log_event = [&](long long slot, NodeId node, const char* event,
                       const std::string& detail) {
    if (!log) return;
    std::snprintf(logbuf, sizeof logbuf, "%.3f %lld %d %u %s %s",
                  slot * sc.slot_s, slot / slots_per_frame,
                  static_cast<int>(slot % slots_per_frame), node, event,
                  detail.c_str());
    *log << logbuf << "\n";
  };

  auto enqueue_origin = [&](NodeId node, Direction dir, double created_at,
                            long long slot) {
    ++res.packets_generated;
    Packet pkt = proto;
    pkt.src = node;
    pkt.origin_zone = topo.zone[node];
    pkt.direction = dir;
    pkt.created_at_s = created_at;
    if (nodes[node].queue.size() >=
        static_cast<std::size_t>(sc.queue_capacity)) {
      ++res.dropped;
      log_event(slot, node, "gen_drop", "queue_full");
      return;
    }
    nodes[node].queue.push_back({pkt, slot, 0});
    log_event(slot, node, "gen",
              std::string(to_string(dir)) + " t=" + std::to_string(created_at));
  };

  // Per-slot scratch, reused.
  enum class Role : std::uint8_t { None, Candidate, Winner };
  std::vector<Role> role(n);
  std::vector<ActiveTx> active_tx;
  std::vector<NodeId> candidates;
  std::vector<std::size_t> candidate_pkts;
  std::vector<NodeId> collided_receivers;

  for (long long slot = 0; slot < n_slots; ++slot) {
    const double t = slot * sc.slot_s;
    const int frame_slot = static_cast<int>(slot % slots_per_frame);

    // Traffic generation: everything created up to the slot boundary
    // becomes eligible in this slot.
    for (std::size_t i = 0; i < n; ++i) {
      NodeState& st = nodes[i];
      while (st.next_report_s >= 0.0 && st.next_report_s <= t) {
        enqueue_origin(static_cast<NodeId>(i), Direction::Upstream,
                       st.next_report_s, slot);
        st.next_report_s += sc.traffic.report_interval_s;
      }
      while (st.next_downstream_s >= 0.0 && st.next_downstream_s <= t) {
        enqueue_origin(static_cast<NodeId>(i), Direction::Downstream,
                       st.next_downstream_s, slot);
        st.next_downstream_s += sc.traffic.downstream_interval_s;
      }
    }
    while (next_injection < injections.size() &&
           injections[next_injection].at_s <= t) {
      const Injection& inj = injections[next_injection++];
      enqueue_origin(inj.node, Direction::Upstream, inj.at_s, slot);
    }

    // Contention and transmission, zone by zone.
    std::fill(role.begin(), role.end(), Role::None);
    active_tx.clear();
    for (int z = 0; z <= max_zone; ++z) {
      if (zone_nodes[z].empty()) continue;
      const SlotAction action = slot_action(table, z, frame_slot);
      if (!is_transmit(action)) continue;
      candidates.clear();
      candidate_pkts.clear();
      for (NodeId node : zone_nodes[z]) {
        const auto& q = nodes[node].queue;
        for (std::size_t qi = 0; qi < q.size(); ++qi) {
          if (q[qi].eligible_from_slot <= slot &&
              direction_matches(action, q[qi].pkt.direction)) {
            candidates.push_back(node);
            candidate_pkts.push_back(qi);
            break;
          }
        }
      }
      if (candidates.empty()) continue;
      for (NodeId c : candidates) role[c] = Role::Candidate;
      const ContendOutcome outcome = contend(candidates, sc.csma, rng);
      for (NodeId w : outcome.transmitters) {
        role[w] = Role::Winner;
        const std::size_t ci = static_cast<std::size_t>(
            std::find(candidates.begin(), candidates.end(), w) -
            candidates.begin());
        ActiveTx tx;
        tx.node = w;
        tx.zone = z;
        tx.action = action;
        tx.backoff = outcome.backoff;
        tx.queue_index = candidate_pkts[ci];
        tx.retransmission = nodes[w].queue[tx.queue_index].retries_used > 0;
        active_tx.push_back(tx);
      }
    }

    // Reception resolution. Designated receiver: the parent for upstream,
    // the lowest-id child for downstream/broadcast dissemination.
    collided_receivers.clear();
    for (const ActiveTx& tx : active_tx) {
      QueuedPacket& qp = nodes[tx.node].queue[tx.queue_index];
      if (tx.retransmission) ++res.retransmissions;
      log_event(slot, tx.node, is_transmit(tx.action) ? "tx" : "tx?",
                std::string(to_string(qp.pkt.direction)) +
                    " src=" + std::to_string(qp.pkt.src) +
                    " backoff=" + std::to_string(tx.backoff));

      NodeId receiver;
      if (tx.action == SlotAction::TransmitUp) {
        receiver = topo.parent[tx.node];
      } else {
        if (children[tx.node].empty()) {
          // End of the line: nothing deeper to disseminate to.
          ++res.packets_delivered;
          nodes[tx.node].queue.erase(nodes[tx.node].queue.begin() +
                                     static_cast<long>(tx.queue_index));
          continue;
        }
        receiver = children[tx.node][0];
      }

      std::size_t concurrent = 0;
      for (const ActiveTx& other : active_tx)
        if (adjacent(other.node, receiver)) ++concurrent;

      const DeliverOutcome outcome =
          deliver(qp.pkt, receiver, receiver, concurrent);
      if (outcome == DeliverOutcome::Received) {
        const Packet pkt = qp.pkt;
        nodes[tx.node].queue.erase(nodes[tx.node].queue.begin() +
                                   static_cast<long>(tx.queue_index));
        const bool upstream = pkt.direction == Direction::Upstream;
        const bool terminal =
            upstream ? receiver == kGatewayId : children[receiver].empty();
        if (terminal) {
          ++res.packets_delivered;
          if (upstream) {
            const long long create_frame = static_cast<long long>(
                std::floor(pkt.created_at_s / frame_s));
            const long long frames = slot / slots_per_frame - create_frame + 1;
            latency_frames_sum += static_cast<std::uint64_t>(frames);
            ++latency_count;
            log_event(slot, receiver, "deliver",
                      "src=" + std::to_string(pkt.src) +
                          " frames=" + std::to_string(frames));
          } else {
            log_event(slot, receiver, "deliver",
                      "src=" + std::to_string(pkt.src));
          }
        } else if (nodes[receiver].queue.size() >=
                   static_cast<std::size_t>(sc.queue_capacity)) {
          ++res.dropped;
          log_event(slot, receiver, "fwd_drop", "queue_full");
        } else {
          nodes[receiver].queue.push_back({pkt, slot + 1, 0});
          log_event(slot, receiver, "rx",
                    "src=" + std::to_string(pkt.src) + " from=" +
                        std::to_string(tx.node));
        }
      } else {
        if (std::find(collided_receivers.begin(), collided_receivers.end(),
                      receiver) == collided_receivers.end()) {
          collided_receivers.push_back(receiver);
          ++res.collisions;
          log_event(slot, receiver, "collision",
                    "n_tx=" + std::to_string(concurrent));
        }
        ++qp.retries_used;
        if (qp.retries_used > sc.csma.max_retries) {
          ++res.dropped;
          log_event(slot, tx.node, "drop", "retries_exhausted");
          nodes[tx.node].queue.erase(nodes[tx.node].queue.begin() +
                                     static_cast<long>(tx.queue_index));
        }
      }
    }

    // Energy accrual: exactly slot_s per active node across states.
    for (std::size_t i = 0; i < n; ++i) {
      const NodeId node = static_cast<NodeId>(i);
      if (!topo.active(node)) continue;
      EnergyAccount& acct = res.per_node[i];
      const SlotAction a = slot_action(table, topo.zone[i], frame_slot);

      if (a == SlotAction::Sleep) {
        acct.accumulate(RadioState::Sleep, sc.slot_s, sc.profile);
        continue;
      }
      if (is_receive(a)) {
        if (table.sleep_when_done) {
          std::size_t cnt = 0;
          double rx_end = 0.0;
          for (const ActiveTx& tx : active_tx) {
            if (adjacent(tx.node, node)) {
              ++cnt;
              rx_end = tx.backoff * sc.csma.micro_slot_s + air_s;
            }
          }
          if (cnt == 1) {
            acct.accumulate(RadioState::Receive, rx_end, sc.profile);
            acct.accumulate(RadioState::Sleep, sc.slot_s - rx_end, sc.profile);
            continue;
          }
        }
        acct.accumulate(RadioState::Receive, sc.slot_s, sc.profile);
        continue;
      }
      // Transmit-role cell.
      if (role[i] == Role::Winner) {
        double backoff_s = 0.0;
        for (const ActiveTx& tx : active_tx)
          if (tx.node == node) backoff_s = tx.backoff * sc.csma.micro_slot_s;
        acct.accumulate(RadioState::Listen, backoff_s, sc.profile);
        acct.accumulate(RadioState::Transmit, air_s, sc.profile);
        const double rest = sc.slot_s - backoff_s - air_s;
        acct.accumulate(table.sleep_when_done ? RadioState::Sleep
                                              : RadioState::Listen,
                        rest, sc.profile);
      } else if (role[i] == Role::Candidate) {
        acct.accumulate(RadioState::Listen, sc.slot_s, sc.profile);
      } else {
        // Nothing to send: idle channel sensing, or straight back to sleep
        // for the crossed-shifted table.
        acct.accumulate(table.sleep_when_done ? RadioState::Sleep
                                              : RadioState::Listen,
                        sc.slot_s, sc.profile);
      }
    }
  }

  for (std::size_t i = 0; i < n; ++i) {
    res.total_energy_j += res.per_node[i].energy_j;
    res.in_flight += nodes[i].queue.size();
  }
  res.mean_upstream_latency_frames =
      latency_count == 0
          ? 0.0
          : static_cast<double>(latency_frames_sum) / latency_count;
  return res;
}

}  // namespace wsn
