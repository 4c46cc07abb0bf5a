#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>

namespace wsn {

using NodeId = std::uint32_t;

/// Node 0 is always the gateway.
constexpr NodeId kGatewayId = 0;

struct Position {
  double x_cm = 0.0;
  double y_cm = 0.0;
};

struct Area {
  double width_cm = 800.0;
  double height_cm = 500.0;

  bool contains(const Position& p) const {
    return p.x_cm >= 0.0 && p.x_cm <= width_cm && p.y_cm >= 0.0 &&
           p.y_cm <= height_cm;
  }
};

inline double distance_cm(const Position& a, const Position& b) {
  const double dx = a.x_cm - b.x_cm;
  const double dy = a.y_cm - b.y_cm;
  return std::sqrt(dx * dx + dy * dy);
}

enum class RadioState : int { Transmit = 0, Receive = 1, Listen = 2, Sleep = 3 };

constexpr std::array<RadioState, 4> kRadioStates = {
    RadioState::Transmit, RadioState::Receive, RadioState::Listen,
    RadioState::Sleep};

const char* to_string(RadioState s);

/// Electrical and radio parameters of one chipset. Current draws are in
/// milliamps, indexed by RadioState.
struct ChipsetProfile {
  std::string name;
  double supply_voltage_v = 3.0;
  std::array<double, 4> current_ma{};
  double bitrate_bps = 19200.0;
  unsigned preamble_bits = 32;

  double current(RadioState s) const {
    return current_ma[static_cast<std::size_t>(s)];
  }
  double& current(RadioState s) {
    return current_ma[static_cast<std::size_t>(s)];
  }
};

/// Instantaneous power in watts drawn in the given radio state.
inline double power_draw(const ChipsetProfile& p, RadioState s) {
  return p.supply_voltage_v * p.current(s) / 1000.0;
}

enum class Direction { Upstream, Downstream, Broadcast };

const char* to_string(Direction d);

constexpr unsigned kMaxPayloadBytes = 127;
constexpr unsigned kMaxExtraPayloadBits = 1023;

struct Packet {
  NodeId src = kGatewayId;
  int origin_zone = 0;
  Direction direction = Direction::Upstream;
  unsigned header_bytes = 16;
  unsigned payload_bytes = 0;       // 0..127
  unsigned extra_payload_bits = 0;  // 0..1023
  double created_at_s = 0.0;
};

/// Total on-air length of a packet, preamble included.
inline std::uint64_t packet_bits(const Packet& pkt, const ChipsetProfile& profile) {
  return static_cast<std::uint64_t>(profile.preamble_bits) +
         8ull * (pkt.header_bytes + pkt.payload_bytes) + pkt.extra_payload_bits;
}

/// Time on air for a given bit count.
inline double airtime_s(std::uint64_t bits, const ChipsetProfile& profile) {
  return static_cast<double>(bits) / profile.bitrate_bps;
}

/// Per-node ledger of radio-state occupancy and the energy it cost.
struct EnergyAccount {
  std::array<double, 4> state_duration_s{};
  double energy_j = 0.0;

  double duration(RadioState s) const {
    return state_duration_s[static_cast<std::size_t>(s)];
  }

  double total_duration_s() const {
    double t = 0.0;
    for (double d : state_duration_s) t += d;
    return t;
  }

  void accumulate(RadioState s, double duration_s, const ChipsetProfile& p) {
    if (duration_s < 0.0)
      throw std::invalid_argument("EnergyAccount: negative duration");
    state_duration_s[static_cast<std::size_t>(s)] += duration_s;
    energy_j += power_draw(p, s) * duration_s;
  }
};

}  // namespace wsn
