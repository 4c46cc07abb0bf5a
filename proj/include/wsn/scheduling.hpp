#pragma once

#include <optional>
#include <string>
#include <vector>

#include "wsn/types.hpp"

namespace wsn {

/// Role of one (zone row, slot) cell of a scheduling table.
enum class SlotAction : char {
  TransmitUp = 'U',
  TransmitDown = 'D',
  ReceiveUp = 'u',
  ReceiveDown = 'd',
  TransmitBroadcast = 'B',
  ReceiveBroadcast = 'b',
  Sleep = '.',
};

inline bool is_transmit(SlotAction a) {
  return a == SlotAction::TransmitUp || a == SlotAction::TransmitDown ||
         a == SlotAction::TransmitBroadcast;
}
inline bool is_receive(SlotAction a) {
  return a == SlotAction::ReceiveUp || a == SlotAction::ReceiveDown ||
         a == SlotAction::ReceiveBroadcast;
}

enum class TableKind {
  X,
  V,
  V9x9,
  Leon4x4CrossedShifted,
  Leon4x4CrossedNotShifted,
  Crossed4x4Shifted,
};

constexpr std::array<TableKind, 6> kAllTableKinds = {
    TableKind::X,
    TableKind::V,
    TableKind::V9x9,
    TableKind::Leon4x4CrossedShifted,
    TableKind::Leon4x4CrossedNotShifted,
    TableKind::Crossed4x4Shifted,
};

const char* to_string(TableKind k);
TableKind table_kind_from_string(const std::string& s);

/// Zone-periodic action matrix. Row r prescribes the behavior of every
/// zone z with z mod zone_period == r; deeper networks wrap around
/// (append-the-same-table semantics). Pairing rules across rows (mod
/// zone_period):
///   TransmitUp   at (z, s) <-> ReceiveUp        at (z-1, s)
///   TransmitDown at (z, s) <-> ReceiveDown      at (z+1, s)
///   TransmitBroadcast (z,s) <-> ReceiveBroadcast at (z+1, s)
/// i.e. broadcast propagates away from the gateway, one hop per slot.
struct SchedulingTable {
  std::optional<TableKind> kind;  // empty for custom-loaded tables
  int slots_per_frame = 0;
  int zone_period = 0;
  std::vector<SlotAction> cells;  // zone_period x slots_per_frame, row-major
  std::vector<int> broadcast_slots;
  /// When set, nodes drop to Sleep for the rest of a slot as soon as their
  /// transmission or reception is over (Leon crossed-shifted behavior).
  bool sleep_when_done = false;

  SlotAction cell(int row, int slot) const {
    return cells[static_cast<std::size_t>(row) * slots_per_frame + slot];
  }
  SlotAction& cell(int row, int slot) {
    return cells[static_cast<std::size_t>(row) * slots_per_frame + slot];
  }

  double frame_time_s(double slot_s) const { return slots_per_frame * slot_s; }
};

/// The canonical matrix for one of the six built-in kinds.
SchedulingTable build_table(TableKind kind);

/// Action of zone `zone` in slot `slot`, periodic in the zone with period
/// zone_period. The gateway (zone 0 proper, not merely row 0) never
/// transmits upstream: a wrapped TransmitUp cell reads as Sleep for it.
/// Throws ConfigError if slot is out of range or zone is negative.
SlotAction slot_action(const SchedulingTable& table, int zone, int slot);

struct ValidationReport {
  std::vector<std::string> violations;
  bool ok() const { return violations.empty(); }
};

/// Structural checks: pairing rules for all three traffic kinds, per-kind
/// slot/period counts, broadcast slot placement and count, and gateway-row
/// constraints (no TransmitUp visible to zone 0, at least one ReceiveUp so
/// the gateway can collect traffic). All six built-in tables validate
/// clean; flipping any single active cell to Sleep breaks at least one
/// pairing.
ValidationReport validate_table(const SchedulingTable& table);

/// Maximum number of zone hops a single uncontended packet can advance
/// within one frame, found by chasing transmit/receive slot chains through
/// the matrix.
int zones_per_frame(const SchedulingTable& table, Direction direction);

/// Number of frames (1 = delivered within its first frame) an uncontended
/// upstream packet created at a frame boundary needs to reach the gateway
/// from origin_zone. Exact slot-chain chase; origin_zone >= 1.
int uncontended_latency_frames(const SchedulingTable& table, int origin_zone);

/// Text form: one row per zone, one character per cell using the
/// SlotAction letters (U D u d B b .). `#` comments and blank lines are
/// skipped on input. parse validates shape and characters; full structural
/// validation is validate_table's job (load_table_file applies both).
SchedulingTable parse_table_text(const std::string& text,
                                 std::optional<TableKind> kind = std::nullopt);
std::string format_table_text(const SchedulingTable& table);
SchedulingTable load_table_file(const std::string& path,
                                std::optional<TableKind> kind = std::nullopt);

}  // namespace wsn
