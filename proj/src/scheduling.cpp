#include "wsn/scheduling.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "wsn/errors.hpp"

namespace wsn {

const char* to_string(TableKind k) {
  switch (k) {
    case TableKind::X: return "X";
    case TableKind::V: return "V";
    case TableKind::V9x9: return "V9x9";
    case TableKind::Leon4x4CrossedShifted: return "Leon4x4CrossedShifted";
    case TableKind::Leon4x4CrossedNotShifted: return "Leon4x4CrossedNotShifted";
    case TableKind::Crossed4x4Shifted: return "Crossed4x4Shifted";
  }
  return "?";
}

TableKind table_kind_from_string(const std::string& s) {
  for (TableKind k : kAllTableKinds)
    if (s == to_string(k)) return k;
  throw ConfigError("unknown scheduling table kind: '" + s + "'");
}

namespace {

// Canonical matrices. One character per cell: U/D = transmit up/down,
// u/d = receive up/down, B/b = transmit/receive local broadcast,
// . = sleep. Rows are zones 0..period-1 top-down, columns are slots.
//
// X: 17 slots (8 upstream, 8 downstream interleaved, 1 broadcast), three
// concurrent transmit diagonals spaced three zones apart, so a packet can
// ride down 8 zones (or up 8 zones) inside one frame while nearby zones
// reuse the channel.
constexpr const char* kTableX[] = {
    ".Du.Ud.Du.Ud.Du.B",
    "udUD..udUD..udUDb",
    "U..duDU..duDU..d.",
    ".Du.Ud.Du.Ud.Du.B",
    "udUD..udUD..udUDb",
    "U..duDU..duDU..d.",
    ".Du.Ud.Du.Ud.Du.B",
    "udUD..udUD..udUDb",
    "U..duDU..duDU..d.",
};

// V: 8 slots, first half upstream, second half downstream, no broadcast.
constexpr const char* kTableV[] = {
    "U..uD..d",
    "..uUdD..",
    ".uU..dD.",
    "uU....dD",
    "U..uD..d",
    "..uUdD..",
    ".uU..dD.",
    "uU....dD",
};

// V9x9: 9 slots, 4 upstream, 4 downstream, broadcast last; traffic
// advances 4 zones per frame in either direction without intersecting.
constexpr const char* kTableV9x9[] = {
    ".U.uD...B",
    "..uUdD..b",
    ".uU..dD..",
    "uU....dDB",
    "U..uD..db",
    "..uUdD...",
    ".uU..dD.B",
    "uU....dDb",
    "Uu.....d.",
};

// Leon 4x4 crossed shifted: local broadcast shifted one slot later and one
// zone deeper than the not-shifted variant, so slot 2 carries transmission,
// reception and broadcast simultaneously. Every row keeps a sleep cell and
// nodes drop to sleep as soon as their transfer is done (sleep_when_done).
constexpr const char* kTableLeonShifted[] = {
    "U.bu",
    "..uU",
    ".uU.",
    "uUB.",
};

// Leon 4x4 crossed not shifted: the only downward traffic is the gateway's
// local broadcast, sharing slot 1 with one upstream hop.
constexpr const char* kTableLeonNotShifted[] = {
    "UB.u",
    ".buU",
    ".uU.",
    "uU..",
};

// Crossed 4x4 shifted: fully loaded table; alternate zones transmit in the
// same slot (zones z and z+2 share both transmit slots per direction).
constexpr const char* kTableCrossed[] = {
    "UuDd",
    "uUdD",
    "UuDd",
    "uUdD",
};

struct KindInfo {
  const char* const* rows;
  int zone_period;
  int slots_per_frame;
  int broadcast_count;
  bool broadcast_last;
  bool sleep_when_done;
};

KindInfo kind_info(TableKind k) {
  switch (k) {
    case TableKind::X: return {kTableX, 9, 17, 1, true, false};
    case TableKind::V: return {kTableV, 8, 8, 0, false, false};
    case TableKind::V9x9: return {kTableV9x9, 9, 9, 1, true, false};
    case TableKind::Leon4x4CrossedShifted:
      return {kTableLeonShifted, 4, 4, 1, false, true};
    case TableKind::Leon4x4CrossedNotShifted:
      return {kTableLeonNotShifted, 4, 4, 1, false, false};
    case TableKind::Crossed4x4Shifted: return {kTableCrossed, 4, 4, 0, false, false};
  }
  throw ConfigError("unknown table kind");
}

SlotAction action_from_char(char c, int row, int col) {
  switch (c) {
    case 'U': return SlotAction::TransmitUp;
    case 'D': return SlotAction::TransmitDown;
    case 'u': return SlotAction::ReceiveUp;
    case 'd': return SlotAction::ReceiveDown;
    case 'B': return SlotAction::TransmitBroadcast;
    case 'b': return SlotAction::ReceiveBroadcast;
    case '.': return SlotAction::Sleep;
    default:
      throw ConfigError("table cell (" + std::to_string(row) + "," +
                        std::to_string(col) + "): unknown action character '" +
                        std::string(1, c) + "'");
  }
}

std::vector<int> scan_broadcast_slots(const SchedulingTable& t) {
  std::vector<int> slots;
  for (int s = 0; s < t.slots_per_frame; ++s) {
    for (int r = 0; r < t.zone_period; ++r) {
      const SlotAction a = t.cell(r, s);
      if (a == SlotAction::TransmitBroadcast || a == SlotAction::ReceiveBroadcast) {
        slots.push_back(s);
        break;
      }
    }
  }
  return slots;
}

}  // namespace

SchedulingTable build_table(TableKind kind) {
  const KindInfo info = kind_info(kind);
  SchedulingTable t;
  t.kind = kind;
  t.zone_period = info.zone_period;
  t.slots_per_frame = info.slots_per_frame;
  t.sleep_when_done = info.sleep_when_done;
  t.cells.resize(static_cast<std::size_t>(info.zone_period) * info.slots_per_frame);
  for (int r = 0; r < info.zone_period; ++r)
    for (int s = 0; s < info.slots_per_frame; ++s)
      t.cell(r, s) = action_from_char(info.rows[r][s], r, s);
  t.broadcast_slots = scan_broadcast_slots(t);
  return t;
}

SlotAction slot_action(const SchedulingTable& table, int zone, int slot) {
  if (zone < 0) throw ConfigError("slot_action: negative zone");
  if (slot < 0 || slot >= table.slots_per_frame)
    throw ConfigError("slot_action: slot " + std::to_string(slot) +
                      " out of range (frame has " +
                      std::to_string(table.slots_per_frame) + " slots)");
  const SlotAction a = table.cell(zone % table.zone_period, slot);
  // The gateway never has upstream traffic; a wrapped TransmitUp cell in
  // row 0 serves zones zone_period, 2*zone_period, ... but reads as Sleep
  // for zone 0 itself.
  if (zone == 0 && a == SlotAction::TransmitUp) return SlotAction::Sleep;
  return a;
}

ValidationReport validate_table(const SchedulingTable& t) {
  ValidationReport rep;
  auto fail = [&](const std::string& msg) { rep.violations.push_back(msg); };

  if (t.zone_period <= 0 || t.slots_per_frame <= 0 ||
      t.cells.size() !=
          static_cast<std::size_t>(t.zone_period) * t.slots_per_frame) {
    fail("matrix shape is inconsistent");
    return rep;
  }

  const int P = t.zone_period;
  auto cell_name = [&](int r, int s) {
    return "(" + std::to_string(r) + "," + std::to_string(s) + ")";
  };

  // Pairing rules, both directions, mod zone_period.
  for (int r = 0; r < P; ++r) {
    for (int s = 0; s < t.slots_per_frame; ++s) {
      const SlotAction a = t.cell(r, s);
      const int up = (r + P - 1) % P;    // one zone closer to the gateway
      const int down = (r + 1) % P;      // one zone further out
      switch (a) {
        case SlotAction::TransmitUp:
          if (t.cell(up, s) != SlotAction::ReceiveUp)
            fail("TransmitUp at " + cell_name(r, s) + " lacks ReceiveUp at " +
                 cell_name(up, s));
          break;
        case SlotAction::ReceiveUp:
          if (t.cell(down, s) != SlotAction::TransmitUp)
            fail("ReceiveUp at " + cell_name(r, s) + " lacks TransmitUp at " +
                 cell_name(down, s));
          break;
        case SlotAction::TransmitDown:
          if (t.cell(down, s) != SlotAction::ReceiveDown)
            fail("TransmitDown at " + cell_name(r, s) + " lacks ReceiveDown at " +
                 cell_name(down, s));
          break;
        case SlotAction::ReceiveDown:
          if (t.cell(up, s) != SlotAction::TransmitDown)
            fail("ReceiveDown at " + cell_name(r, s) + " lacks TransmitDown at " +
                 cell_name(up, s));
          break;
        case SlotAction::TransmitBroadcast:
          if (t.cell(down, s) != SlotAction::ReceiveBroadcast)
            fail("TransmitBroadcast at " + cell_name(r, s) +
                 " lacks ReceiveBroadcast at " + cell_name(down, s));
          break;
        case SlotAction::ReceiveBroadcast:
          if (t.cell(up, s) != SlotAction::TransmitBroadcast)
            fail("ReceiveBroadcast at " + cell_name(r, s) +
                 " lacks TransmitBroadcast at " + cell_name(up, s));
          break;
        case SlotAction::Sleep:
          break;
      }
    }
  }

  // Gateway constraints: zone 0 must never see TransmitUp (slot_action
  // masks wrapped row-0 cells, so this guards the mask itself) and must be
  // able to receive upstream traffic somewhere in the frame.
  bool gw_rx = false;
  for (int s = 0; s < t.slots_per_frame; ++s) {
    if (slot_action(t, 0, s) == SlotAction::TransmitUp)
      fail("gateway sees TransmitUp in slot " + std::to_string(s));
    if (t.cell(0, s) == SlotAction::ReceiveUp) gw_rx = true;
  }
  if (!gw_rx) fail("gateway row has no ReceiveUp slot");

  // Recorded broadcast slots must match the matrix.
  const std::vector<int> actual_bcast = scan_broadcast_slots(t);
  if (t.broadcast_slots != actual_bcast)
    fail("broadcast_slots field does not match the matrix");

  // Per-kind structural expectations.
  if (t.kind) {
    const KindInfo info = kind_info(*t.kind);
    if (t.slots_per_frame != info.slots_per_frame)
      fail(std::string(to_string(*t.kind)) + ": expected " +
           std::to_string(info.slots_per_frame) + " slots per frame, got " +
           std::to_string(t.slots_per_frame));
    if (t.zone_period != info.zone_period)
      fail(std::string(to_string(*t.kind)) + ": expected zone period " +
           std::to_string(info.zone_period) + ", got " +
           std::to_string(t.zone_period));
    if (static_cast<int>(actual_bcast.size()) != info.broadcast_count)
      fail(std::string(to_string(*t.kind)) + ": expected " +
           std::to_string(info.broadcast_count) + " broadcast slot(s), got " +
           std::to_string(actual_bcast.size()));
    if (info.broadcast_last && !actual_bcast.empty() &&
        actual_bcast.back() != t.slots_per_frame - 1)
      fail(std::string(to_string(*t.kind)) +
           ": broadcast slot must be the last slot of the frame");

    if (*t.kind == TableKind::Leon4x4CrossedShifted) {
      for (int r = 0; r < P; ++r) {
        bool has_sleep = false;
        for (int s = 0; s < t.slots_per_frame; ++s)
          if (t.cell(r, s) == SlotAction::Sleep) has_sleep = true;
        if (!has_sleep)
          fail("Leon4x4CrossedShifted: row " + std::to_string(r) +
               " has no Sleep slot");
      }
    }
    if (*t.kind == TableKind::Leon4x4CrossedNotShifted) {
      for (int r = 1; r < P; ++r)
        for (int s = 0; s < t.slots_per_frame; ++s)
          if (t.cell(r, s) == SlotAction::TransmitDown)
            fail("Leon4x4CrossedNotShifted: TransmitDown in non-gateway row " +
                 std::to_string(r));
    }
    if (*t.kind == TableKind::Crossed4x4Shifted) {
      bool found = false;
      for (int s = 0; s < t.slots_per_frame && !found; ++s)
        for (int r = 0; r < P && !found; ++r)
          if (is_transmit(t.cell(r, s)) && is_transmit(t.cell((r + 2) % P, s)))
            found = true;
      if (!found)
        fail("Crossed4x4Shifted: no slot where zones z and z+2 both transmit");
    }
  }
  return rep;
}

namespace {

// Longest in-frame hop chain starting from `row` with the first transmit
// slot >= from_slot. step = -1 chases upstream (TransmitUp moving toward
// the gateway), +1 chases downstream.
int chase_chain(const SchedulingTable& t, int row, int from_slot,
                SlotAction tx_action, int step) {
  int hops = 0;
  int slot = from_slot;
  int r = row;
  while (slot < t.slots_per_frame) {
    if (t.cell(r, slot) == tx_action) {
      ++hops;
      r = (r + step + t.zone_period) % t.zone_period;
    }
    ++slot;
  }
  return hops;
}

}  // namespace

int zones_per_frame(const SchedulingTable& table, Direction direction) {
  const SlotAction tx = direction == Direction::Upstream
                            ? SlotAction::TransmitUp
                            : SlotAction::TransmitDown;
  const int step = direction == Direction::Upstream ? -1 : 1;
  int best = 0;
  for (int r = 0; r < table.zone_period; ++r)
    best = std::max(best, chase_chain(table, r, 0, tx, step));
  return best;
}

int uncontended_latency_frames(const SchedulingTable& table, int origin_zone) {
  if (origin_zone < 1)
    throw ConfigError("uncontended_latency_frames: origin zone must be >= 1");
  int zone = origin_zone;
  int frame = 0;
  int slot = 0;
  // Safety bound: a valid table moves a packet at least one zone per frame.
  const int frame_limit = origin_zone + 2;
  while (zone > 0) {
    if (slot >= table.slots_per_frame) {
      ++frame;
      slot = 0;
      if (frame > frame_limit)
        throw SimulationError("uncontended_latency_frames: packet stuck at zone " +
                              std::to_string(zone));
    }
    if (slot_action(table, zone, slot) == SlotAction::TransmitUp) --zone;
    ++slot;
  }
  return frame + 1;
}

SchedulingTable parse_table_text(const std::string& text,
                                 std::optional<TableKind> kind) {
  std::vector<std::string> rows;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    while (!line.empty() && (line.back() == '\r' || line.back() == ' ' ||
                             line.back() == '\t'))
      line.pop_back();
    if (line.empty()) continue;
    rows.push_back(line);
  }
  if (rows.empty()) throw ConfigError("table text: no rows");
  for (const auto& r : rows)
    if (r.size() != rows.front().size())
      throw ConfigError("table text: rows have unequal slot counts");

  SchedulingTable t;
  t.kind = kind;
  t.zone_period = static_cast<int>(rows.size());
  t.slots_per_frame = static_cast<int>(rows.front().size());
  if (kind) t.sleep_when_done = kind_info(*kind).sleep_when_done;
  t.cells.resize(static_cast<std::size_t>(t.zone_period) * t.slots_per_frame);
  for (int r = 0; r < t.zone_period; ++r)
    for (int s = 0; s < t.slots_per_frame; ++s)
      t.cell(r, s) = action_from_char(rows[r][s], r, s);
  t.broadcast_slots = scan_broadcast_slots(t);
  return t;
}

std::string format_table_text(const SchedulingTable& t) {
  std::string out;
  for (int r = 0; r < t.zone_period; ++r) {
    for (int s = 0; s < t.slots_per_frame; ++s)
      out.push_back(static_cast<char>(t.cell(r, s)));
    out.push_back('\n');
  }
  return out;
}

SchedulingTable load_table_file(const std::string& path,
                                std::optional<TableKind> kind) {
  std::ifstream f(path);
  if (!f) throw IoError("cannot open table file: " + path);
  std::ostringstream ss;
  ss << f.rdbuf();
  SchedulingTable t = parse_table_text(ss.str(), kind);
  const ValidationReport rep = validate_table(t);
  if (!rep.ok())
    throw ConfigError("table file " + path +
                      " is invalid: " + rep.violations.front());
  return t;
}

}  // namespace wsn
