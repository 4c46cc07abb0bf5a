#include "wsn/chipset.hpp"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "wsn/errors.hpp"

namespace wsn {

const char* to_string(RadioState s) {
  switch (s) {
    case RadioState::Transmit: return "transmit";
    case RadioState::Receive: return "receive";
    case RadioState::Listen: return "listen";
    case RadioState::Sleep: return "sleep";
  }
  return "?";
}

const char* to_string(Direction d) {
  switch (d) {
    case Direction::Upstream: return "upstream";
    case Direction::Downstream: return "downstream";
    case Direction::Broadcast: return "broadcast";
  }
  return "?";
}

namespace {

ChipsetProfile make_profile(const char* name, double v, double tx, double rx,
                            double listen, double sleep) {
  ChipsetProfile p;
  p.name = name;
  p.supply_voltage_v = v;
  p.current(RadioState::Transmit) = tx;
  p.current(RadioState::Receive) = rx;
  p.current(RadioState::Listen) = listen;
  p.current(RadioState::Sleep) = sleep;
  p.bitrate_bps = 19200.0;
  p.preamble_bits = 32;
  return p;
}

}  // namespace

std::vector<ChipsetProfile> default_profiles() {
  // Datasheet-inspired draws at 3 V. Sleep currents are nudged so the
  // three profiles stay strictly ordered in every state, which is the one
  // property the defaults have to guarantee.
  return {
      make_profile("TR1001", 3.0, 12.0, 3.8, 3.8, 0.001),
      make_profile("CC1000", 3.0, 16.5, 9.6, 9.6, 0.002),
      make_profile("CC1010", 3.0, 26.6, 11.8, 11.8, 0.004),
  };
}

void validate_profile(const ChipsetProfile& p) {
  for (RadioState s : kRadioStates) {
    if (p.current(s) < 0.0)
      throw ConfigError("chipset " + p.name + ": negative current for state " +
                        to_string(s));
  }
  const double sleep = p.current(RadioState::Sleep);
  const double listen = p.current(RadioState::Listen);
  const double rx = p.current(RadioState::Receive);
  const double tx = p.current(RadioState::Transmit);
  if (!(sleep < listen && listen <= rx && rx <= tx))
    throw ConfigError("chipset " + p.name +
                      ": currents must satisfy sleep < listen <= receive <= "
                      "transmit");
  if (!(p.bitrate_bps > 0.0))
    throw ConfigError("chipset " + p.name + ": bitrate must be positive");
  if (p.supply_voltage_v <= 0.0)
    throw ConfigError("chipset " + p.name + ": voltage must be positive");
  if (p.name.empty()) throw ConfigError("chipset profile without a name");
}

const ChipsetProfile* find_profile(const std::vector<ChipsetProfile>& profiles,
                                   const std::string& name) {
  for (const auto& p : profiles)
    if (p.name == name) return &p;
  return nullptr;
}

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

double parse_double_or_throw(const std::string& v, const std::string& key,
                             int line) {
  try {
    std::size_t pos = 0;
    double d = std::stod(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return d;
  } catch (const std::exception&) {
    throw ConfigError("chipset file line " + std::to_string(line) +
                      ": bad value for " + key + ": '" + v + "'");
  }
}

}  // namespace

std::vector<ChipsetProfile> parse_chipset_text(const std::string& text) {
  std::vector<ChipsetProfile> out;
  ChipsetProfile cur;
  bool open = false;

  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  auto flush = [&]() {
    if (open) {
      validate_profile(cur);
      out.push_back(cur);
      open = false;
    }
  };
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("chipset file line " + std::to_string(lineno) +
                        ": expected key = value");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (key == "name") {
      flush();
      cur = ChipsetProfile{};
      cur.name = value;
      open = true;
      continue;
    }
    if (!open)
      throw ConfigError("chipset file line " + std::to_string(lineno) +
                        ": key '" + key + "' before any name record");
    if (key == "voltage_v")
      cur.supply_voltage_v = parse_double_or_throw(value, key, lineno);
    else if (key == "i_tx_ma")
      cur.current(RadioState::Transmit) = parse_double_or_throw(value, key, lineno);
    else if (key == "i_rx_ma")
      cur.current(RadioState::Receive) = parse_double_or_throw(value, key, lineno);
    else if (key == "i_listen_ma")
      cur.current(RadioState::Listen) = parse_double_or_throw(value, key, lineno);
    else if (key == "i_sleep_ma")
      cur.current(RadioState::Sleep) = parse_double_or_throw(value, key, lineno);
    else if (key == "bitrate_bps")
      cur.bitrate_bps = parse_double_or_throw(value, key, lineno);
    else if (key == "preamble_bits")
      cur.preamble_bits =
          static_cast<unsigned>(parse_double_or_throw(value, key, lineno));
    else
      throw ConfigError("chipset file line " + std::to_string(lineno) +
                        ": unknown key '" + key + "'");
  }
  flush();
  if (out.empty()) throw ConfigError("chipset file: no profiles found");
  return out;
}

std::vector<ChipsetProfile> load_chipset_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw IoError("cannot open chipset file: " + path);
  std::ostringstream ss;
  ss << f.rdbuf();
  return parse_chipset_text(ss.str());
}

std::string format_chipset_text(const std::vector<ChipsetProfile>& profiles) {
  std::ostringstream out;
  out << "# radio profiles: per-state current draw (mA), supply voltage, "
         "bitrate\n";
  char buf[64];
  auto num = [&](double d) {
    std::snprintf(buf, sizeof buf, "%.17g", d);
    return std::string(buf);
  };
  for (const auto& p : profiles) {
    out << "name = " << p.name << "\n";
    out << "voltage_v = " << num(p.supply_voltage_v) << "\n";
    out << "i_tx_ma = " << num(p.current(RadioState::Transmit)) << "\n";
    out << "i_rx_ma = " << num(p.current(RadioState::Receive)) << "\n";
    out << "i_listen_ma = " << num(p.current(RadioState::Listen)) << "\n";
    out << "i_sleep_ma = " << num(p.current(RadioState::Sleep)) << "\n";
    out << "bitrate_bps = " << num(p.bitrate_bps) << "\n";
    out << "preamble_bits = " << p.preamble_bits << "\n";
    out << "\n";
  }
  return out.str();
}

}  // namespace wsn
