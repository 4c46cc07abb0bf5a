#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "wsn/types.hpp"

namespace wsn {

/// Built-in profiles for TR1001, CC1000 and CC1010. All three share the
/// same supply voltage and bitrate and their current draws are strictly
/// ordered state by state (TR1001 < CC1000 < CC1010), so for the same
/// radio timeline their total energies are strictly ordered too.
std::vector<ChipsetProfile> default_profiles();

/// Throws ConfigError if the profile violates the basic invariants
/// (non-negative currents, sleep < listen <= receive <= transmit,
/// positive bitrate).
void validate_profile(const ChipsetProfile& p);

const ChipsetProfile* find_profile(const std::vector<ChipsetProfile>& profiles,
                                   const std::string& name);

/// Parses a profile file: records of `key = value` lines, each record
/// starting with `name = ...`. Keys: name, voltage_v, i_tx_ma, i_rx_ma,
/// i_listen_ma, i_sleep_ma, bitrate_bps, preamble_bits. `#` starts a
/// comment; blank lines are ignored.
std::vector<ChipsetProfile> parse_chipset_text(const std::string& text);
std::vector<ChipsetProfile> load_chipset_file(const std::string& path);
std::string format_chipset_text(const std::vector<ChipsetProfile>& profiles);

}  // namespace wsn
