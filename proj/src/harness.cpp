#include "wsn/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <mutex>
#include <sstream>
#include <thread>

#include "wsn/errors.hpp"
#include "wsn/rng.hpp"
#include "wsn/topology.hpp"

namespace wsn {

ExperimentSpec default_spec() {
  ExperimentSpec spec;
  spec.tables.assign(kAllTableKinds.begin(), kAllTableKinds.end());
  spec.deployments = {DeploymentKind::Random, DeploymentKind::Grid};
  spec.chipsets = {"TR1001", "CC1000", "CC1010"};
  spec.extra_payload_bits_grid = {0, 128, 256, 384, 512, 640, 768, 896, 1023};
  spec.seeds = {0, 1, 2, 3, 4, 5, 6};
  spec.profiles = default_profiles();
  return spec;
}

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> split_csv(const std::string& s) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream in(s);
  while (std::getline(in, item, ',')) out.push_back(trim(item));
  if (!out.empty() && out.back().empty()) out.pop_back();
  return out;
}

struct KeyContext {
  const std::string& key;
  int line;

  [[noreturn]] void bad(const std::string& why) const {
    throw ConfigError("config line " + std::to_string(line) + ": key '" + key +
                      "': " + why);
  }
};

double to_double(const std::string& v, const KeyContext& kc) {
  try {
    std::size_t pos = 0;
    const double d = std::stod(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return d;
  } catch (const std::exception&) {
    kc.bad("not a number: '" + v + "'");
  }
}

long long to_int(const std::string& v, const KeyContext& kc) {
  try {
    std::size_t pos = 0;
    const long long i = std::stoll(v, &pos);
    if (pos != v.size()) throw std::invalid_argument(v);
    return i;
  } catch (const std::exception&) {
    kc.bad("not an integer: '" + v + "'");
  }
}

bool to_bool(const std::string& v, const KeyContext& kc) {
  if (v == "true" || v == "1") return true;
  if (v == "false" || v == "0") return false;
  kc.bad("expected true/false: '" + v + "'");
}

}  // namespace

ExperimentSpec parse_config(const std::string& text) {
  ExperimentSpec spec = default_spec();
  std::string chipset_file;

  std::istringstream in(text);
  std::string line;
  int lineno = 0;
  std::vector<std::string> seen;
  while (std::getline(in, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError("config line " + std::to_string(lineno) +
                        ": expected key = value");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    const KeyContext kc{key, lineno};
    if (std::find(seen.begin(), seen.end(), key) != seen.end())
      kc.bad("duplicate key");
    seen.push_back(key);

    if (key == "node_count") {
      const long long v = to_int(value, kc);
      if (v < 2) kc.bad("must be >= 2");
      spec.node_count = static_cast<std::size_t>(v);
    } else if (key == "area_width_cm") {
      spec.area.width_cm = to_double(value, kc);
      if (!(spec.area.width_cm > 0)) kc.bad("must be positive");
    } else if (key == "area_height_cm") {
      spec.area.height_cm = to_double(value, kc);
      if (!(spec.area.height_cm > 0)) kc.bad("must be positive");
    } else if (key == "comm_range_cm") {
      spec.comm_range_cm = to_double(value, kc);
      if (!(spec.comm_range_cm > 0)) kc.bad("must be positive");
    } else if (key == "gateway_placement") {
      spec.gateway_placement = gateway_placement_from_string(value);
    } else if (key == "exclude_unreachable") {
      spec.exclude_unreachable = to_bool(value, kc);
    } else if (key == "duration_s") {
      spec.duration_s = to_double(value, kc);
      if (!(spec.duration_s > 0)) kc.bad("must be positive");
    } else if (key == "slot_s") {
      spec.slot_s = to_double(value, kc);
      if (!(spec.slot_s > 0)) kc.bad("must be positive");
    } else if (key == "master_seed") {
      spec.master_seed = static_cast<std::uint64_t>(to_int(value, kc));
    } else if (key == "seeds") {
      spec.seeds.clear();
      for (const auto& s : split_csv(value)) {
        const long long v = to_int(s, kc);
        if (v < 0) kc.bad("seed indices must be >= 0");
        spec.seeds.push_back(static_cast<unsigned>(v));
      }
      if (spec.seeds.empty()) kc.bad("needs at least one seed");
    } else if (key == "tables") {
      spec.tables.clear();
      for (const auto& s : split_csv(value))
        spec.tables.push_back(table_kind_from_string(s));
      if (spec.tables.empty()) kc.bad("needs at least one table");
    } else if (key == "deployments") {
      spec.deployments.clear();
      for (const auto& s : split_csv(value))
        spec.deployments.push_back(deployment_kind_from_string(s));
      if (spec.deployments.empty()) kc.bad("needs at least one deployment");
    } else if (key == "chipsets") {
      spec.chipsets = split_csv(value);
      if (spec.chipsets.empty()) kc.bad("needs at least one chipset");
    } else if (key == "extra_payload_bits") {
      spec.extra_payload_bits_grid.clear();
      for (const auto& s : split_csv(value)) {
        const long long v = to_int(s, kc);
        if (v < 0 || v > static_cast<long long>(kMaxExtraPayloadBits))
          kc.bad("values must be in [0, 1023]");
        spec.extra_payload_bits_grid.push_back(static_cast<unsigned>(v));
      }
      if (spec.extra_payload_bits_grid.empty()) kc.bad("needs at least one value");
    } else if (key == "payload_bytes") {
      const long long v = to_int(value, kc);
      if (v < 0 || v > static_cast<long long>(kMaxPayloadBytes))
        kc.bad("must be in [0, 127]");
      spec.traffic.payload_bytes = static_cast<unsigned>(v);
    } else if (key == "header_bytes") {
      const long long v = to_int(value, kc);
      if (v < 1 || v > 255) kc.bad("must be in [1, 255]");
      spec.traffic.header_bytes = static_cast<unsigned>(v);
    } else if (key == "report_interval_s") {
      spec.traffic.report_interval_s = to_double(value, kc);
      if (spec.traffic.report_interval_s < 0) kc.bad("must be >= 0 (0 disables)");
    } else if (key == "downstream_interval_s") {
      spec.traffic.downstream_interval_s = to_double(value, kc);
      if (spec.traffic.downstream_interval_s < 0)
        kc.bad("must be >= 0 (0 disables)");
    } else if (key == "contention_window") {
      const long long v = to_int(value, kc);
      if (v < 1) kc.bad("must be >= 1");
      spec.csma.contention_window = static_cast<int>(v);
    } else if (key == "micro_slot_s") {
      spec.csma.micro_slot_s = to_double(value, kc);
      if (spec.csma.micro_slot_s < 0) kc.bad("must be >= 0");
    } else if (key == "max_retries") {
      const long long v = to_int(value, kc);
      if (v < 0) kc.bad("must be >= 0");
      spec.csma.max_retries = static_cast<int>(v);
    } else if (key == "queue_capacity") {
      const long long v = to_int(value, kc);
      if (v < 1) kc.bad("must be >= 1");
      spec.queue_capacity = static_cast<int>(v);
    } else if (key == "chipset_file") {
      chipset_file = value;
    } else {
      kc.bad("unknown key");
    }
  }

  if (!chipset_file.empty()) spec.profiles = load_chipset_file(chipset_file);
  for (const auto& name : spec.chipsets)
    if (!find_profile(spec.profiles, name))
      throw ConfigError("config: chipset '" + name + "' has no profile");
  return spec;
}

ExperimentSpec load_config_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw IoError("cannot open config file: " + path);
  std::ostringstream ss;
  ss << f.rdbuf();
  return parse_config(ss.str());
}

std::uint64_t deployment_seed(std::uint64_t master, unsigned seed_index) {
  return mix_seed(mix_seed(master, label_hash("deploy")), seed_index);
}

std::uint64_t scenario_seed(std::uint64_t master, unsigned seed_index,
                            TableKind table, DeploymentKind deployment) {
  std::uint64_t s = mix_seed(master, label_hash("run"));
  s = mix_seed(s, seed_index);
  s = mix_seed(s, static_cast<std::uint64_t>(table));
  s = mix_seed(s, static_cast<std::uint64_t>(deployment));
  return s;
}

namespace {

Deployment make_deployment(const ExperimentSpec& spec, DeploymentKind kind,
                           unsigned seed_index) {
  if (kind == DeploymentKind::Grid)
    return deploy_grid(spec.node_count, spec.area, spec.gateway_placement);
  return deploy_random(spec.node_count, spec.area,
                       deployment_seed(spec.master_seed, seed_index),
                       spec.gateway_placement);
}

}  // namespace

Scenario make_scenario(const ExperimentSpec& spec, TableKind table,
                       DeploymentKind deployment, const std::string& chipset,
                       unsigned extra_payload_bits, unsigned seed_index) {
  const ChipsetProfile* profile = find_profile(spec.profiles, chipset);
  if (!profile) throw ConfigError("no profile for chipset '" + chipset + "'");

  Scenario sc;
  sc.topology = build_topology(make_deployment(spec, deployment, seed_index),
                               spec.comm_range_cm,
                               spec.exclude_unreachable
                                   ? UnreachablePolicy::Exclude
                                   : UnreachablePolicy::Error);
  sc.table = build_table(table);
  sc.profile = *profile;
  sc.traffic = spec.traffic;
  sc.traffic.extra_payload_bits = extra_payload_bits;
  sc.duration_s = spec.duration_s;
  sc.slot_s = spec.slot_s;
  sc.csma = spec.csma;
  sc.queue_capacity = spec.queue_capacity;
  sc.seed = scenario_seed(spec.master_seed, seed_index, table, deployment);
  return sc;
}

Dataset run_sweep(const ExperimentSpec& spec, unsigned jobs,
                  const RunObserver& observer) {
  struct Tuple {
    TableKind table;
    DeploymentKind deployment;
    std::string chipset;
    unsigned bits;
    unsigned seed;
  };
  std::vector<Tuple> tuples;
  for (TableKind t : spec.tables)
    for (DeploymentKind d : spec.deployments)
      for (const auto& c : spec.chipsets)
        for (unsigned b : spec.extra_payload_bits_grid)
          for (unsigned s : spec.seeds) tuples.push_back({t, d, c, b, s});

  // Topologies are shared across tables/chipsets/payloads: build them up
  // front, once per (deployment kind, seed index).
  std::map<std::pair<DeploymentKind, unsigned>, Topology> topologies;
  for (DeploymentKind d : spec.deployments) {
    for (unsigned s : spec.seeds) {
      const unsigned key_seed = d == DeploymentKind::Grid ? 0 : s;
      const auto key = std::make_pair(d, key_seed);
      if (topologies.count(key)) continue;
      try {
        topologies.emplace(key,
                           build_topology(make_deployment(spec, d, key_seed),
                                          spec.comm_range_cm,
                                          spec.exclude_unreachable
                                              ? UnreachablePolicy::Exclude
                                              : UnreachablePolicy::Error));
      } catch (const DisconnectedTopologyError& e) {
        throw DisconnectedTopologyError(
            std::string(e.what()) + " (deployment " + to_string(d) +
            ", seed index " + std::to_string(key_seed) + ")");
      }
    }
  }

  Dataset ds;
  ds.rows.resize(tuples.size());
  std::atomic<std::size_t> cursor{0};
  std::exception_ptr first_error;
  std::mutex error_mu;

  auto worker = [&]() {
    for (;;) {
      const std::size_t i = cursor.fetch_add(1);
      if (i >= tuples.size()) return;
      const Tuple& tp = tuples[i];
      try {
        const ChipsetProfile* profile = find_profile(spec.profiles, tp.chipset);
        Scenario sc;
        const unsigned key_seed =
            tp.deployment == DeploymentKind::Grid ? 0 : tp.seed;
        sc.topology = topologies.at({tp.deployment, key_seed});
        sc.table = build_table(tp.table);
        sc.profile = *profile;
        sc.traffic = spec.traffic;
        sc.traffic.extra_payload_bits = tp.bits;
        sc.duration_s = spec.duration_s;
        sc.slot_s = spec.slot_s;
        sc.csma = spec.csma;
        sc.queue_capacity = spec.queue_capacity;
        sc.seed = scenario_seed(spec.master_seed, tp.seed, tp.table,
                                tp.deployment);

        const RunResult rr = run(sc);
        DatasetRow& row = ds.rows[i];
        row.table = tp.table;
        row.deployment = tp.deployment;
        row.chipset = tp.chipset;
        row.extra_payload_bits = tp.bits;
        row.seed = tp.seed;
        row.total_energy_j = rr.total_energy_j;
        row.delivered = rr.packets_delivered;
        row.generated = rr.packets_generated;
        row.collisions = rr.collisions;
        row.mean_latency_frames = rr.mean_upstream_latency_frames;
        row.dropped = rr.dropped;
        if (observer) observer(row, rr, sc);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mu);
        if (!first_error) first_error = std::current_exception();
        cursor.store(tuples.size());
        return;
      }
    }
  };

  if (jobs <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (unsigned j = 0; j < jobs; ++j) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  if (first_error) std::rethrow_exception(first_error);
  return ds;
}

namespace {

std::string fmt_double(double d) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.17g", d);
  return buf;
}

}  // namespace

void write_dataset_csv(std::ostream& out, const Dataset& ds) {
  out << "table,deployment,chipset,extra_payload_bits,seed,total_energy_j,"
         "delivered,generated,collisions,mean_latency_frames,dropped\n";
  for (const auto& r : ds.rows) {
    out << to_string(r.table) << ',' << to_string(r.deployment) << ','
        << r.chipset << ',' << r.extra_payload_bits << ',' << r.seed << ','
        << fmt_double(r.total_energy_j) << ',' << r.delivered << ','
        << r.generated << ',' << r.collisions << ','
        << fmt_double(r.mean_latency_frames) << ',' << r.dropped << '\n';
  }
}

Dataset read_dataset_csv(std::istream& in) {
  Dataset ds;
  std::string line;
  if (!std::getline(in, line)) throw IoError("dataset csv: empty input");
  if (line.size() && line.back() == '\r') line.pop_back();
  if (line != "table,deployment,chipset,extra_payload_bits,seed,total_energy_j,"
              "delivered,generated,collisions,mean_latency_frames,dropped")
    throw IoError("dataset csv: unexpected header: " + line);
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.size() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<std::string> f = split_csv(line);
    if (f.size() != 11)
      throw IoError("dataset csv line " + std::to_string(lineno) +
                    ": expected 11 fields");
    DatasetRow r;
    try {
      r.table = table_kind_from_string(f[0]);
      r.deployment = deployment_kind_from_string(f[1]);
      r.chipset = f[2];
      r.extra_payload_bits = static_cast<unsigned>(std::stoul(f[3]));
      r.seed = static_cast<unsigned>(std::stoul(f[4]));
      r.total_energy_j = std::stod(f[5]);
      r.delivered = std::stoull(f[6]);
      r.generated = std::stoull(f[7]);
      r.collisions = std::stoull(f[8]);
      r.mean_latency_frames = std::stod(f[9]);
      r.dropped = std::stoull(f[10]);
    } catch (const ConfigError&) {
      throw;
    } catch (const std::exception&) {
      throw IoError("dataset csv line " + std::to_string(lineno) +
                    ": malformed value");
    }
    ds.rows.push_back(std::move(r));
  }
  return ds;
}

std::vector<SummaryRow> summarize(const Dataset& ds) {
  if (ds.rows.empty()) throw ConfigError("summarize: empty dataset");
  // Group in first-appearance order so summaries follow the sweep layout.
  std::vector<SummaryRow> out;
  std::vector<std::vector<double>> groups;
  auto key_of = [](const DatasetRow& r) {
    return std::make_tuple(r.table, r.deployment, r.chipset,
                           r.extra_payload_bits);
  };
  std::map<std::tuple<TableKind, DeploymentKind, std::string, unsigned>,
           std::size_t>
      index;
  for (const auto& r : ds.rows) {
    const auto key = key_of(r);
    auto it = index.find(key);
    if (it == index.end()) {
      index.emplace(key, out.size());
      SummaryRow s;
      s.table = r.table;
      s.deployment = r.deployment;
      s.chipset = r.chipset;
      s.extra_payload_bits = r.extra_payload_bits;
      out.push_back(s);
      groups.emplace_back();
      it = index.find(key);
    }
    groups[it->second].push_back(r.total_energy_j);
  }
  for (std::size_t i = 0; i < out.size(); ++i) {
    const auto& g = groups[i];
    double mean = 0.0;
    for (double v : g) mean += v;
    mean /= static_cast<double>(g.size());
    double var = 0.0;
    if (g.size() > 1) {
      for (double v : g) var += (v - mean) * (v - mean);
      var /= static_cast<double>(g.size() - 1);
    }
    out[i].runs = g.size();
    out[i].mean_energy_j = mean;
    out[i].stddev_energy_j = std::sqrt(var);
  }
  return out;
}

void write_summary_csv(std::ostream& out, const std::vector<SummaryRow>& rows) {
  out << "table,deployment,chipset,extra_payload_bits,runs,mean_energy_j,"
         "stddev_energy_j\n";
  for (const auto& r : rows) {
    out << to_string(r.table) << ',' << to_string(r.deployment) << ','
        << r.chipset << ',' << r.extra_payload_bits << ',' << r.runs << ','
        << fmt_double(r.mean_energy_j) << ',' << fmt_double(r.stddev_energy_j)
        << '\n';
  }
}

std::vector<std::string> emit_plot_series(const std::vector<SummaryRow>& summary,
                                          const std::string& out_dir) {
  namespace fs = std::filesystem;
  std::error_code ec;
  fs::create_directories(out_dir, ec);

  // Preserve first-appearance order for charts and chipset blocks.
  std::vector<std::pair<TableKind, DeploymentKind>> charts;
  for (const auto& r : summary) {
    const auto key = std::make_pair(r.table, r.deployment);
    if (std::find(charts.begin(), charts.end(), key) == charts.end())
      charts.push_back(key);
  }

  std::vector<std::string> written;
  for (const auto& [table, deployment] : charts) {
    std::vector<std::string> chipsets;
    for (const auto& r : summary)
      if (r.table == table && r.deployment == deployment &&
          std::find(chipsets.begin(), chipsets.end(), r.chipset) ==
              chipsets.end())
        chipsets.push_back(r.chipset);

    const std::string path = (fs::path(out_dir) /
                              (std::string(to_string(table)) + "_" +
                               to_string(deployment) + ".dat"))
                                 .string();
    std::ofstream f(path);
    if (!f) throw IoError("cannot write plot series file: " + path);
    f << "# total energy vs extra payload, " << to_string(table) << " / "
      << to_string(deployment) << "\n";
    f << "# columns: extra_payload_bits mean_energy_j stddev_j\n";
    for (std::size_t ci = 0; ci < chipsets.size(); ++ci) {
      f << "# chipset " << chipsets[ci] << "\n";
      for (const auto& r : summary) {
        if (r.table == table && r.deployment == deployment &&
            r.chipset == chipsets[ci]) {
          f << r.extra_payload_bits << ' ' << fmt_double(r.mean_energy_j)
            << ' ' << fmt_double(r.stddev_energy_j) << '\n';
        }
      }
      if (ci + 1 < chipsets.size()) f << '\n';
    }
    if (!f) throw IoError("write failed: " + path);
    written.push_back(path);
  }
  return written;
}

}  // namespace wsn
