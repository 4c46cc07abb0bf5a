#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include "wsn/chipset.hpp"
#include "wsn/deployment.hpp"
#include "wsn/simulator.hpp"

namespace wsn {

/// Full sweep description: tables x deployments x chipsets x payload grid
/// x seeds, plus every scenario sub-config.
struct ExperimentSpec {
  std::vector<TableKind> tables;
  std::vector<DeploymentKind> deployments;
  std::vector<std::string> chipsets;
  std::vector<unsigned> extra_payload_bits_grid;
  std::vector<unsigned> seeds;  // seed indices fed to the splitting function
  std::uint64_t master_seed = 42;

  std::size_t node_count = 50;
  Area area;
  double comm_range_cm = 150.0;
  GatewayPlacement gateway_placement = GatewayPlacement::Corner;
  bool exclude_unreachable = false;

  double duration_s = 1200.0;
  double slot_s = 0.1;
  TrafficConfig traffic;
  CsmaConfig csma;
  int queue_capacity = 32;

  std::vector<ChipsetProfile> profiles;  // defaults unless a file overrides
};

/// The default spec: 6 tables x 2 deployments x 3 chipsets x 9 payload
/// points x 7 seeds over a 50-node 800x500 cm field, 1200 s per run.
ExperimentSpec default_spec();

/// Line-oriented `key = value` text. Unknown keys, malformed lines and
/// out-of-range values raise ConfigError naming the key and line. Missing
/// keys keep their defaults.
ExperimentSpec parse_config(const std::string& text);
ExperimentSpec load_config_file(const std::string& path);

struct DatasetRow {
  TableKind table;
  DeploymentKind deployment;
  std::string chipset;
  unsigned extra_payload_bits = 0;
  unsigned seed = 0;
  double total_energy_j = 0.0;
  std::uint64_t delivered = 0;
  std::uint64_t generated = 0;
  std::uint64_t collisions = 0;
  double mean_latency_frames = 0.0;
  std::uint64_t dropped = 0;
};

struct Dataset {
  std::vector<DatasetRow> rows;
};

/// Called after each finished run (from worker threads; one call per row).
using RunObserver =
    std::function<void(const DatasetRow&, const RunResult&, const Scenario&)>;

/// Per-tuple seed derivation (documented splitting): the random-deployment
/// position seed depends only on (master, seed index), so one seed index
/// reuses the identical topology across every table, chipset and payload
/// point; the scenario seed additionally depends on table and deployment
/// but never on chipset or payload, so those two axes replay the identical
/// contention timeline.
std::uint64_t deployment_seed(std::uint64_t master, unsigned seed_index);
std::uint64_t scenario_seed(std::uint64_t master, unsigned seed_index,
                            TableKind table, DeploymentKind deployment);

/// Runs the full cross product, `jobs` runs in parallel. Row order (and
/// therefore the output file) is independent of parallelism: rows are laid
/// out by tuple index. Throws DisconnectedTopologyError naming the tuple
/// when a random deployment is disconnected and the policy is Error.
Dataset run_sweep(const ExperimentSpec& spec, unsigned jobs = 1,
                  const RunObserver& observer = nullptr);

/// Builds the deployment/topology/scenario for a single tuple of the spec.
Scenario make_scenario(const ExperimentSpec& spec, TableKind table,
                       DeploymentKind deployment, const std::string& chipset,
                       unsigned extra_payload_bits, unsigned seed_index);

/// CSV with the fixed header
/// table,deployment,chipset,extra_payload_bits,seed,total_energy_j,
/// delivered,generated,collisions,mean_latency_frames,dropped.
/// Doubles are printed with 17 significant digits so a round-trip is exact.
void write_dataset_csv(std::ostream& out, const Dataset& ds);
Dataset read_dataset_csv(std::istream& in);

struct SummaryRow {
  TableKind table;
  DeploymentKind deployment;
  std::string chipset;
  unsigned extra_payload_bits = 0;
  std::size_t runs = 0;
  double mean_energy_j = 0.0;
  double stddev_energy_j = 0.0;  // sample standard deviation
};

/// Mean and sample standard deviation of total energy grouped by
/// (table, deployment, chipset, extra payload), seeds collapsed.
std::vector<SummaryRow> summarize(const Dataset& ds);

void write_summary_csv(std::ostream& out, const std::vector<SummaryRow>& rows);

/// One whitespace-separated series file per (table, deployment) named
/// `<table>_<deployment>.dat`, holding one block per chipset of
/// (extra_payload_bits, mean_energy_j, stddev) lines. Returns the paths
/// written. Throws IoError on an unwritable directory.
std::vector<std::string> emit_plot_series(const std::vector<SummaryRow>& summary,
                                          const std::string& out_dir);

}  // namespace wsn
