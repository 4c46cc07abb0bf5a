#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>

#include "CLI11.hpp"
#include "wsn/errors.hpp"
#include "wsn/harness.hpp"
#include "wsn/topology.hpp"

namespace {

using namespace wsn;

std::ofstream open_out(const std::string& path) {
  std::ofstream f(path);
  if (!f) throw IoError("cannot write to " + path);
  return f;
}

ExperimentSpec spec_from(const std::string& config_path) {
  return config_path.empty() ? default_spec() : load_config_file(config_path);
}

int cmd_deploy(const std::string& kind, std::size_t count, std::uint64_t seed,
               double width, double height, const std::string& gateway,
               const std::string& out_path) {
  const Area area{width, height};
  const GatewayPlacement gw = gateway_placement_from_string(gateway);
  Deployment d;
  if (deployment_kind_from_string(kind) == DeploymentKind::Grid)
    d = deploy_grid(count, area, gw);
  else
    d = deploy_random(count, area, seed, gw);
  if (out_path.empty() || out_path == "-") {
    write_placement(std::cout, d);
  } else {
    auto f = open_out(out_path);
    write_placement(f, d);
  }
  return 0;
}

int cmd_run(const std::string& config_path, const std::string& out_path,
            const std::string& log_path) {
  const ExperimentSpec spec = spec_from(config_path);
  if (spec.tables.size() != 1 || spec.deployments.size() != 1 ||
      spec.chipsets.size() != 1 || spec.extra_payload_bits_grid.size() != 1 ||
      spec.seeds.size() != 1)
    throw ConfigError(
        "run wants a single configuration tuple: tables, deployments, "
        "chipsets, extra_payload_bits and seeds must each have one entry "
        "(use sweep for grids)");

  Scenario sc = make_scenario(spec, spec.tables[0], spec.deployments[0],
                              spec.chipsets[0], spec.extra_payload_bits_grid[0],
                              spec.seeds[0]);
  std::ofstream log_file;
  if (!log_path.empty()) {
    log_file = open_out(log_path);
    sc.event_log = &log_file;
  }
  const RunResult rr = run(sc);

  Dataset ds;
  DatasetRow row;
  row.table = spec.tables[0];
  row.deployment = spec.deployments[0];
  row.chipset = spec.chipsets[0];
  row.extra_payload_bits = spec.extra_payload_bits_grid[0];
  row.seed = spec.seeds[0];
  row.total_energy_j = rr.total_energy_j;
  row.delivered = rr.packets_delivered;
  row.generated = rr.packets_generated;
  row.collisions = rr.collisions;
  row.mean_latency_frames = rr.mean_upstream_latency_frames;
  row.dropped = rr.dropped;
  ds.rows.push_back(row);

  if (out_path.empty() || out_path == "-") {
    write_dataset_csv(std::cout, ds);
  } else {
    auto f = open_out(out_path);
    write_dataset_csv(f, ds);
  }
  std::cerr << "simulated " << rr.simulated_s << " s: energy "
            << rr.total_energy_j << " J, delivered " << rr.packets_delivered
            << "/" << rr.packets_generated << ", collisions " << rr.collisions
            << ", retransmissions " << rr.retransmissions << ", dropped "
            << rr.dropped << ", in flight " << rr.in_flight << "\n";
  return 0;
}

int cmd_sweep(const std::string& config_path, const std::string& out_dir,
              unsigned jobs) {
  const ExperimentSpec spec = spec_from(config_path);
  const Dataset ds = run_sweep(spec, jobs);
  std::filesystem::create_directories(out_dir);
  auto f = open_out((std::filesystem::path(out_dir) / "dataset.csv").string());
  write_dataset_csv(f, ds);
  std::cerr << "wrote " << ds.rows.size() << " rows to " << out_dir
            << "/dataset.csv\n";
  return 0;
}

int cmd_report(const std::string& data_dir, const std::string& out_dir,
               const std::string& config_path, const std::string& topo_path,
               const std::string& topo_deployment, unsigned topo_seed) {
  if (!data_dir.empty()) {
    std::ifstream f(std::filesystem::path(data_dir) / "dataset.csv");
    if (!f) throw IoError("cannot open " + data_dir + "/dataset.csv");
    const Dataset ds = read_dataset_csv(f);
    const auto summary = summarize(ds);
    std::filesystem::create_directories(out_dir);
    auto sf = open_out((std::filesystem::path(out_dir) / "summary.csv").string());
    write_summary_csv(sf, summary);
    const auto files = emit_plot_series(summary, out_dir);
    std::cerr << "wrote summary.csv and " << files.size()
              << " plot series files to " << out_dir << "\n";
  }
  if (!topo_path.empty()) {
    const ExperimentSpec spec = spec_from(config_path);
    const DeploymentKind kind = deployment_kind_from_string(topo_deployment);
    Deployment d =
        kind == DeploymentKind::Grid
            ? deploy_grid(spec.node_count, spec.area, spec.gateway_placement)
            : deploy_random(spec.node_count, spec.area,
                            deployment_seed(spec.master_seed, topo_seed),
                            spec.gateway_placement);
    const Topology t = build_topology(d, spec.comm_range_cm,
                                      spec.exclude_unreachable
                                          ? UnreachablePolicy::Exclude
                                          : UnreachablePolicy::Error);
    auto f = open_out(topo_path);
    write_topology(f, t);
    std::cerr << "wrote topology dump to " << topo_path << "\n";
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"time-zone scheduled WSN simulator and experiment harness"};
  app.require_subcommand(1);

  // deploy
  auto* deploy = app.add_subcommand("deploy", "generate a node placement");
  std::string dep_kind = "random";
  std::size_t dep_count = 50;
  std::uint64_t dep_seed = 0;
  double dep_w = 800.0, dep_h = 500.0;
  std::string dep_gateway = "corner";
  std::string dep_out;
  deploy->add_option("--kind", dep_kind, "random|grid")->capture_default_str();
  deploy->add_option("--count", dep_count, "number of nodes")
      ->capture_default_str();
  deploy->add_option("--seed", dep_seed, "position seed (random only)")
      ->capture_default_str();
  deploy->add_option("--width", dep_w, "area width in cm")->capture_default_str();
  deploy->add_option("--height", dep_h, "area height in cm")
      ->capture_default_str();
  deploy->add_option("--gateway", dep_gateway, "corner|center")
      ->capture_default_str();
  deploy->add_option("--out", dep_out, "output file ('-' for stdout)");

  // run
  auto* runc = app.add_subcommand("run", "run one scenario");
  std::string run_config, run_out, run_log;
  runc->add_option("--config", run_config, "config file (defaults if omitted)");
  runc->add_option("--out", run_out, "CSV output file ('-' for stdout)");
  runc->add_option("--event-log", run_log, "per-slot MAC event log file");

  // sweep
  auto* sweep = app.add_subcommand("sweep", "run the full experiment grid");
  std::string sweep_config, sweep_out = "out";
  unsigned jobs = std::max(1u, std::thread::hardware_concurrency());
  sweep->add_option("--config", sweep_config, "config file (defaults if omitted)");
  sweep->add_option("--out", sweep_out, "output directory")
      ->capture_default_str();
  sweep->add_option("--jobs", jobs, "parallel runs")->capture_default_str();

  // report
  auto* report = app.add_subcommand("report", "aggregate a sweep dataset");
  std::string rep_data, rep_out = "report", rep_config, rep_topo;
  std::string rep_topo_deployment = "random";
  unsigned rep_topo_seed = 0;
  report->add_option("--data", rep_data, "directory holding dataset.csv");
  report->add_option("--out", rep_out, "output directory")
      ->capture_default_str();
  report->add_option("--config", rep_config, "config for --topology");
  report->add_option("--topology", rep_topo, "write a topology dump here");
  report->add_option("--topology-deployment", rep_topo_deployment,
                     "random|grid for --topology")
      ->capture_default_str();
  report->add_option("--topology-seed", rep_topo_seed,
                     "seed index for --topology")
      ->capture_default_str();

  CLI11_PARSE(app, argc, argv);

  try {
    if (deploy->parsed())
      return cmd_deploy(dep_kind, dep_count, dep_seed, dep_w, dep_h,
                        dep_gateway, dep_out);
    if (runc->parsed()) return cmd_run(run_config, run_out, run_log);
    if (sweep->parsed()) return cmd_sweep(sweep_config, sweep_out, jobs);
    if (report->parsed())
      return cmd_report(rep_data, rep_out, rep_config, rep_topo,
                        rep_topo_deployment, rep_topo_seed);
  } catch (const wsn::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return 1;
  } catch (const wsn::SimulationError& e) {
    std::cerr << "simulation error: " << e.what() << "\n";
    return 2;
  } catch (const wsn::IoError& e) {
    std::cerr << "io error: " << e.what() << "\n";
    return 3;
  }
  return 0;
}
