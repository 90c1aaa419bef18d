// Command-line front end. Exit codes: 0 success, 1 configuration or input
// error, 2 unstable ROM (its report is still written).

#include <filesystem>
#include <iostream>
#include <optional>

#include <CLI11.hpp>

#include "eulerrom/eulerrom.hpp"

namespace fs = std::filesystem;
using namespace eulerrom;

namespace {

constexpr int kExitError = 1;
constexpr int kExitUnstable = 2;

ProblemConfig load_config(const std::string& path, const std::optional<std::uint64_t>& seed) {
  ProblemConfig cfg = read_config(path);
  if (seed) cfg.seed = *seed;
  return cfg;
}

std::string stem_of(const std::string& path) { return fs::path(path).stem().string(); }

int fom_run(const std::string& config, std::string out, const std::optional<std::uint64_t>& seed) {
  const ProblemConfig cfg = load_config(config, seed);
  if (out.empty()) out = stem_of(config) + ".ersn";
  const SnapshotSet s = run_fom(cfg);
  save_snapshots(out, s);
  std::cout << "wrote " << out << " (" << s.num_snapshots() << " snapshots, " << cfg.total_steps() << " steps)\n";
  return 0;
}

int pod_build(const std::string& snapshots, const std::string& ip, const std::string& vars, int k,
              std::string out) {
  const SnapshotSet s = load_snapshots(snapshots);
  const auto kind = parse_inner_product_kind(ip);
  const auto set = parse_variable_set(vars);
  const WeightOperator w = build_weight(make_inner_product_spec(kind, s.config, s.data), s.config);
  const PodBasis b =
      compute_pod(snapshots_in(set, s.data, s.config.dimension(), s.config.gas()), w, k, set);
  if (out.empty()) out = stem_of(snapshots) + "_" + ip + "_" + vars + "_K" + std::to_string(k) + ".erpb";
  save_basis(out, b);
  std::cout << "wrote " << out << " (K = " << k << ", truncated energy " << b.truncated_energy << ")\n";
  return 0;
}

struct RomRunOptions {
  std::string config, formulation, basis, snapshots, output = ".";
  int window = 0;
  int steps = -1;
};

int rom_run(const RomRunOptions& o, const std::optional<std::uint64_t>& seed) {
  const ProblemConfig cfg = load_config(o.config, seed);
  const Formulation f = parse_formulation(o.formulation);
  PodBasis basis = load_basis(o.basis, cfg.gas());
  check_pairing(f, basis);
  SnapshotSet fom;
  if (o.snapshots.empty()) {
    fom = run_fom(cfg);
  } else {
    auto is = io::open_in(o.snapshots);
    fom = read_snapshots(is);
    fom.config = cfg;
    if (fom.data.rows() != basis.modes.rows()) throw ConfigError("snapshots do not match the configuration");
  }
  const int k = int(basis.size());
  Experiment ex(std::move(fom));
  const RomSpec spec =
      make_rom_spec(f, std::move(basis), cfg, ex.fom().data, o.window > 0 ? o.window : default_window(cfg));
  const RomTrajectory traj = ex.run(spec, o.steps);
  const RunReport report = ex.report(spec, traj);
  fs::create_directories(o.output);
  const std::string stem = run_file_stem(cfg) + "_" + to_string(f) + "_K" + std::to_string(k);
  write_reports((fs::path(o.output) / (stem + ".csv")).string(), {report});
  save_trajectory((fs::path(o.output) / (stem + ".ertj")).string(), traj);
  std::cout << to_csv_row(report) << '\n';
  if (!traj.stable) {
    std::cerr << "unstable: first non-finite state at t = " << traj.t_first_nan << '\n';
    return kExitUnstable;
  }
  return 0;
}

std::vector<RunReport> filter(std::vector<RunReport> reports, const std::string& dimensional) {
  if (dimensional == "both") return reports;
  const bool want = io::parse_bool("dimensional", dimensional);
  std::erase_if(reports, [&](const RunReport& r) { return r.dimensional != want; });
  return reports;
}

int report(const std::string& dir, const std::string& dimensional, std::string out) {
  const auto reports = filter(read_report_directory(dir), dimensional);
  if (reports.empty()) throw ConfigError("no run reports in " + dir);
  const auto summary = summarize(reports);
  write_summary_table(std::cout, summary);
  if (out.empty()) out = (fs::path(dir) / "summary.csv").string();
  std::ofstream os(out);
  if (!os) throw std::runtime_error("cannot open for writing: " + out);
  write_summary_csv(os, summary);
  return 0;
}

int sweep(const std::string& plan_path, int threads, const std::optional<std::uint64_t>& seed) {
  ExperimentPlan plan = read_plan(plan_path);
  if (seed) {
    for (auto& c : plan.configs) c.seed = *seed;
  }
  const SweepResult r = run_sweep(plan, threads > 0 ? threads : thread_count());
  write_summary_table(std::cout, summarize(r.reports));
  {
    std::ofstream os(fs::path(plan.output) / "summary.csv");
    write_summary_csv(os, summarize(r.reports));
  }
  for (const auto& c : r.consistency) {
    std::cout << "consistency " << to_string(c.formulation) << " K=" << c.k << ": " << c.discrepancy << '\n';
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Dimensionally consistent Euler reduced-order models"};
  app.require_subcommand(1);
  std::optional<std::uint64_t> seed;
  app.add_option("--seed", seed, "Override the configuration seed (turbulence initial data)");

  auto* fom = app.add_subcommand("fom", "Full-order model");
  fom->require_subcommand(1);
  auto* fom_run_cmd = fom->add_subcommand("run", "Run the full-order model and write snapshots");
  std::string fom_config, fom_out;
  fom_run_cmd->add_option("config", fom_config, "Problem configuration")->required()->check(CLI::ExistingFile);
  fom_run_cmd->add_option("-o,--output", fom_out, "Snapshot file (default <config>.ersn)");

  auto* pod = app.add_subcommand("pod", "Proper orthogonal decomposition");
  pod->require_subcommand(1);
  auto* pod_build_cmd = pod->add_subcommand("build", "Build a basis from a snapshot file");
  std::string pod_snaps, pod_ip, pod_vars = "conserved", pod_out;
  int pod_k = 0;
  pod_build_cmd->add_option("snapshots", pod_snaps, "Snapshot file")->required()->check(CLI::ExistingFile);
  pod_build_cmd->add_option("--ip", pod_ip, "Inner product: l2, l2star, entropy-a, entropy-atilde")->required();
  pod_build_cmd->add_option("--vars", pod_vars, "Variable set: conserved or entropy");
  pod_build_cmd->add_option("-K", pod_k, "Basis dimension")->required();
  pod_build_cmd->add_option("-o,--output", pod_out, "Basis file");

  auto* rom = app.add_subcommand("rom", "Reduced-order model");
  rom->require_subcommand(1);
  auto* rom_run_cmd = rom->add_subcommand("run", "Run one ROM and write its report and trajectory");
  RomRunOptions ro;
  rom_run_cmd->add_option("config", ro.config, "Problem configuration")->required()->check(CLI::ExistingFile);
  rom_run_cmd->add_option("--formulation", ro.formulation, "Formulation tag")->required();
  rom_run_cmd->add_option("--basis", ro.basis, "Basis file")->required()->check(CLI::ExistingFile);
  rom_run_cmd->add_option("--window", ro.window, "WLS window in time steps");
  rom_run_cmd->add_option("--snapshots", ro.snapshots, "Reuse a snapshot file instead of rerunning the FOM");
  rom_run_cmd->add_option("--steps", ro.steps, "Truncate the ROM horizon");
  rom_run_cmd->add_option("-o,--output", ro.output, "Output directory");

  auto* report_cmd = app.add_subcommand("report", "Summarize the run reports in a directory");
  std::string report_dir, report_dim = "both", report_out;
  report_cmd->add_option("dir", report_dir, "Directory of report CSVs")->required();
  report_cmd->add_option("--dimensional", report_dim, "true, false or both");
  report_cmd->add_option("-o,--output", report_out, "Summary CSV (default <dir>/summary.csv)");

  auto* sweep_cmd = app.add_subcommand("sweep", "Run an experiment plan");
  std::string plan_path;
  int threads = 0;
  sweep_cmd->add_option("plan", plan_path, "Plan file")->required()->check(CLI::ExistingFile);
  sweep_cmd->add_option("--threads", threads, "Worker threads (default EULERROM_THREADS or 1)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitError;
  }

  try {
    if (*fom_run_cmd) return fom_run(fom_config, fom_out, seed);
    if (*pod_build_cmd) return pod_build(pod_snaps, pod_ip, pod_vars, pod_k, pod_out);
    if (*rom_run_cmd) return rom_run(ro, seed);
    if (*report_cmd) return report(report_dir, report_dim, report_out);
    if (*sweep_cmd) return sweep(plan_path, threads, seed);
  } catch (const PairingError& e) {
    std::cerr << "pairing error: " << e.what() << '\n';
    return kExitError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitError;
  }
  return kExitError;
}
