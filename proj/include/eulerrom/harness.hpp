#pragma once

// Experiment orchestration: error metrics against full-order snapshots,
// dimensional/non-dimensional consistency, run reports (CSV), aggregate
// summaries and plan-driven sweeps.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <limits>
#include <map>
#include <mutex>
#include <set>
#include <sstream>
#include <string>
#include <thread>
#include <tuple>
#include <vector>

#include "eulerrom/inner_products.hpp"
#include "eulerrom/io.hpp"
#include "eulerrom/pod.hpp"
#include "eulerrom/problems.hpp"
#include "eulerrom/rom.hpp"

namespace eulerrom {

inline constexpr double kInf = std::numeric_limits<double>::infinity();
inline constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();

/// e_q = sum_t sum_cells (q~ - q)^2 / sum_t sum_cells q^2 over snapshot times
/// t_0 .. t_{J-2} (left-endpoint quadrature; uniform volumes and snapshot
/// spacing cancel), or over the snapshots a shorter ROM run reaches. Four
/// entries (rho, rho u1, rho u2, rho E); rho u2 is NaN in 1D. Unstable or
/// inadmissible trajectories give +inf.
inline std::array<double, 4> error_metrics(const RomTrajectory& traj, const PodBasis& basis,
                                           const SnapshotSet& fom) {
  const int dim = fom.config.dimension();
  const int m = dim + 2;
  const int stride = fom.config.snapshot_stride;
  std::array<double, 4> out{kInf, kInf, kInf, kInf};
  if (dim == 1) out[2] = kNaN;
  const Eigen::Index snaps = fom.num_snapshots();
  if (!traj.stable || traj.saved_steps() == 0) return out;
  // a truncated ROM horizon is scored over the snapshots it reaches
  const Eigen::Index used =
      std::min(std::max<Eigen::Index>(snaps - 1, 1), (traj.saved_steps() - 1) / stride + 1);
  const Eigen::Index cells = fom.data.rows() / m;
  std::vector<double> num(m, 0.0), den(m, 0.0);
  Vector u;
  for (Eigen::Index j = 0; j < used; ++j) {
    if (!conserved_state(basis, traj.coords.col(j * stride), u)) return out;
    Eigen::Map<const Matrix> q(fom.data.col(j).data(), m, cells);
    Eigen::Map<const Matrix> qa(u.data(), m, cells);
    for (int v = 0; v < m; ++v) {
      num[v] += (qa.row(v) - q.row(v)).squaredNorm();
      den[v] += q.row(v).squaredNorm();
    }
  }
  auto ratio = [](double a, double b) { return b > 0.0 ? a / b : (a > 0.0 ? kInf : 0.0); };
  out[0] = ratio(num[0], den[0]);
  out[1] = ratio(num[1], den[1]);
  if (dim == 2) out[2] = ratio(num[2], den[2]);
  out[3] = ratio(num[m - 1], den[m - 1]);
  return out;
}

/// Max over common saved steps of ||U_a / D_a - U_b / D_b|| / ||U_b / D_b||,
/// where D scales each configuration's conserved variables to non-dimensional
/// units. +inf if exactly one run is unstable or a state is inadmissible.
inline double consistency_check(const RomTrajectory& traj_a, const PodBasis& basis_a, const ProblemConfig& cfg_a,
                                const RomTrajectory& traj_b, const PodBasis& basis_b, const ProblemConfig& cfg_b) {
  if (cfg_a.dimension() != cfg_b.dimension()) throw std::invalid_argument("consistency_check: dimension mismatch");
  if (traj_a.stable != traj_b.stable) return kInf;
  const Eigen::Index n = std::min(traj_a.saved_steps(), traj_b.saved_steps());
  return dispatch_dimension(cfg_a.dimension(), [&](auto d) {
    constexpr int D = decltype(d)::value;
    double worst = 0.0;
    Vector ua, ub;
    for (Eigen::Index s = 0; s < n; ++s) {
      if (!conserved_state(basis_a, traj_a.coords.col(s), ua) ||
          !conserved_state(basis_b, traj_b.coords.col(s), ub)) {
        return kInf;
      }
      const Vector na = nondimensionalize<D>(ua, cfg_a);
      const Vector nb = nondimensionalize<D>(ub, cfg_b);
      worst = std::max(worst, (na - nb).norm() / nb.norm());
    }
    return worst;
  });
}

// ---- run reports --------------------------------------------------------------------

struct RunReport {
  std::string problem;
  bool dimensional = false;
  std::string formulation;
  int k = 0;
  bool stable = true;
  double t_first_nan = kNaN;
  std::array<double, 4> errors{kNaN, kNaN, kNaN, kNaN};  // rho, rho u1, rho u2, rho E
  double wall_seconds = 0.0;
};

inline const char* kReportHeader =
    "problem,dimensional,formulation,K,stable,t_first_nan,e_rho,e_rhou1,e_rhou2,e_rhoE,wall_seconds";
inline constexpr std::array<const char*, 4> kErrorNames = {"e_rho", "e_rhou1", "e_rhou2", "e_rhoE"};

namespace detail {

inline std::string csv_number(double v) {
  if (std::isnan(v)) return "";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  return io::format_double(v);
}

inline double parse_csv_number(const std::string& s) {
  if (s.empty()) return kNaN;
  if (s == "inf") return kInf;
  if (s == "-inf") return -kInf;
  return io::parse_double("csv", s);
}

}  // namespace detail

inline std::string to_csv_row(const RunReport& r) {
  std::ostringstream os;
  os << r.problem << ',' << (r.dimensional ? "true" : "false") << ',' << r.formulation << ',' << r.k << ','
     << (r.stable ? "true" : "false") << ',' << detail::csv_number(r.t_first_nan);
  for (double e : r.errors) os << ',' << detail::csv_number(e);
  os << ',' << detail::csv_number(r.wall_seconds);
  return os.str();
}

inline void write_reports(std::ostream& os, const std::vector<RunReport>& reports) {
  os << kReportHeader << '\n';
  for (const auto& r : reports) os << to_csv_row(r) << '\n';
}

inline void write_reports(const std::string& path, const std::vector<RunReport>& reports) {
  std::ofstream os(path);
  if (!os) throw std::runtime_error("cannot open for writing: " + path);
  write_reports(os, reports);
}

inline std::vector<RunReport> read_reports(std::istream& is) {
  std::string line;
  if (!std::getline(is, line) || io::trim(line) != kReportHeader) {
    throw io::FormatError("report CSV: unexpected header");
  }
  std::vector<RunReport> out;
  int lineno = 1;
  while (std::getline(is, line)) {
    ++lineno;
    if (io::trim(line).empty()) continue;
    std::vector<std::string> f;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) f.push_back(io::trim(cell));
    if (!line.empty() && line.back() == ',') f.push_back("");
    if (f.size() != 11) throw io::FormatError("report CSV line " + std::to_string(lineno) + ": expected 11 fields");
    RunReport r;
    r.problem = f[0];
    r.dimensional = io::parse_bool("dimensional", f[1]);
    r.formulation = f[2];
    r.k = int(io::parse_int("K", f[3]));
    r.stable = io::parse_bool("stable", f[4]);
    r.t_first_nan = detail::parse_csv_number(f[5]);
    for (int i = 0; i < 4; ++i) r.errors[i] = detail::parse_csv_number(f[6 + i]);
    r.wall_seconds = detail::parse_csv_number(f[10]);
    out.push_back(r);
  }
  return out;
}

/// All report CSVs (header-checked) directly inside `dir`, in file-name order.
inline std::vector<RunReport> read_report_directory(const std::string& dir) {
  namespace fs = std::filesystem;
  if (!fs::is_directory(dir)) throw std::runtime_error("not a directory: " + dir);
  std::vector<fs::path> files;
  for (const auto& e : fs::directory_iterator(dir)) {
    if (e.is_regular_file() && e.path().extension() == ".csv") files.push_back(e.path());
  }
  std::sort(files.begin(), files.end());
  std::vector<RunReport> out;
  for (const auto& p : files) {
    std::ifstream is(p);
    std::string first;
    if (!std::getline(is, first) || io::trim(first) != kReportHeader) continue;
    is.seekg(0);
    auto part = read_reports(is);
    out.insert(out.end(), part.begin(), part.end());
  }
  return out;
}

// ---- summary ------------------------------------------------------------------------

struct FormulationSummary {
  std::string formulation;
  int runs = 0;
  int stable_runs = 0;
  int cells = 0;       // (problem, dimensional, K, variable) cells the formulation took part in
  double wins = 0.0;   // tied winners share a cell's credit equally
  double stable_percent() const { return runs ? 100.0 * stable_runs / runs : 0.0; }
  double lowest_error_percent() const { return cells ? 100.0 * wins / cells : 0.0; }
};

inline constexpr double kTieTolerance = 1e-12;

/// Per formulation: share of runs without NaN, and share of (problem,
/// configuration, K, variable) cells in which it had the lowest error among
/// stable runs. Formulations within a relative 1e-12 of the minimum tie.
inline std::vector<FormulationSummary> summarize(const std::vector<RunReport>& reports) {
  std::map<std::string, FormulationSummary> by_name;
  std::vector<std::string> order;
  for (const auto& r : reports) {
    if (!by_name.count(r.formulation)) {
      order.push_back(r.formulation);
      by_name[r.formulation].formulation = r.formulation;
    }
    auto& s = by_name[r.formulation];
    ++s.runs;
    if (r.stable) ++s.stable_runs;
  }
  using Cell = std::tuple<std::string, bool, int, int>;
  std::map<Cell, std::vector<const RunReport*>> cells;
  for (const auto& r : reports) {
    for (int v = 0; v < 4; ++v) {
      if (std::isnan(r.errors[v])) continue;  // absent component
      cells[{r.problem, r.dimensional, r.k, v}].push_back(&r);
    }
  }
  for (const auto& [cell, runs] : cells) {
    const int v = std::get<3>(cell);
    std::set<std::string> present;
    for (const auto* r : runs) present.insert(r->formulation);
    for (const auto& f : present) ++by_name[f].cells;
    double best = kInf;
    for (const auto* r : runs) {
      if (r->stable && std::isfinite(r->errors[v])) best = std::min(best, r->errors[v]);
    }
    if (!std::isfinite(best)) continue;
    std::set<std::string> winners;
    for (const auto* r : runs) {
      if (r->stable && std::isfinite(r->errors[v]) && r->errors[v] <= best + kTieTolerance * std::abs(best)) {
        winners.insert(r->formulation);
      }
    }
    for (const auto& f : winners) by_name[f].wins += 1.0 / double(winners.size());
  }
  std::vector<FormulationSummary> out;
  for (const auto& name : order) out.push_back(by_name[name]);
  return out;
}

inline void write_summary_csv(std::ostream& os, const std::vector<FormulationSummary>& s) {
  os << "formulation,runs,stable_percent,lowest_error_percent\n";
  for (const auto& f : s) {
    os << f.formulation << ',' << f.runs << ',' << io::format_double(f.stable_percent()) << ','
       << io::format_double(f.lowest_error_percent()) << '\n';
  }
}

inline void write_summary_table(std::ostream& os, const std::vector<FormulationSummary>& s) {
  char buf[128];
  std::snprintf(buf, sizeof buf, "%-16s %6s %10s %14s\n", "formulation", "runs", "% stable", "% lowest err");
  os << buf;
  for (const auto& f : s) {
    std::snprintf(buf, sizeof buf, "%-16s %6d %10.1f %14.1f\n", f.formulation.c_str(), f.runs,
                  f.stable_percent(), f.lowest_error_percent());
    os << buf;
  }
}

// ---- experiment plans ------------------------------------------------------------------

struct ExperimentPlan {
  std::vector<ProblemConfig> configs;  // one or both of the dimensional / non-dimensional pair
  std::vector<Formulation> formulations;
  std::vector<int> ks;
  int window = 0;   // 0: 10 steps in 1D, 2 in 2D
  int steps = -1;   // ROM horizon; -1 runs to the final time
  std::string output = ".";
  bool timing = true;  // false leaves wall_seconds empty so reruns are byte-identical
};

inline int default_window(const ProblemConfig& cfg) { return cfg.dimension() == 1 ? 10 : 2; }

inline std::vector<int> default_ks(ProblemKind kind) {
  if (kind == ProblemKind::Sod) return {10, 20, 30};
  return {10, 25};
}

/// Keys: problem, dimensional (true | false | both), formulations, K, window,
/// steps, output, timing; every other key is forwarded to the problem configuration.
inline ExperimentPlan plan_from_key_values(io::KeyValues kv, const std::string& base_dir = ".") {
  ExperimentPlan plan;
  std::string which = "both";
  if (kv.count("dimensional")) {
    which = kv.at("dimensional");
    kv.erase("dimensional");
  }
  auto take = [&](const char* key) -> std::optional<std::string> {
    auto it = kv.find(key);
    if (it == kv.end()) return std::nullopt;
    std::string v = it->second;
    kv.erase(it);
    return v;
  };
  std::vector<std::string> forms;
  if (auto v = take("formulations")) forms = io::split_list(*v);
  if (auto v = take("K")) {
    for (const auto& s : io::split_list(*v)) plan.ks.push_back(int(io::parse_int("K", s)));
  }
  if (auto v = take("window")) plan.window = int(io::parse_int("window", *v));
  if (auto v = take("steps")) plan.steps = int(io::parse_int("steps", *v));
  if (auto v = take("timing")) plan.timing = io::parse_bool("timing", *v);
  if (auto v = take("output")) {
    std::filesystem::path p(*v);
    plan.output = p.is_absolute() ? p.string() : (std::filesystem::path(base_dir) / p).string();
  }
  std::vector<bool> variants;
  if (which == "both") variants = {false, true};
  else variants = {io::parse_bool("dimensional", which)};
  for (bool dimensional : variants) {
    io::KeyValues c = kv;
    c["dimensional"] = dimensional ? "true" : "false";
    plan.configs.push_back(config_from_key_values(c));
  }
  if (forms.empty()) {
    plan.formulations.assign(kAllFormulations.begin(), kAllFormulations.end());
  } else {
    for (const auto& f : forms) plan.formulations.push_back(parse_formulation(f));
  }
  if (plan.ks.empty()) plan.ks = default_ks(plan.configs.front().problem);
  for (int k : plan.ks) {
    if (k < 1) throw ConfigError("plan: K must be >= 1");
  }
  if (plan.window < 0) throw ConfigError("plan: window must be >= 1");
  return plan;
}

inline ExperimentPlan read_plan(const std::string& path) {
  try {
    const auto dir = std::filesystem::path(path).parent_path();
    return plan_from_key_values(io::read_key_values(path), dir.empty() ? "." : dir.string());
  } catch (const io::FormatError& e) {
    throw ConfigError(path + ": " + e.what());
  }
}

/// Worker count from EULERROM_THREADS (default 1).
inline int thread_count() {
  if (const char* s = std::getenv("EULERROM_THREADS")) {
    const int n = std::atoi(s);
    if (n >= 1) return n;
  }
  return 1;
}

/// Runs `fn(i)` for i in [0, n) on `threads` workers.
template <class F>
void parallel_for(std::size_t n, int threads, F&& fn) {
  if (threads <= 1 || n <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mutex;
  std::vector<std::thread> pool;
  for (int t = 0; t < std::min<int>(threads, int(n)); ++t) {
    pool.emplace_back([&] {
      for (std::size_t i; (i = next.fetch_add(1)) < n;) {
        try {
          fn(i);
        } catch (...) {
          std::lock_guard lock(error_mutex);
          if (!error) error = std::current_exception();
        }
      }
    });
  }
  for (auto& th : pool) th.join();
  if (error) std::rethrow_exception(error);
}

/// Everything a single-configuration experiment needs: FOM data, model and
/// weighted SVDs keyed by (variables, inner product).
class Experiment {
 public:
  explicit Experiment(SnapshotSet fom) : fom_(std::move(fom)), model_(make_full_order_model(fom_.config)) {}

  const SnapshotSet& fom() const { return fom_; }
  const ProblemConfig& config() const { return fom_.config; }
  const FullOrderModel& model() const { return model_; }

  PodBasis basis(VariableSet vars, InnerProductKind kind, int k) {
    std::lock_guard lock(mutex_);
    auto key = std::make_pair(vars, kind);
    auto it = svds_.find(key);
    if (it == svds_.end()) {
      const auto& cfg = fom_.config;
      const WeightOperator w = build_weight(make_inner_product_spec(kind, cfg, fom_.data), cfg);
      const Matrix s = snapshots_in(vars, fom_.data, cfg.dimension(), cfg.gas());
      it = svds_.emplace(key, Entry{weighted_svd(s, w), std::make_shared<WeightOperator>(w)}).first;
    }
    return truncate(it->second.svd, *it->second.weight, k, vars);
  }

  RomSpec spec(Formulation f, int k, int window) {
    const auto t = traits(f);
    return make_rom_spec(f, basis(t.variables, t.basis_kind, k), fom_.config, fom_.data,
                         window > 0 ? window : default_window(fom_.config));
  }

  RomTrajectory run(const RomSpec& spec, int steps = -1) const {
    return run_rom(spec, model_, fom_.data.col(0), steps);
  }

  RunReport report(const RomSpec& spec, const RomTrajectory& traj) const {
    RunReport r;
    r.problem = to_string(fom_.config.problem);
    r.dimensional = fom_.config.dimensional;
    r.formulation = to_string(spec.formulation);
    r.k = int(spec.basis.size());
    r.stable = traj.stable;
    r.t_first_nan = traj.t_first_nan;
    r.errors = error_metrics(traj, spec.basis, fom_);
    r.wall_seconds = traj.wall_seconds;
    return r;
  }

 private:
  struct Entry {
    WeightedSvd svd;
    std::shared_ptr<WeightOperator> weight;
  };
  SnapshotSet fom_;
  FullOrderModel model_;
  std::mutex mutex_;
  std::map<std::pair<VariableSet, InnerProductKind>, Entry> svds_;
};

struct SweepResult {
  std::vector<RunReport> reports;
  struct Consistency {
    Formulation formulation;
    int k;
    double discrepancy;
  };
  std::vector<Consistency> consistency;  // only when both configurations ran
};

inline std::string run_file_stem(const ProblemConfig& cfg) {
  return to_string(cfg.problem) + (cfg.dimensional ? "_dim" : "_nd");
}

/// Runs every (configuration, formulation, K) of the plan and writes
/// report.csv, consistency.csv (for configuration pairs), the snapshot files
/// and one trajectory file per run into plan.output.
inline SweepResult run_sweep(const ExperimentPlan& plan, int threads = thread_count()) {
  namespace fs = std::filesystem;
  fs::create_directories(plan.output);
  std::vector<std::unique_ptr<Experiment>> experiments;
  for (const auto& cfg : plan.configs) {
    experiments.push_back(std::make_unique<Experiment>(run_fom(cfg)));
    save_snapshots((fs::path(plan.output) / (run_file_stem(cfg) + ".ersn")).string(), experiments.back()->fom());
  }
  struct Task {
    std::size_t exp;
    Formulation f;
    int k;
  };
  std::vector<Task> tasks;
  for (std::size_t e = 0; e < experiments.size(); ++e) {
    for (Formulation f : plan.formulations) {
      for (int k : plan.ks) tasks.push_back({e, f, k});
    }
  }
  std::vector<RunReport> reports(tasks.size());
  std::vector<RomTrajectory> trajs(tasks.size());
  std::vector<PodBasis> bases(tasks.size());
  parallel_for(tasks.size(), threads, [&](std::size_t i) {
    auto& ex = *experiments[tasks[i].exp];
    const RomSpec spec = ex.spec(tasks[i].f, tasks[i].k, plan.window);
    trajs[i] = ex.run(spec, plan.steps);
    reports[i] = ex.report(spec, trajs[i]);
    if (!plan.timing) reports[i].wall_seconds = kNaN;
    bases[i] = spec.basis;
    save_trajectory((fs::path(plan.output) / (run_file_stem(ex.config()) + "_" + to_string(tasks[i].f) + "_K" +
                                              std::to_string(tasks[i].k) + ".ertj"))
                        .string(),
                    trajs[i]);
  });
  SweepResult out;
  out.reports = reports;
  write_reports((fs::path(plan.output) / "report.csv").string(), reports);
  if (experiments.size() == 2) {
    const std::size_t per = plan.formulations.size() * plan.ks.size();
    for (std::size_t i = 0; i < per; ++i) {
      const std::size_t j = per + i;
      out.consistency.push_back({tasks[i].f, tasks[i].k,
                                 consistency_check(trajs[j], bases[j], experiments[1]->config(), trajs[i], bases[i],
                                                   experiments[0]->config())});
    }
    std::ofstream os(fs::path(plan.output) / "consistency.csv");
    os << "formulation,K,discrepancy\n";
    for (const auto& c : out.consistency) {
      os << to_string(c.formulation) << ',' << c.k << ',' << detail::csv_number(c.discrepancy) << '\n';
    }
  }
  return out;
}

}  // namespace eulerrom
