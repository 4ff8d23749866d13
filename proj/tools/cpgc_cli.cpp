// Command-line front end: reproduces the reference count tables, evaluates
// the exact completion-time analysis, runs Monte Carlo tolerance sweeps and
// the straggler-aware gradient-descent demo. All outputs are CSV plus a
// manifest that reproduces the run byte-for-byte.

#include <CLI11.hpp>

#include <filesystem>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "cpgc/analysis.hpp"
#include "cpgc/config.hpp"
#include "cpgc/csv.hpp"
#include "cpgc/gd.hpp"
#include "cpgc/reference_tables.hpp"
#include "cpgc/schedule.hpp"
#include "cpgc/simulate.hpp"

namespace fs = std::filesystem;
using namespace cpgc;

namespace {

struct CommonArgs {
  std::string config_path;
  std::string out_dir = "out";
  std::vector<std::string> overrides;
  std::optional<long long> seed;
  std::optional<long long> trials;
  std::optional<long long> threads;
  std::optional<std::string> tolerance_grid;
  bool dump_schedules = false;
};

void add_common_flags(CLI::App* cmd, CommonArgs* args) {
  cmd->add_option("--config", args->config_path, "configuration file (key = value lines)");
  cmd->add_option("--out", args->out_dir, "output directory (created if absent)");
  cmd->add_option("--set", args->overrides, "override a config key (key=value, repeatable)");
  cmd->add_option("--seed", args->seed, "master random seed");
  cmd->add_option("--trials", args->trials, "Monte Carlo trials per grid point");
  cmd->add_option("--threads", args->threads, "worker threads (0 = hardware)");
  cmd->add_option("--tolerance-grid", args->tolerance_grid,
                  "comma-separated tolerance rates");
  cmd->add_flag("--dump-schedule", args->dump_schedules,
                "also write the schedule matrices as JSON");
}

void declare_common(Config& cfg) {
  cfg.declare("mu", "10");
  cfg.declare("alpha", "0.01");
  cfg.declare("seed", "1");
  cfg.declare("threads", "0");
}

// defaults < config file < --set overrides < dedicated flags
void resolve(Config& cfg, const CommonArgs& args) {
  if (!args.config_path.empty()) cfg.load_file(args.config_path);
  for (const std::string& o : args.overrides) cfg.apply_override(o);
  if (args.seed) cfg.set("seed", std::to_string(*args.seed));
  if (args.trials) cfg.set("trials", std::to_string(*args.trials));
  if (args.threads) cfg.set("threads", std::to_string(*args.threads));
  if (args.tolerance_grid) cfg.set("tolerance_grid", *args.tolerance_grid);
}

fs::path prepare_out_dir(const Config& cfg, const CommonArgs& args,
                         const std::string& subcommand) {
  const fs::path dir(args.out_dir);
  fs::create_directories(dir);
  write_file(dir / "manifest.txt", cfg.manifest(subcommand));
  return dir;
}

StragglerParams params_from(const Config& cfg) {
  StragglerParams p{cfg.get_double("mu"), cfg.get_double("alpha")};
  check_params(p);
  return p;
}

MdsPoints points_from(const Config& cfg) {
  const std::string v = cfg.get_string("mcc_points");
  if (v == "linear") return MdsPoints::linear;
  if (v == "pow2") return MdsPoints::pow2;
  throw config_error("config key 'mcc_points' expects linear or pow2, got '" + v + "'");
}

std::vector<Scheme> schemes_from(const Config& cfg) {
  std::vector<Scheme> out;
  for (const std::string& name : cfg.get_string_list("schemes"))
    out.push_back(scheme_from_string(name));
  return out;
}

void maybe_dump_schedules(const fs::path& dir, bool enabled, const std::vector<Scheme>& schemes,
                          int blocks, int workers, int load, MdsPoints points) {
  if (!enabled) return;
  for (Scheme s : schemes)
    write_file(dir / ("schedule_" + to_string(s) + ".json"),
               dump_schedule_json(build_schedule(s, blocks, workers, load, points)));
}

// ---------------------------------------------------------------------------

int cmd_tables(const CommonArgs& args) {
  Config cfg;
  declare_common(cfg);
  cfg.declare("mcc_points", "pow2");
  resolve(cfg, args);
  const fs::path dir = prepare_out_dir(cfg, args, "tables");

  const auto mcc = build_mcc(4, 4, 2, points_from(cfg));
  const auto uc = build_uc_mmc(4, 4, 2);
  const auto cp = build_cpgc(4, 4, 2);

  int mismatches = 0;
  std::ostringstream diff;
  auto emit = [&](const std::string& file, int threshold,
                  const std::vector<ReferenceTypeRow>& reference) {
    const auto tm = count_recoverable_by_type(mcc, Delivery::bundled, threshold);
    const auto tu = count_recoverable_by_type(uc, Delivery::multi_message, threshold);
    const auto tc = count_recoverable_by_type(cp, Delivery::multi_message, threshold);
    std::ostringstream os;
    os << "label,N2,N1,N0,mcc,uc-mmc,cpgc\n";
    diff << file << " (threshold " << threshold << "):\n";
    for (const auto& row : reference) {
      const CumulativeType type{{row.n0, row.n1, row.n2}};
      const long long m = tm.at(type), u = tu.at(type), c = tc.at(type);
      os << row.label << "," << row.n2 << "," << row.n1 << "," << row.n0 << "," << m << ","
         << u << "," << c << "\n";
      const bool ok = m == row.mcc && u == row.uc_mmc && c == row.cpgc;
      if (!ok) ++mismatches;
      diff << "  " << row.label << ": " << (ok ? "ok" : "MISMATCH") << " enumerated (" << m
           << "," << u << "," << c << ") reference (" << row.mcc << "," << row.uc_mmc << ","
           << row.cpgc << ")\n";
    }
    write_file(dir / file, os.str());
  };
  emit("table1.csv", 4, reference_table_full());
  emit("table2.csv", 3, reference_table_partial());
  diff << "note: the reference labels row N9 of the full-recovery table as "
          "(N2=0,N1=4,N0=1), which sums to 5 workers of 4; its count is carried by the "
          "consistent type (N2=0,N1=4,N0=0) and compared as such.\n";
  diff << "mismatches: " << mismatches << "\n";
  write_file(dir / "tables_diff.txt", diff.str());
  std::cout << "tables: " << mismatches << " mismatches -> " << dir.string() << "\n";
  return mismatches == 0 ? 0 : 1;
}

// ---------------------------------------------------------------------------

int cmd_analyze(const CommonArgs& args) {
  Config cfg;
  declare_common(cfg);
  cfg.declare("schemes", "mcc,uc-mmc,cpgc");
  cfg.declare("blocks", "4");
  cfg.declare("workers", "4");
  cfg.declare("load", "2");
  cfg.declare("mcc_points", "pow2");
  cfg.declare("m_prime", "-1");  // -1: full recovery
  cfg.declare("thresholds", "4,3");
  cfg.declare("t_points", "200");
  cfg.declare("t_max", "0");  // 0: extend until every cdf reaches 1
  resolve(cfg, args);
  const fs::path dir = prepare_out_dir(cfg, args, "analyze");

  const auto params = params_from(cfg);
  const int blocks = static_cast<int>(cfg.get_int("blocks"));
  const int workers = static_cast<int>(cfg.get_int("workers"));
  const int load = static_cast<int>(cfg.get_int("load"));
  const auto schemes = schemes_from(cfg);
  const auto points = points_from(cfg);
  int m_prime = static_cast<int>(cfg.get_int("m_prime"));
  if (m_prime < 0) m_prime = blocks;

  std::vector<std::pair<Scheme, TypeCountTable>> tables;
  for (Scheme s : schemes) {
    const auto S = build_schedule(s, blocks, workers, load, points);
    tables.push_back({s, count_recoverable_by_type(S, default_delivery(s), m_prime)});
  }

  double t_max = cfg.get_double("t_max");
  if (t_max <= 0.0) {
    t_max = load * params.alpha + 1.0 / params.mu;
    for (const auto& [s, table] : tables)
      while (completion_cdf(table, t_max, params) < 1.0 - 1e-6) t_max *= 2.0;
  }
  const int t_points = static_cast<int>(cfg.get_int("t_points"));
  if (t_points < 2) throw config_error("config key 't_points' expects an integer >= 2");

  for (const auto& [s, table] : tables) {
    std::ostringstream os;
    os << "t,cdf\n";
    for (int i = 0; i < t_points; ++i) {
      const double t = t_max * i / (t_points - 1);
      os << format_number(t) << "," << format_number(completion_cdf(table, t, params)) << "\n";
    }
    write_file(dir / ("cdf_" + to_string(s) + ".csv"), os.str());
  }

  std::vector<long long> thresholds;
  for (double v : cfg.get_double_list("thresholds"))
    thresholds.push_back(static_cast<long long>(v));
  std::ostringstream et;
  et << "scheme,m_prime,expected_T\n";
  for (const long long threshold : thresholds) {
    for (Scheme s : schemes) {
      const auto S = build_schedule(s, blocks, workers, load, points);
      const double e = expected_completion_time(S, default_delivery(s),
                                                static_cast<int>(threshold), params);
      et << to_string(s) << "," << threshold << "," << format_number(e) << "\n";
    }
  }
  write_file(dir / "etimes.csv", et.str());
  maybe_dump_schedules(dir, args.dump_schedules, schemes, blocks, workers, load, points);
  std::cout << "analyze: cdf curves and expected times -> " << dir.string() << "\n";
  return 0;
}

// ---------------------------------------------------------------------------

int cmd_simulate(const CommonArgs& args) {
  Config cfg;
  declare_common(cfg);
  cfg.declare("schemes", "mcc,uc-mmc,cpgc");
  cfg.declare("blocks", "20");
  cfg.declare("workers", "20");
  cfg.declare("load", "3");
  cfg.declare("mcc_points", "linear");
  cfg.declare("tolerance_grid", "0,0.05,0.1,0.15");
  cfg.declare("trials", "10000");
  cfg.declare("trace", "0");
  resolve(cfg, args);
  const fs::path dir = prepare_out_dir(cfg, args, "simulate");

  SimConfig base;
  base.num_blocks = static_cast<int>(cfg.get_int("blocks"));
  base.num_workers = static_cast<int>(cfg.get_int("workers"));
  base.load = static_cast<int>(cfg.get_int("load"));
  base.params = params_from(cfg);
  base.trials = cfg.get_int("trials");
  base.master_seed = static_cast<std::uint64_t>(cfg.get_int("seed"));
  base.points = points_from(cfg);
  base.threads = static_cast<int>(cfg.get_int("threads"));
  const auto schemes = schemes_from(cfg);
  const auto grid = cfg.get_double_list("tolerance_grid");
  const bool trace = cfg.get_int("trace") != 0;

  std::ostringstream sweep;
  sweep << "scheme,tolerance,mean_T,ci_T,mean_load,ci_load,mean_volume,ci_volume\n";
  std::ostringstream mt, ml, mv;
  for (auto* os : {&mt, &ml, &mv}) *os << "scheme,tolerance,mean,ci95\n";

  for (Scheme s : schemes) {
    SimConfig c = SimConfig::for_scheme(s, base);
    for (double tol : grid) {
      c.tolerance_rate = tol;
      std::vector<IterationOutcome> outcomes;
      const Aggregate agg = run_experiment(c, trace ? &outcomes : nullptr);
      const std::string head = to_string(s) + "," + format_number(tol) + ",";
      sweep << head << format_number(agg.mean_time) << "," << format_number(agg.ci_time) << ","
            << format_number(agg.mean_messages) << "," << format_number(agg.ci_messages) << ","
            << format_number(agg.mean_volume) << "," << format_number(agg.ci_volume) << "\n";
      mt << head << format_number(agg.mean_time) << "," << format_number(agg.ci_time) << "\n";
      ml << head << format_number(agg.mean_messages) << "," << format_number(agg.ci_messages)
         << "\n";
      mv << head << format_number(agg.mean_volume) << "," << format_number(agg.ci_volume)
         << "\n";
      if (trace) {
        std::ostringstream ts;
        ts << "trial,T,load,volume,recovered\n";
        for (std::size_t i = 0; i < outcomes.size(); ++i)
          ts << i << "," << format_number(outcomes[i].completion_time) << ","
             << outcomes[i].messages << "," << format_number(outcomes[i].volume) << ","
             << outcomes[i].recovered << "\n";
        write_file(dir / ("trace_" + to_string(s) + "_" + format_number(tol) + ".csv"),
                   ts.str());
      }
    }
  }
  write_file(dir / "sweep.csv", sweep.str());
  write_file(dir / "metric_time.csv", mt.str());
  write_file(dir / "metric_load.csv", ml.str());
  write_file(dir / "metric_volume.csv", mv.str());
  maybe_dump_schedules(dir, args.dump_schedules, schemes, base.num_blocks, base.num_workers,
                       base.load, base.points);
  std::cout << "simulate: " << schemes.size() * grid.size() << " grid points, " << base.trials
            << " trials each -> " << dir.string() << "\n";
  return 0;
}

// ---------------------------------------------------------------------------

int cmd_gd(const CommonArgs& args) {
  Config cfg;
  declare_common(cfg);
  cfg.declare("scheme", "cpgc");
  cfg.declare("blocks", "20");
  cfg.declare("workers", "20");
  cfg.declare("load", "3");
  cfg.declare("mcc_points", "linear");
  cfg.declare("tolerance", "0.05");
  cfg.declare("iterations", "50");
  cfg.declare("dim", "40");
  cfg.declare("samples", "200");
  cfg.declare("noise", "0.01");
  cfg.declare("eta", "0");  // 0: 1 / power-iteration estimate of lambda_max
  resolve(cfg, args);
  const fs::path dir = prepare_out_dir(cfg, args, "gd");

  const int blocks = static_cast<int>(cfg.get_int("blocks"));
  const int dim = static_cast<int>(cfg.get_int("dim"));
  if (dim % blocks != 0)
    throw config_error("config key 'dim' must be a multiple of 'blocks', got " +
                       std::to_string(dim) + " over " + std::to_string(blocks));
  const auto problem =
      make_synthetic_problem(static_cast<int>(cfg.get_int("samples")), dim, blocks,
                             cfg.get_double("noise"),
                             static_cast<std::uint64_t>(cfg.get_int("seed")));
  GDRunConfig run;
  run.scheme = scheme_from_string(cfg.get_string("scheme"));
  run.mode = default_delivery(run.scheme);
  run.params = params_from(cfg);
  run.tolerance_rate = cfg.get_double("tolerance");
  run.master_seed = static_cast<std::uint64_t>(cfg.get_int("seed"));
  run.points = points_from(cfg);
  const int iterations = static_cast<int>(cfg.get_int("iterations"));
  const double eta = cfg.get_double("eta");

  const auto result = run_gd(problem, run, static_cast<int>(cfg.get_int("workers")),
                             static_cast<int>(cfg.get_int("load")), iterations, eta);
  std::ostringstream os;
  os << "iter,loss,T,recovered_blocks\n";
  for (std::size_t i = 0; i < result.iterations.size(); ++i) {
    const auto& rec = result.iterations[i];
    os << i << "," << format_number(rec.loss) << "," << format_number(rec.completion_time)
       << "," << rec.recovered << "\n";
  }
  write_file(dir / "gd_run.csv", os.str());

  const auto reference = centralized_gd(problem, iterations, eta);
  std::ostringstream ref;
  ref << "iter,loss\n";
  for (std::size_t i = 0; i < reference.loss_history.size(); ++i)
    ref << i << "," << format_number(reference.loss_history[i]) << "\n";
  write_file(dir / "gd_centralized.csv", ref.str());
  maybe_dump_schedules(dir, args.dump_schedules, {run.scheme}, blocks,
                       static_cast<int>(cfg.get_int("workers")),
                       static_cast<int>(cfg.get_int("load")), run.points);
  std::cout << "gd: " << iterations << " iterations, final loss "
            << format_number(result.state.loss_history.back()) << " -> " << dir.string()
            << "\n";
  return 0;
}

// ---------------------------------------------------------------------------

int cmd_dump_schedule(const std::string& scheme, int blocks, int workers, int load,
                      const std::string& points, const std::string& out_path) {
  if (points != "pow2" && points != "linear")
    throw config_error("points must be linear or pow2, got '" + points + "'");
  const MdsPoints mp = points == "pow2" ? MdsPoints::pow2 : MdsPoints::linear;
  const auto S = build_schedule(scheme_from_string(scheme), blocks, workers, load, mp);
  const std::string json = dump_schedule_json(S);
  if (out_path.empty()) {
    std::cout << json;
  } else {
    write_file(out_path, json);
    std::cout << "schedule -> " << out_path << "\n";
  }
  const auto report = validate_schedule(S);
  for (const auto& f : report.findings)
    std::cerr << (f.severity == Severity::violation ? "violation: " : "warning: ") << f.message
              << "\n";
  return report.has_violations() ? 1 : 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{
      "Straggler-tolerant distributed gradient computation: scheduling, exact "
      "recoverability analysis, Monte Carlo experiments and a GD demo"};
  app.require_subcommand(1);

  CommonArgs tables_args, analyze_args, simulate_args, gd_args;
  auto* tables = app.add_subcommand("tables", "reproduce the 4-worker recoverability tables");
  add_common_flags(tables, &tables_args);
  auto* analyze = app.add_subcommand("analyze", "exact completion-time cdf and E[T]");
  add_common_flags(analyze, &analyze_args);
  auto* simulate = app.add_subcommand("simulate", "Monte Carlo tolerance sweep");
  add_common_flags(simulate, &simulate_args);
  auto* gd = app.add_subcommand("gd", "partial-gradient descent demo");
  add_common_flags(gd, &gd_args);

  std::string ds_scheme = "cpgc", ds_points = "linear", ds_out;
  int ds_blocks = 20, ds_workers = 20, ds_load = 3;
  auto* dump = app.add_subcommand("dump-schedule", "print a schedule matrix as JSON");
  dump->add_option("--scheme", ds_scheme, "mcc, uc-mmc or cpgc");
  dump->add_option("--blocks", ds_blocks, "number of blocks M");
  dump->add_option("--workers", ds_workers, "number of workers K");
  dump->add_option("--load", ds_load, "computation load r");
  dump->add_option("--points", ds_points, "mcc evaluation points: linear or pow2");
  dump->add_option("--out", ds_out, "write to this file instead of stdout");

  CLI11_PARSE(app, argc, argv);

  try {
    if (tables->parsed()) return cmd_tables(tables_args);
    if (analyze->parsed()) return cmd_analyze(analyze_args);
    if (simulate->parsed()) return cmd_simulate(simulate_args);
    if (gd->parsed()) return cmd_gd(gd_args);
    if (dump->parsed())
      return cmd_dump_schedule(ds_scheme, ds_blocks, ds_workers, ds_load, ds_points, ds_out);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
