#include "scwave/cli.hpp"

#include "scwave/code_graph.hpp"
#include "scwave/decoder.hpp"
#include "scwave/density_evolution.hpp"
#include "scwave/ensemble.hpp"
#include "scwave/fixtures.hpp"
#include "scwave/io.hpp"
#include "scwave/optimizer.hpp"
#include "scwave/parallel.hpp"
#include "scwave/wave.hpp"

#include <CLI11.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <optional>
#include <ostream>
#include <random>

namespace scwave {

namespace {

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Logger {
  std::ostream* err = nullptr;
  bool quiet = false;

  void info(const std::string& msg) const {
    if (!quiet) *err << "scwave: " << msg << '\n';
  }
};

std::vector<double> grid_arg(const std::string& s, const char* flag) {
  try {
    return parse_grid(s);
  } catch (const std::invalid_argument& e) {
    throw UsageError(std::string(flag) + ": " + e.what());
  }
}

std::vector<int> int_list_arg(const std::string& s, const char* flag) {
  try {
    return parse_int_list(s);
  } catch (const std::invalid_argument& e) {
    throw UsageError(std::string(flag) + ": " + e.what());
  }
}

EnsembleSpec load_spec(const std::string& path, Usage usage) {
  return make_spec(read_ensemble(path), usage);
}

std::uint64_t resolve_seed(const std::optional<std::uint64_t>& given, bool& generated) {
  generated = !given.has_value();
  if (given) return *given;
  std::random_device rd;
  return (static_cast<std::uint64_t>(rd()) << 32) ^ rd();
}

std::string fixed(double v, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

void write_with_manifest(const std::string& path, const std::string& contents, const RunManifest& m) {
  write_file_atomic(path, contents);
  write_file_atomic(manifest_path(path), m.to_json().dump(2) + "\n");
}

// rate ----------------------------------------------------------------------

struct RateOpts {
  std::string ensemble;
  bool as_json = false;
};

int run_rate(const RateOpts& o, std::ostream& out) {
  const auto spec = load_spec(o.ensemble, Usage::asymptotic);
  const auto r = design_rate(spec);
  if (o.as_json) {
    json j{{"delta", r.delta}, {"design_rate", r.design_rate}, {"asymptotic_rate", r.asymptotic_rate}};
    out << j.dump(2) << '\n';
  } else {
    out << fixed(r.design_rate, 5) << '\n';
  }
  return kExitOk;
}

// de ------------------------------------------------------------------------

struct DeOpts {
  std::string ensemble;
  double epsilon = 0.0;
  int max_iters = kDefaultMaxIters;
  std::string dump_profiles;
};

int run_de(const DeOpts& o, std::ostream& out) {
  const auto spec = load_spec(o.ensemble, Usage::asymptotic);
  const bool dump = !o.dump_profiles.empty();
  const auto rep = de_run(spec, o.epsilon, o.max_iters, dump ? HistoryPolicy::full : HistoryPolicy::none);
  json j{{"epsilon", o.epsilon},
         {"converged", rep.converged},
         {"iterations", rep.iterations_used},
         {"max_x", rep.final_profile.x.size() ? rep.final_profile.x.maxCoeff() : 0.0}};
  if (dump) {
    RunManifest m;
    m.subcommand = "de";
    m.config = {{"ensemble", to_json(spec.config())}, {"epsilon", o.epsilon}, {"max_iters", o.max_iters}};
    write_with_manifest(o.dump_profiles, profiles_csv(rep.profiles), m);
  }
  out << j.dump(2) << '\n';
  return kExitOk;
}

// threshold -------------------------------------------------------------------

struct ThresholdOpts {
  std::string ensemble;
  double tol = 1e-5;
  int max_iters = kDefaultMaxIters;
};

int run_threshold(const ThresholdOpts& o, std::ostream& out) {
  if (!(o.tol > 0.0)) throw UsageError("--tol must be positive");
  const auto spec = load_spec(o.ensemble, Usage::asymptotic);
  const double th = bp_threshold(spec, o.tol, o.max_iters);
  const int digits = std::clamp(static_cast<int>(std::ceil(-std::log10(o.tol))) + 1, 1, 17);
  out << fixed(th, digits) << '\n';
  return kExitOk;
}

// speed -----------------------------------------------------------------------

struct SpeedOpts {
  std::string ensemble;
  std::string grid;
  std::string method = "t20";
  std::string out;
  int w = 0;
  std::string dv = "3,4";
  int dc_ratio = 2;
  int L = 100;
  int D = 20;
  std::string optimized;
  int max_iters = kDefaultMaxIters;
};

struct SpeedSeries {
  std::string name;
  EnsembleSpec spec;
};

int run_speed(const SpeedOpts& o, std::ostream& out, const Logger& log) {
  const auto grid = grid_arg(o.grid, "--epsilon-grid");
  SpeedMethod method;
  if (o.method == "t20")
    method = SpeedMethod::wavefront;
  else if (o.method == "td")
    method = SpeedMethod::displacement;
  else
    throw UsageError("--method must be td or t20");

  std::vector<SpeedSeries> series;
  if (!o.ensemble.empty()) {
    const auto spec = load_spec(o.ensemble, Usage::asymptotic);
    const std::string kind = spec.profile.is_uniform() ? "uniform" : "profile";
    series.push_back({kind + "_dv" + std::to_string(spec.dv), spec});
  } else {
    if (o.w < 1) throw UsageError("speed needs --ensemble or --w");
    for (int dv : int_list_arg(o.dv, "--dv")) {
      EnsembleConfig c;
      c.dv = dv;
      c.dc = o.dc_ratio * dv;
      c.L = o.L;
      c.nu = std::vector<double>(static_cast<std::size_t>(o.w), 1.0 / o.w);
      series.push_back({"uniform_dv" + std::to_string(dv), make_spec(c)});
    }
  }
  if (!o.optimized.empty()) {
    const auto j = json::parse(read_file(o.optimized));
    EnsembleConfig c;
    c.dv = j.at("dv").get<int>();
    c.dc = j.at("dc").get<int>();
    c.L = o.L;
    c.nu = j.at("nu").get<std::vector<double>>();
    series.push_back({"optimized_dv" + std::to_string(c.dv), make_spec(c)});
  }

  const std::size_t n = series.size() * grid.size();
  std::vector<SpeedRow> rows(n);
  log.info("speed: " + std::to_string(n) + " evaluations on " + std::to_string(worker_threads()) + " threads");
  parallel_for(n, [&](std::size_t k) {
    const auto& s = series[k / grid.size()];
    const double eps = grid[k % grid.size()];
    const SpeedEstimate e = method == SpeedMethod::wavefront ? speed_wavefront(s.spec, eps, 20, o.max_iters)
                                                             : speed_displacement(s.spec, eps, o.D, o.max_iters);
    SpeedRow& r = rows[k];
    r.series = s.name;
    r.epsilon = eps;
    r.dv = s.spec.dv;
    r.dc = s.spec.dc;
    r.w = s.spec.coupling_width();
    r.speed = e.v;
    r.iterations = e.iterations;
    r.feasible = e.feasible;
  });

  const std::string csv = speed_csv(rows);
  if (o.out.empty()) {
    out << csv;
    return kExitOk;
  }
  RunManifest m;
  m.subcommand = "speed";
  m.config = {{"epsilon_grid", o.grid}, {"method", o.method}, {"D", o.D}, {"max_iters", o.max_iters}};
  json specs = json::array();
  for (const auto& s : series) specs.push_back({{"series", s.name}, {"ensemble", to_json(s.spec.config())}});
  m.config["series"] = specs;
  write_with_manifest(o.out, csv, m);
  json companion = speed_series_json(rows);
  companion["manifest"] = m.to_json();
  write_file_atomic(o.out + ".series.json", companion.dump(2) + "\n");
  log.info("wrote " + o.out);
  return kExitOk;
}

// optimize --------------------------------------------------------------------

struct OptimizeOpts {
  int w = 3;
  double epsilon = 0.46;
  std::string dv = "3..10";
  std::string cost = "c2";
  int generations = 1000;
  int population_multiplier = 100;
  double crossover = 0.33;
  std::optional<std::uint64_t> seed;
  int L = 100;
  int max_iters = kDefaultMaxIters;
  std::string out;
  std::string trace;
};

int run_optimize(const OptimizeOpts& o, std::ostream& out, const Logger& log) {
  OptimizerConfig cfg;
  cfg.w = o.w;
  cfg.epsilon = o.epsilon;
  cfg.dv_set = int_list_arg(o.dv, "--dv");
  try {
    cfg.cost_kind = parse_cost_kind(o.cost);
  } catch (const std::invalid_argument& e) {
    throw UsageError(std::string("--cost: ") + e.what());
  }
  cfg.generations = o.generations;
  cfg.population_multiplier = o.population_multiplier;
  cfg.crossover_prob = o.crossover;
  cfg.L = o.L;
  cfg.max_iters = o.max_iters;
  bool generated = false;
  cfg.seed = resolve_seed(o.seed, generated);
  if (generated) log.info("no --seed given, using " + std::to_string(cfg.seed));
  cfg.validate();

  const int every = std::max(1, cfg.generations / 10);
  const auto report = optimize_over_degrees(cfg, [&](int dv, const OptimizerState& s) {
    if (s.generation % every == 0)
      log.info("dv=" + std::to_string(dv) + " generation " + std::to_string(s.generation) +
               " best cost " + format_double(s.best_cost));
  });
  const auto& best = report.best();

  RunManifest m;
  m.subcommand = "optimize";
  m.seed = cfg.seed;
  m.seed_generated = generated;
  m.config = {{"w", cfg.w},
              {"epsilon", cfg.epsilon},
              {"dv", cfg.dv_set},
              {"dc_ratio", cfg.dc_ratio},
              {"cost", std::string(to_string(cfg.cost_kind))},
              {"generations", cfg.generations},
              {"population_multiplier", cfg.population_multiplier},
              {"crossover_prob", cfg.crossover_prob},
              {"L", cfg.L},
              {"max_iters", cfg.max_iters}};

  json j = to_json(best, cfg.epsilon);
  j["seed"] = cfg.seed;
  json per = json::array();
  for (const auto& r : report.per_degree) {
    json e = to_json(r, cfg.epsilon);
    if (!r.note.empty()) e["note"] = r.note;
    per.push_back(e);
  }
  j["per_degree"] = per;
  j["manifest"] = m.to_json();

  std::string trace_path = o.trace;
  if (trace_path.empty()) {
    std::filesystem::path p(o.out);
    p.replace_extension(".trace.csv");
    trace_path = p.string();
  }
  write_file_atomic(o.out, j.dump(2) + "\n");
  write_with_manifest(trace_path, trace_csv(best.trace), m);
  out << j.dump(2) << '\n';
  return kExitOk;
}

// construct -------------------------------------------------------------------

struct ConstructOpts {
  std::string ensemble;
  std::optional<std::uint64_t> seed;
  std::string out;
  bool stats = false;
};

int run_construct(const ConstructOpts& o, std::ostream& out, const Logger& log) {
  const auto spec = load_spec(o.ensemble, Usage::finite_length);
  bool generated = false;
  const auto seed = resolve_seed(o.seed, generated);
  if (generated) log.info("no --seed given, using " + std::to_string(seed));
  const auto graph = sample_code(spec, seed);
  const std::size_t collapsed = export_alist(graph, o.out);

  json stats{{"variables", graph.num_variables()},
             {"checks", graph.num_checks()},
             {"edges", graph.num_edges()},
             {"multi_edges", graph.multi_edge_count()},
             {"collapsed_in_alist", collapsed},
             {"design_rate", design_rate(spec).design_rate},
             {"realized_rate", realized_rate(graph)}};
  const auto counts = edge_type_counts(graph);
  std::vector<std::int64_t> totals(static_cast<std::size_t>(spec.coupling_width()), 0);
  for (const auto& row : counts)
    for (std::size_t i = 0; i < row.size(); ++i) totals[i] += row[i];
  json freq = json::array();
  for (std::size_t i = 0; i < totals.size(); ++i)
    freq.push_back({{"offset", i},
                    {"expected", spec.profile[static_cast<int>(i)]},
                    {"observed", static_cast<double>(totals[i]) / static_cast<double>(graph.num_edges())}});
  stats["offset_frequencies"] = freq;

  RunManifest m;
  m.subcommand = "construct";
  m.seed = seed;
  m.seed_generated = generated;
  m.config = {{"ensemble", to_json(spec.config())}};
  json mj = m.to_json();
  mj["stats"] = stats;
  write_file_atomic(manifest_path(o.out), mj.dump(2) + "\n");
  if (o.stats) out << stats.dump(2) << '\n';
  log.info("wrote " + o.out);
  return kExitOk;
}

// simulate --------------------------------------------------------------------

struct SimulateOpts {
  std::string ensemble;
  std::string channel = "bec";
  std::string grid;
  std::string setup = "A";
  std::uint64_t frames = 2000;
  std::uint64_t min_frames = 1;
  std::uint64_t target_errors = 100;
  int realizations = 1;
  std::optional<std::uint64_t> seed;
  std::string out;
};

int run_simulate(const SimulateOpts& o, std::ostream& out, const Logger& log) {
  const auto spec = load_spec(o.ensemble, Usage::finite_length);
  ChannelKind kind;
  if (o.channel == "bec")
    kind = ChannelKind::bec;
  else if (o.channel == "awgn" || o.channel == "biawgn")
    kind = ChannelKind::biawgn;
  else
    throw UsageError("--channel must be bec or awgn");
  const auto grid = grid_arg(o.grid, "--grid");
  DecoderSetup setup;
  try {
    setup = DecoderSetup::parse(o.setup, spec.coupling_width());
  } catch (const std::invalid_argument& e) {
    throw UsageError(std::string("--setup: ") + e.what());
  }

  SimConfig cfg;
  cfg.max_frames = o.frames;
  cfg.min_frames = o.min_frames;
  cfg.target_frame_errors = o.target_errors;
  cfg.code_realizations = o.realizations;
  bool generated = false;
  cfg.seed = resolve_seed(o.seed, generated);
  if (generated) log.info("no --seed given, using " + std::to_string(cfg.seed));

  log.info("simulate: " + std::to_string(grid.size()) + " grid points, window " + std::to_string(setup.window) +
           ", " + std::to_string(setup.iterations) + " iterations per position");
  const auto report = run_sweep(spec, kind, grid, setup, cfg);
  const std::string csv = sim_csv(report);
  if (o.out.empty()) {
    out << csv;
    return kExitOk;
  }
  RunManifest m;
  m.subcommand = "simulate";
  m.seed = cfg.seed;
  m.seed_generated = generated;
  m.config = {{"ensemble", to_json(spec.config())},
              {"channel", o.channel},
              {"grid", o.grid},
              {"setup", {{"label", setup.label}, {"window", setup.window}, {"iterations", setup.iterations}}},
              {"max_frames", cfg.max_frames},
              {"min_frames", cfg.min_frames},
              {"target_frame_errors", cfg.target_frame_errors},
              {"code_realizations", cfg.code_realizations}};
  write_with_manifest(o.out, csv, m);
  log.info("wrote " + o.out);
  return kExitOk;
}

// fixtures --------------------------------------------------------------------

struct FixturesOpts {
  std::string table;
  bool check = false;
  bool list = false;
  std::string emit_dir;
  int L = 100;
  int M = 8000;
};

int run_fixtures(const FixturesOpts& o, std::ostream& out, const Logger& log) {
  const auto table = o.table.empty() ? FixtureTable::load() : FixtureTable::load(o.table);
  if (!o.check && !o.list && o.emit_dir.empty()) throw UsageError("fixtures needs --check, --list or --emit-dir");
  int status = kExitOk;
  if (o.list) {
    for (const auto& r : table.rows) {
      out << r.label << " w=" << r.w << " dv=" << r.dv << " nu=";
      for (std::size_t i = 0; i < r.nu.size(); ++i) out << (i ? "," : "") << format_double(r.nu[i]);
      if (r.epsilon) out << " epsilon=" << format_double(*r.epsilon);
      out << " rate=" << fixed(r.rate, 5) << '\n';
    }
  }
  if (o.check) {
    int bad = 0;
    for (const auto& c : check_fixture_rates(table)) {
      out << (c.ok ? "ok   " : "FAIL ") << c.label << " expected " << fixed(c.expected, 5) << " computed "
          << fixed(c.computed, 5);
      if (!c.problem.empty()) out << " (" << c.problem << ")";
      out << '\n';
      bad += !c.ok;
    }
    out << table.rows.size() - static_cast<std::size_t>(bad) << "/" << table.rows.size() << " rates match\n";
    if (bad) status = kExitDomainError;
  }
  if (!o.emit_dir.empty()) {
    std::filesystem::create_directories(o.emit_dir);
    for (const auto& r : table.rows) {
      const auto path = std::filesystem::path(o.emit_dir) / (r.label + ".json");
      write_file_atomic(path, to_json(fixture_config(r, o.L, o.M)).dump(2) + "\n");
    }
    log.info("wrote " + std::to_string(table.rows.size()) + " ensembles to " + o.emit_dir);
  }
  return status;
}

}  // namespace

int cmd_dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Non-uniformly coupled SC-LDPC ensembles: density evolution, wave speed, profile optimization and windowed decoding"};
  app.name("scwave");
  app.require_subcommand(1);
  app.set_version_flag("--version", SCWAVE_VERSION);

  int threads = 0;
  bool quiet = false;
  app.add_option("--threads", threads, "Worker threads (default: SCWAVE_THREADS or hardware)")->check(CLI::NonNegativeNumber);
  app.add_flag("-q,--quiet", quiet, "No progress messages");
  app.fallthrough();

  RateOpts rate;
  auto* c_rate = app.add_subcommand("rate", "Design rate including the termination loss");
  c_rate->add_option("--ensemble", rate.ensemble, "Ensemble JSON")->required()->check(CLI::ExistingFile);
  c_rate->add_flag("--json", rate.as_json, "Print delta, design and asymptotic rate as JSON");

  DeOpts de;
  auto* c_de = app.add_subcommand("de", "Run density evolution on the BEC");
  c_de->add_option("--ensemble", de.ensemble, "Ensemble JSON")->required()->check(CLI::ExistingFile);
  c_de->add_option("--epsilon", de.epsilon, "Erasure probability")->required()->check(CLI::Range(0.0, 1.0));
  c_de->add_option("--max-iters", de.max_iters, "Iteration cap")->check(CLI::PositiveNumber);
  c_de->add_option("--dump-profiles", de.dump_profiles, "Write every profile as CSV (t, z, x)");

  ThresholdOpts th;
  auto* c_th = app.add_subcommand("threshold", "BP threshold by bisection");
  c_th->add_option("--ensemble", th.ensemble, "Ensemble JSON")->required()->check(CLI::ExistingFile);
  c_th->add_option("--tol", th.tol, "Bracket width");
  c_th->add_option("--max-iters", th.max_iters, "Iteration cap per DE run")->check(CLI::PositiveNumber);

  SpeedOpts sp;
  auto* c_sp = app.add_subcommand("speed", "Wave speed over an epsilon grid");
  c_sp->add_option("--ensemble", sp.ensemble, "Ensemble JSON (one series)")->check(CLI::ExistingFile);
  c_sp->add_option("--epsilon-grid", sp.grid, "a:b:step")->required();
  c_sp->add_option("--method", sp.method, "td (displacement) or t20 (wavefront)");
  c_sp->add_option("--out", sp.out, "CSV output (stdout if omitted)");
  c_sp->add_option("--w", sp.w, "Uniform curves: coupling width");
  c_sp->add_option("--dv", sp.dv, "Uniform curves: VN degrees, e.g. 3..5 or 3,4");
  c_sp->add_option("--dc-ratio", sp.dc_ratio, "dc = ratio * dv")->check(CLI::PositiveNumber);
  c_sp->add_option("--L", sp.L, "Chain length for uniform curves")->check(CLI::PositiveNumber);
  c_sp->add_option("-D,--displacement", sp.D, "Displacement for --method td")->check(CLI::PositiveNumber);
  c_sp->add_option("--optimized", sp.optimized, "Add the profile from an optimize output JSON")
      ->check(CLI::ExistingFile);
  c_sp->add_option("--max-iters", sp.max_iters, "Iteration cap")->check(CLI::PositiveNumber);

  OptimizeOpts op;
  std::uint64_t op_seed = 0;
  auto* c_op = app.add_subcommand("optimize", "Differential evolution over smoothing profiles");
  c_op->add_option("--w", op.w, "Coupling width")->check(CLI::Range(2, 64));
  c_op->add_option("--epsilon", op.epsilon, "Design erasure probability")->check(CLI::Range(0.0, 1.0));
  c_op->add_option("--dv", op.dv, "VN degrees, e.g. 3..10");
  c_op->add_option("--cost", op.cost, "c1 or c2");
  c_op->add_option("--generations", op.generations)->check(CLI::NonNegativeNumber);
  c_op->add_option("--population-multiplier", op.population_multiplier, "N_P = k (w - 1)")
      ->check(CLI::PositiveNumber);
  c_op->add_option("--crossover", op.crossover, "Crossover probability")->check(CLI::Range(0.0, 1.0));
  auto* op_seed_opt = c_op->add_option("--seed", op_seed, "RNG seed");
  c_op->add_option("--L", op.L, "Chain length used by the cost")->check(CLI::PositiveNumber);
  c_op->add_option("--max-iters", op.max_iters)->check(CLI::PositiveNumber);
  c_op->add_option("--out", op.out, "Result JSON")->required();
  c_op->add_option("--trace", op.trace, "Per-generation trace CSV (default: <out>.trace.csv)");

  ConstructOpts co;
  std::uint64_t co_seed = 0;
  auto* c_co = app.add_subcommand("construct", "Sample a finite-length code and write it as alist");
  c_co->add_option("--ensemble", co.ensemble, "Ensemble JSON with M")->required()->check(CLI::ExistingFile);
  auto* co_seed_opt = c_co->add_option("--seed", co_seed, "RNG seed");
  c_co->add_option("--out", co.out, "alist output")->required();
  c_co->add_flag("--stats", co.stats, "Print graph statistics as JSON");

  SimulateOpts si;
  std::uint64_t si_seed = 0;
  auto* c_si = app.add_subcommand("simulate", "Monte-Carlo windowed decoding");
  c_si->add_option("--ensemble", si.ensemble, "Ensemble JSON with M")->required()->check(CLI::ExistingFile);
  c_si->add_option("--channel", si.channel, "bec or awgn");
  c_si->add_option("--grid", si.grid, "epsilon (bec) or Eb/N0 dB (awgn) as a:b:step")->required();
  c_si->add_option("--setup", si.setup, "A, B or 'W,I'");
  c_si->add_option("--frames", si.frames, "Maximum frames per grid point")->check(CLI::PositiveNumber);
  c_si->add_option("--min-frames", si.min_frames, "Minimum frames per grid point");
  c_si->add_option("--target-errors", si.target_errors, "Stop after this many frame errors (0: run all frames)");
  c_si->add_option("--realizations", si.realizations, "Distinct sampled codes")->check(CLI::PositiveNumber);
  auto* si_seed_opt = c_si->add_option("--seed", si_seed, "RNG seed");
  c_si->add_option("--out", si.out, "CSV output (stdout if omitted)");

  FixturesOpts fx;
  auto* c_fx = app.add_subcommand("fixtures", "Reference code table");
  c_fx->add_option("--table", fx.table, "Table CSV (default: shipped table)")->check(CLI::ExistingFile);
  c_fx->add_flag("--check", fx.check, "Recompute every design rate");
  c_fx->add_flag("--list", fx.list, "Print the table");
  c_fx->add_option("--emit-dir", fx.emit_dir, "Write one ensemble JSON per row");
  c_fx->add_option("--L", fx.L, "L for emitted ensembles")->check(CLI::PositiveNumber);
  c_fx->add_option("--M", fx.M, "M for emitted ensembles")->check(CLI::PositiveNumber);

  std::vector<std::string> rev(args.rbegin(), args.rend());
  try {
    app.parse(rev);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::CallForVersion&) {
    out << SCWAVE_VERSION << '\n';
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "scwave: " << e.what() << "\n\n";
    const auto* sub = app.get_subcommands().empty() ? &app : app.get_subcommands().front();
    err << sub->help();
    return kExitUsage;
  }

  Logger log{&err, quiet};
  if (threads > 0) set_worker_threads(threads);
  const auto* active = app.get_subcommands().front();
  try {
    if (active == c_rate) return run_rate(rate, out);
    if (active == c_de) return run_de(de, out);
    if (active == c_th) return run_threshold(th, out);
    if (active == c_sp) return run_speed(sp, out, log);
    if (active == c_op) {
      if (*op_seed_opt) op.seed = op_seed;
      return run_optimize(op, out, log);
    }
    if (active == c_co) {
      if (*co_seed_opt) co.seed = co_seed;
      return run_construct(co, out, log);
    }
    if (active == c_si) {
      if (*si_seed_opt) si.seed = si_seed;
      return run_simulate(si, out, log);
    }
    if (active == c_fx) return run_fixtures(fx, out, log);
  } catch (const UsageError& e) {
    err << "scwave " << active->get_name() << ": " << e.what() << "\n\n" << active->help();
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "scwave " << active->get_name() << ": error: " << e.what() << '\n';
    return kExitDomainError;
  }
  return kExitUsage;
}

}  // namespace scwave
