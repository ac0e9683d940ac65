#include <CLI11.hpp>

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include "corrcache/analysis.hpp"
#include "corrcache/cache_engine.hpp"
#include "corrcache/errors.hpp"
#include "corrcache/follow.hpp"
#include "corrcache/harness.hpp"
#include "corrcache/policies.hpp"
#include "corrcache/text.hpp"
#include "corrcache/trace_io.hpp"
#include "corrcache/workload_config.hpp"

namespace fs = std::filesystem;
using namespace corrcache;

namespace {

constexpr int kConfigExit = 2;
constexpr int kInternalExit = 3;

// A preset name, "preset:<name>", "config:<path>", or an existing config file.
WorkloadConfig resolve_workload(const std::string& arg) {
  if (text::starts_with(arg, "preset:")) return load_preset(arg.substr(7));
  if (text::starts_with(arg, "config:")) return load_workload_config(arg.substr(7));
  if (is_preset(arg)) return load_preset(arg);
  if (fs::exists(arg)) return load_workload_config(arg);
  preset_text(arg);  // throws with the list of presets
  return {};
}

// A trace file path or any TraceSource spelling.
TraceSource resolve_trace_source(const std::string& arg) {
  if (text::starts_with(arg, "preset:") || text::starts_with(arg, "config:") || text::starts_with(arg, "file:")) {
    return TraceSource::parse(arg);
  }
  if (fs::exists(arg)) return TraceSource{TraceSource::Kind::kFile, arg};
  return TraceSource::parse(arg);
}

std::ofstream open_out(const fs::path& p) {
  if (p.has_parent_path()) fs::create_directories(p.parent_path());
  std::ofstream out(p, std::ios::binary);
  if (!out) throw ConfigError("cannot open " + p.string() + " for writing");
  return out;
}

struct GenerateArgs {
  std::string source;
  std::uint64_t seed = 1;
  double scale = 1.0;
  std::string out = "-";
};

int run_generate(const GenerateArgs& a) {
  auto w = resolve_workload(a.source);
  if (a.scale != 1.0) w = scale_workload(std::move(w), a.scale);
  const auto trace = generate_trace(w, a.seed);
  if (a.out == "-") {
    write_trace(trace, std::cout);
  } else {
    auto out = open_out(a.out);
    write_trace(trace, out);
  }
  return 0;
}

struct SimulateArgs {
  std::string trace;
  std::string policy = "LRU";
  std::string capacity;
  std::string basis = "volume";
  double local_frac = 0.0;
  std::uint64_t seed = 1;
  double scale = 1.0;
  std::string out;
  bool follow_dump = false;
  std::uint64_t follow_every = 0;
};

int run_simulate(const SimulateArgs& a) {
  const auto src = resolve_trace_source(a.trace);
  std::optional<WorkloadConfig> workload;
  const auto trace = load_trace(src, a.scale, a.seed, &workload);
  const auto cap = CapacitySpec::parse(a.capacity);
  const auto basis = a.basis == "footprint" ? CapacityBasis::kFootprint : CapacityBasis::kVolume;
  const auto bytes = resolve_capacity(cap, basis, trace);

  auto params = parse_policy(a.policy);
  if (params.kind == PolicyKind::kStaticOpt) params.static_rates = static_rates(trace, workload);
  const auto compiled = compile_trace(trace);
  CacheSimulator sim(compiled, params, CacheConfig{bytes, a.local_frac}, a.seed);

  fs::create_directories(a.out);
  auto* lfru = dynamic_cast<LfruPolicy*>(&sim.policy());
  if ((a.follow_dump || a.follow_every) && !lfru) throw ConfigError("--follow-dump needs an LFRU or LFRUS policy");
  std::vector<std::uint32_t> ids;
  for (auto c : compiled.clients) ids.push_back(to_index(c));

  std::uint64_t forwarded = 0;
  while (!sim.done()) {
    if (sim.step().reached_main && a.follow_every && ++forwarded % a.follow_every == 0) {
      auto out = open_out(fs::path(a.out) / ("follow-" + std::to_string(forwarded) + ".csv"));
      out << "c1,c2,count\n";
      write_follow_matrix_csv(lfru->tracker(), ids, out);
    }
  }
  if (a.follow_dump) {
    auto out = open_out(fs::path(a.out) / "follow.csv");
    out << "c1,c2,count\n";
    write_follow_matrix_csv(lfru->tracker(), ids, out);
  }

  const auto& m = sim.metrics();
  {
    auto out = open_out(fs::path(a.out) / "metrics.csv");
    write_metrics_csv(m, out);
  }
  std::map<std::string, std::string> extra{
      {"policy", policy_label(params)},
      {"capacity", cap.str()},
      {"capacity_bytes", std::to_string(bytes)},
      {"local_fraction", text::format_double(a.local_frac)},
      {"trace", src.str()},
      {"version", std::string(toolkit_version())},
  };
  if (auto it = trace.metadata.find("config_hash"); it != trace.metadata.end()) extra["config_hash"] = it->second;
  {
    auto out = open_out(fs::path(a.out) / "summary.txt");
    write_metrics_summary(m, extra, out);
  }
  std::cout << policy_label(params) << " capacity=" << bytes << " hit_ratio="
            << (m.forwarded ? text::format_double(measured_hit_ratio(m)) : "undefined") << '\n';
  return 0;
}

struct SweepArgs {
  std::string config;
  std::string out;
  int threads = -1;
};

int run_sweep_cmd(const SweepArgs& a) {
  auto cfg = load_experiment_config(a.config);
  if (a.threads >= 0) cfg.threads = static_cast<unsigned>(a.threads);
  std::string out = a.out.empty() ? cfg.output : a.out;
  if (out.empty()) throw ConfigError("no output directory: pass --out or set 'output' in the config");
  const auto rep = run_sweep(cfg);
  write_sweep_outputs(rep, out);
  for (const auto& s : summarize(rep)) {
    std::cout << s.policy << " @ " << s.capacity << ": mean hit ratio " << text::format_double(s.mean) << '\n';
  }
  return 0;
}

struct AnalyzeArgs {
  std::string model;
  std::string capacity;
  std::string out = "-";
  std::size_t mc_samples = 1000000;
  std::uint64_t mc_seed = 1;
};

int run_analyze(const AnalyzeArgs& a) {
  const auto w = resolve_workload(a.model);
  const auto* g = std::get_if<GroupedWorkload>(&w);
  if (!g) throw ConfigError("analyze needs a grouped workload config");
  AnalysisOptions opt;
  opt.mc_samples = a.mc_samples;
  opt.mc_seed = a.mc_seed;
  WorkingSetModel model(*g, opt);
  const auto cap = CapacitySpec::parse(a.capacity);
  const double b = cap.percent ? std::floor(cap.value / 100.0 * static_cast<double>(model.total_volume())) : cap.value;
  const auto rep = model_hit_report(model, b);
  if (a.out == "-") {
    write_model_report_csv(rep, std::cout);
  } else {
    auto out = open_out(a.out);
    write_model_report_csv(rep, out);
  }
  return 0;
}

struct ReproduceArgs {
  std::string preset;
  double scale = 1.0;
  std::uint64_t seed = 1;
  std::string capacity;
  std::string out;
  unsigned threads = 1;
};

int run_reproduce(const ReproduceArgs& a) {
  ReproduceOptions opt;
  opt.scale = a.scale;
  opt.seed = a.seed;
  opt.threads = a.threads;
  if (!a.capacity.empty()) opt.capacity = CapacitySpec::parse(a.capacity);
  const auto res = reproduce(a.preset, opt);
  const std::string out = a.out.empty() ? "reproduce-" + a.preset : a.out;
  write_reproduce_outputs(res, out);
  for (const auto& [k, v] : res.notes) std::cout << k << '=' << v << '\n';
  return 0;
}

int run_validate(const std::string& path) {
  const auto trace = read_trace(fs::path(path));
  const auto rep = validate_trace(trace);
  for (const auto& v : rep.violations) std::cout << "violation " << v.index << ": " << v.message << '\n';
  std::cout << (rep.ok() ? "ok" : "invalid") << '\n';
  return rep.ok() ? 0 : kConfigExit;
}

int run_stats(const std::string& path) {
  const auto s = trace_stats(read_trace(fs::path(path)));
  std::cout << "event_count=" << s.event_count << '\n'
            << "distinct_objects=" << s.distinct_objects << '\n'
            << "distinct_clients=" << s.distinct_clients << '\n'
            << "total_volume=" << s.total_volume << '\n'
            << "duration=" << text::format_double(s.duration) << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"corrcache: correlated-request cache simulation and analysis"};
  app.set_version_flag("--version", std::string(toolkit_version()));
  app.require_subcommand(1);

  GenerateArgs gen;
  auto* g = app.add_subcommand("generate", "Generate a trace from a preset or generator config");
  g->add_option("source", gen.source, "Preset name or config file (preset:<name>, config:<path>)")->required();
  g->add_option("--seed", gen.seed, "Generator seed")->capture_default_str();
  g->add_option("--scale", gen.scale, "Horizon multiplier")->capture_default_str();
  g->add_option("--out", gen.out, "Trace file, '-' for stdout")->capture_default_str();

  SimulateArgs sim;
  auto* s = app.add_subcommand("simulate", "Simulate one policy at one capacity");
  s->add_option("--trace", sim.trace, "Trace file or source (preset:<name>, config:<path>, file:<path>)")->required();
  s->add_option("--policy", sim.policy,
                "LRU, LFU, SIEVE, BELADY, STATIC_OPT, LFRU(w=20), LFRUS(w=2,gamma=0.5)")
      ->capture_default_str();
  s->add_option("--capacity", sim.capacity, "Bytes, or percent of the basis, e.g. 0.5%")->required();
  s->add_option("--basis", sim.basis, "Percent basis: volume (all objects) or footprint (requested objects)")
      ->check(CLI::IsMember({"volume", "footprint"}))
      ->capture_default_str();
  s->add_option("--local-frac", sim.local_frac, "Per-client LRU cache size as a fraction of the capacity")
      ->capture_default_str();
  s->add_option("--seed", sim.seed, "Seed for generated traces, recorded in the outputs")->capture_default_str();
  s->add_option("--scale", sim.scale, "Horizon multiplier for generated traces")->capture_default_str();
  s->add_option("--out", sim.out, "Output directory (metrics.csv, summary.txt)")->required();
  s->add_flag("--follow-dump", sim.follow_dump, "Write the final follow matrix to follow.csv (LFRU/LFRUS)");
  s->add_option("--follow-every", sim.follow_every, "Also dump the follow matrix every N main-cache requests");

  SweepArgs sw;
  auto* w = app.add_subcommand("sweep", "Run a capacity sweep described by a config file");
  w->add_option("config", sw.config, "Sweep config file")->required()->check(CLI::ExistingFile);
  w->add_option("--out", sw.out, "Output directory (overrides 'output')");
  w->add_option("--threads", sw.threads, "Worker threads, 0 for all cores (overrides 'threads')");

  AnalyzeArgs an;
  auto* z = app.add_subcommand("analyze", "Working-set model hit probabilities for a grouped workload");
  z->add_option("model", an.model, "Preset name or grouped generator config")->required();
  z->add_option("--capacity", an.capacity, "Bytes, or percent of total data volume")->required();
  z->add_option("--out", an.out, "CSV file, '-' for stdout")->capture_default_str();
  z->add_option("--mc-samples", an.mc_samples, "Monte Carlo samples for joint delays")->capture_default_str();
  z->add_option("--mc-seed", an.mc_seed, "Monte Carlo seed")->capture_default_str();

  ReproduceArgs rp;
  auto* r = app.add_subcommand("reproduce", "Run a preset experiment with its model overlay");
  r->add_option("preset", rp.preset, "Preset name")->required();
  r->add_option("--scale", rp.scale, "Horizon multiplier")->capture_default_str();
  r->add_option("--seed", rp.seed, "Seed")->capture_default_str();
  r->add_option("--capacity", rp.capacity, "Overlay capacity for fig2/fig3 presets (default 10% / 5%)");
  r->add_option("--out", rp.out, "Output directory (default reproduce-<preset>)");
  r->add_option("--threads", rp.threads, "Worker threads for sweeps")->capture_default_str();

  std::string vpath;
  auto* v = app.add_subcommand("validate", "Check a trace file's ordering and catalog coverage");
  v->add_option("trace", vpath, "Trace file")->required();

  std::string spath;
  auto* st = app.add_subcommand("stats", "Print trace statistics");
  st->add_option("trace", spath, "Trace file")->required();

  auto* ls = app.add_subcommand("presets", "List generator presets");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : kConfigExit;
  }

  try {
    if (g->parsed()) return run_generate(gen);
    if (s->parsed()) return run_simulate(sim);
    if (w->parsed()) return run_sweep_cmd(sw);
    if (z->parsed()) return run_analyze(an);
    if (r->parsed()) return run_reproduce(rp);
    if (v->parsed()) return run_validate(vpath);
    if (st->parsed()) return run_stats(spath);
    if (ls->parsed()) {
      for (const auto& n : preset_names()) std::cout << n << '\n';
      return 0;
    }
  } catch (const ConfigError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kConfigExit;
  } catch (const InternalError& e) {
    std::cerr << "internal error: " << e.what() << '\n';
    return kInternalExit;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kConfigExit;
  }
  return 0;
}
