#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "corrcache/cache_engine.hpp"
#include "corrcache/policy.hpp"
#include "corrcache/trace.hpp"
#include "corrcache/workload_config.hpp"

namespace corrcache {

std::string_view toolkit_version();

struct TraceSource {
  enum class Kind { kPreset, kConfig, kFile };
  Kind kind = Kind::kPreset;
  std::string value;  // preset name or path

  // "preset:<name>", "config:<path>", "file:<path>"; a bare word is a preset.
  static TraceSource parse(std::string_view s);
  std::string str() const;
};

struct CapacitySpec {
  double value = 0.0;
  bool percent = false;
  // "0.5%" or "1200"
  static CapacitySpec parse(std::string_view s);
  std::string str() const;
};

enum class CapacityBasis {
  kVolume,     // sum of all catalog sizes
  kFootprint,  // sum of sizes of identities the trace requests
};

struct ExperimentConfig {
  std::string name = "sweep";
  TraceSource trace;
  double scale = 1.0;  // horizon multiplier for generated traces
  std::vector<std::uint64_t> seeds{1};
  std::vector<PolicyParams> policies;
  std::vector<CapacitySpec> capacities;
  CapacityBasis basis = CapacityBasis::kVolume;
  double local_fraction = 0.0;
  unsigned threads = 1;  // 0: hardware concurrency
  std::string output;    // optional default output directory

  void validate() const;
};

// Key/value text; keys: name, trace, scale, seeds, policies (';'-separated),
// capacities, capacity_basis, local_fraction, threads, output.
ExperimentConfig parse_experiment_config(std::string_view text, const std::string& source = "<sweep>");
ExperimentConfig load_experiment_config(const std::string& path);
std::string format_experiment_config(const ExperimentConfig& c);

// Trace of a source for one seed. File traces ignore the seed. When the
// source is a generator, `workload` receives its config.
Trace load_trace(const TraceSource& src, double scale, std::uint64_t seed,
                 std::optional<WorkloadConfig>* workload = nullptr);

// b for one capacity entry. Percentages resolve to floor(pct/100 * basis),
// at least 1 byte.
std::uint64_t resolve_capacity(const CapacitySpec& c, CapacityBasis basis, const Trace& trace);

// STATIC_OPT weights per identity: sum_g lambda^g(d) (1 + f^g) for grouped
// workloads, otherwise the identity's request count in the trace.
std::map<ObjectKey, double> static_rates(const Trace& trace, const std::optional<WorkloadConfig>& workload);

struct ClientRow {
  std::uint32_t client = 0;  // external id
  std::uint64_t requests = 0;
  std::uint64_t hits = 0;
};

struct SweepRow {
  std::string policy;
  std::string capacity;  // as configured
  std::uint64_t capacity_bytes = 0;
  std::uint64_t seed = 0;
  std::uint64_t requests = 0;  // reaching the main cache
  std::uint64_t hits = 0;
  std::uint64_t bypassed = 0;
  double hit_ratio = 0.0;
  std::vector<ClientRow> clients;
};

struct SweepReport {
  std::string name;
  std::string config_hash;
  std::string version;
  std::vector<std::string> policies;    // configuration order
  std::vector<std::string> capacities;  // configuration order
  std::vector<std::uint64_t> seeds;
  std::vector<SweepRow> rows;           // ordered by (policy, capacity, seed)
  std::map<std::string, std::string> notes;

  const SweepRow& row(std::size_t policy, std::size_t capacity, std::size_t seed) const;
};

SweepReport run_sweep(const ExperimentConfig& config);

struct SummaryRow {
  std::string policy;
  std::string capacity;
  std::size_t seeds = 0;
  double mean = 0.0;
  double min = 0.0;
  double max = 0.0;
  double stderr_ = 0.0;  // sample standard deviation / sqrt(n); 0 for one seed
};
std::vector<SummaryRow> summarize(const SweepReport& report);

struct Multiplier {
  std::string capacity;
  std::string policy;
  std::string baseline;
  std::optional<double> value;  // nullopt when the baseline ratio is 0
};

struct Comparison {
  struct Best {
    std::string capacity;
    std::string policy;
    double hit_ratio = 0.0;
    double gap = 0.0;  // best minus runner-up
  };
  std::vector<Best> best;
  std::vector<Multiplier> multipliers;  // LFRU/LFRUS variants over LRU and LFU, seed-mean ratios
};

// Throws ConfigError for fewer than two policies.
Comparison compare_policies(const SweepReport& report);

// Writes sweep.csv, clients.csv, summary.csv, compare.csv (when at least two
// policies ran) and manifest.txt into `dir`.
void write_sweep_outputs(const SweepReport& report, const std::filesystem::path& dir);
void write_sweep_csv(const SweepReport& report, std::ostream& out);
void write_clients_csv(const SweepReport& report, std::ostream& out);
void write_summary_csv(const std::vector<SummaryRow>& rows, std::ostream& out);
void write_compare_csv(const Comparison& cmp, std::ostream& out);

// Simulated versus model hit probability for one (group, role, object).
struct OverlayRow {
  std::string variant;       // "" for single-configuration presets
  std::uint32_t group = 0;   // 1-based
  bool leader = true;
  std::uint32_t follower = 0;  // 0: leader, or all followers pooled
  std::uint32_t object = 0;
  std::uint64_t sim_requests = 0;
  double sim_hit_prob = 0.0;
  double model_hit_prob = 0.0;
};

struct ReproduceOptions {
  double scale = 1.0;
  std::uint64_t seed = 1;
  std::optional<CapacitySpec> capacity;  // overlay presets; default per preset
  unsigned threads = 1;
};

struct ReproduceResult {
  std::string preset;
  std::optional<SweepReport> sweep;
  std::vector<OverlayRow> overlay;
  std::map<std::string, std::string> notes;  // t_star, max_abs_diff_top20, ...
};

// Throws ConfigError listing the presets for an unknown name.
ReproduceResult reproduce(const std::string& preset, const ReproduceOptions& opt);
void write_reproduce_outputs(const ReproduceResult& r, const std::filesystem::path& dir);
void write_overlay_csv(const std::vector<OverlayRow>& rows, std::ostream& out);

// Per-object simulated vs model hit probabilities for a grouped workload under
// LRU at capacity b. Followers are pooled when their delays are i.i.d.
std::vector<OverlayRow> lru_overlay(const GroupedWorkload& w, const Trace& trace, std::uint64_t b,
                                    std::map<std::string, std::string>* notes = nullptr);

}  // namespace corrcache
