#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "corrcache/cache_state.hpp"
#include "corrcache/policy.hpp"
#include "corrcache/trace.hpp"

namespace corrcache {

// Trace lowered to dense indices: slots follow catalog order, clients are
// numbered by ascending external id.
struct CompiledTrace {
  std::vector<Slot> slot;
  std::vector<std::uint32_t> client;
  std::vector<double> time;
  std::vector<std::uint64_t> sizes;
  std::vector<ObjectKey> keys;
  std::vector<ClientId> clients;

  std::size_t size() const noexcept { return slot.size(); }
  std::size_t slot_count() const noexcept { return sizes.size(); }
  std::size_t client_count() const noexcept { return clients.size(); }
  bool uniform_sizes() const noexcept;
};

// Throws ConfigError if an event references an object missing from the catalog.
CompiledTrace compile_trace(const Trace& trace);

struct CacheConfig {
  std::uint64_t capacity_bytes = 1;
  // Per-client private LRU caches of floor(fraction * capacity) bytes; 0 disables.
  double local_cache_fraction = 0.0;

  std::uint64_t local_capacity() const;
  void validate() const;
};

struct HitCounter {
  std::uint64_t requests = 0;
  std::uint64_t hits = 0;
  friend bool operator==(const HitCounter&, const HitCounter&) = default;
};

struct SimulationMetrics {
  std::uint64_t total_requests = 0;  // every trace event
  std::uint64_t forwarded = 0;       // events reaching the main cache
  std::uint64_t hits = 0;            // main-cache hits
  std::uint64_t bypassed = 0;        // objects larger than the cache
  std::uint64_t local_hits = 0;
  std::uint64_t seed = 0;

  std::vector<ClientId> clients;
  std::vector<ObjectKey> objects;
  // Main-cache tallies, row-major [client][slot].
  std::vector<HitCounter> cells;

  const HitCounter& cell(std::uint32_t client, Slot slot) const {
    return cells[std::size_t{client} * objects.size() + slot];
  }
  HitCounter client_total(std::uint32_t client) const;

  friend bool operator==(const SimulationMetrics&, const SimulationMetrics&) = default;
};

struct StepOutcome {
  bool reached_main = false;
  bool hit = false;
  bool bypassed = false;
  std::vector<Slot> evicted;
};

// Event-by-event simulation of one shared cache, optionally fronted by
// per-client LRU caches. Local-cache routing does not depend on the main
// cache, so the main-cache request stream is fixed up front; offline
// policies (Belady) index into it.
class CacheSimulator {
 public:
  CacheSimulator(const CompiledTrace& trace, const PolicyParams& params, const CacheConfig& config,
                 std::uint64_t seed = 0);
  ~CacheSimulator();
  CacheSimulator(const CacheSimulator&) = delete;
  CacheSimulator& operator=(const CacheSimulator&) = delete;

  bool done() const noexcept { return next_ >= trace_.size(); }
  std::size_t position() const noexcept { return next_; }
  const StepOutcome& step();
  void run();

  const SimulationMetrics& metrics() const noexcept { return metrics_; }
  const CacheState& state() const noexcept { return state_; }
  EvictionPolicy& policy() noexcept { return *policy_; }
  std::span<const std::uint32_t> main_stream() const noexcept { return main_stream_; }

 private:
  const CompiledTrace& trace_;
  CacheConfig config_;
  std::vector<std::uint8_t> forwarded_;
  std::vector<std::uint32_t> main_stream_;
  CacheState state_;
  std::unique_ptr<EvictionPolicy> policy_;
  SimulationMetrics metrics_;
  StepOutcome outcome_;
  std::size_t next_ = 0;
  std::size_t main_pos_ = 0;
};

// Asks the policy for victims until `incoming` fits, then inserts it at the
// most-recent position. Returns victims in eviction order. Throws
// InternalError if the policy names a non-resident slot.
std::vector<Slot> admit_with_eviction(CacheState& state, const Request& incoming,
                                      EvictionPolicy& policy);

SimulationMetrics simulate(const CompiledTrace& trace, const PolicyParams& policy,
                           const CacheConfig& config, std::uint64_t seed = 0);
SimulationMetrics simulate(const Trace& trace, const PolicyParams& policy, const CacheConfig& config,
                           std::uint64_t seed = 0);

// hits / forwarded. Throws ConfigError when no request reached the cache.
double measured_hit_ratio(const SimulationMetrics& m);

// Per-group model hit probabilities for the rate-weighted hit ratio.
struct GroupHitRates {
  std::vector<double> object_rates;                 // lambda^g(d)
  std::vector<double> leader_hits;                  // h^{g,l}(d)
  std::vector<std::vector<double>> follower_hits;   // [i][d] -> h^{g,i}(d)
};

// sum_g sum_d lambda^g(d) (h_leader + sum_i h_i) / sum_g lambda^g (1 + f^g).
// Throws ConfigError on a zero total rate.
double normalized_model_hit_rate(std::span<const GroupHitRates> groups);

// CSV `client,object,version,requests,hits`: one row per (client, object)
// with requests, then per-client aggregate rows (object `*`) and a final
// all-client row.
void write_metrics_csv(const SimulationMetrics& m, std::ostream& out);
// key=value lines: hit_ratio, forwarded, hits, ..., plus `extra`.
void write_metrics_summary(const SimulationMetrics& m, const std::map<std::string, std::string>& extra,
                           std::ostream& out);

}  // namespace corrcache
