#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <span>
#include <string>
#include <string_view>

#include "corrcache/cache_state.hpp"
#include "corrcache/trace.hpp"

namespace corrcache {

struct CompiledTrace;

enum class PolicyKind { kLru, kLfu, kSieve, kBelady, kStaticOpt, kLfru, kLfrus };

struct PolicyParams {
  PolicyKind kind = PolicyKind::kLru;
  std::uint32_t window = 0;  // w, LFRU/LFRUS
  double gamma = 1.0;        // LFRUS discount in (0, 1]
  // STATIC_OPT: weighted request rate sum_g lambda^g(d) (1 + f^g) per object.
  std::map<ObjectKey, double> static_rates;

  static PolicyParams of(PolicyKind kind, std::uint32_t w = 0, double gamma = 1.0) {
    PolicyParams p;
    p.kind = kind;
    p.window = w;
    p.gamma = gamma;
    return p;
  }
  static PolicyParams lru() { return of(PolicyKind::kLru); }
  static PolicyParams lfu() { return of(PolicyKind::kLfu); }
  static PolicyParams sieve() { return of(PolicyKind::kSieve); }
  static PolicyParams belady() { return of(PolicyKind::kBelady); }
  static PolicyParams lfru(std::uint32_t w) { return of(PolicyKind::kLfru, w); }
  static PolicyParams lfrus(std::uint32_t w, double gamma) { return of(PolicyKind::kLfrus, w, gamma); }
  static PolicyParams static_opt(std::map<ObjectKey, double> rates) {
    PolicyParams p = of(PolicyKind::kStaticOpt);
    p.static_rates = std::move(rates);
    return p;
  }
};

// Parses "LRU", "LFU", "SIEVE", "BELADY", "STATIC_OPT", "LFRU(w=20)",
// "LFRUS(w=2,gamma=0.5)". Throws ConfigError on anything else.
PolicyParams parse_policy(std::string_view spec);
// Canonical label, e.g. "LFRUS(w=2,gamma=0.5)".
std::string policy_label(const PolicyParams& p);
// Throws ConfigError when parameters violate their ranges.
void validate_params(const PolicyParams& p);

// One main-cache request as seen by a policy.
struct Request {
  std::size_t position = 0;  // index in the main-cache request stream
  std::uint32_t client = 0;  // dense client index
  Slot slot = kNoSlot;
  double time = 0.0;
};

// Victim-selection contract. The engine calls, per main-cache request:
//   on_request(hit)            after hit determination, before any change
//   on_hit                     after the slot moved to most-recent
//   victim / on_evict          repeatedly until the incoming item fits
//   on_insert                  after admission
class EvictionPolicy {
 public:
  virtual ~EvictionPolicy() = default;

  virtual std::string name() const = 0;
  virtual void on_request(const CacheState&, const Request&, bool /*hit*/) {}
  virtual void on_hit(const CacheState&, const Request&) {}
  virtual void on_insert(const CacheState&, const Request&) {}
  virtual void on_evict(const CacheState&, Slot) {}
  // Static placement only; every other policy admits on miss.
  virtual bool admits(Slot) const { return true; }
  virtual Slot victim(const CacheState& state) = 0;
};

struct PolicyContext {
  const CompiledTrace& trace;
  // Event indices (into trace) that reach the main cache, in order.
  std::span<const std::uint32_t> main_stream;
  std::uint64_t capacity = 0;  // main-cache bytes
};

std::unique_ptr<EvictionPolicy> make_policy(const PolicyParams& params, const PolicyContext& ctx);

}  // namespace corrcache
