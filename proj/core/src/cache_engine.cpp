#include "corrcache/cache_engine.hpp"

#include <algorithm>
#include <cmath>
#include <list>
#include <ostream>
#include <unordered_map>

#include "corrcache/errors.hpp"
#include "corrcache/text.hpp"

namespace corrcache {
namespace {

// Private per-client cache in front of the main cache. Plain LRU by bytes.
class LocalLru {
 public:
  explicit LocalLru(std::uint64_t capacity) : capacity_(capacity) {}

  // True on hit. On miss the object is admitted if it fits at all.
  bool access(Slot s, std::uint64_t size) {
    if (auto it = where_.find(s); it != where_.end()) {
      order_.splice(order_.begin(), order_, it->second);
      return true;
    }
    if (size > capacity_) return false;
    while (used_ + size > capacity_) {
      const Slot victim = order_.back();
      used_ -= sizes_.at(victim);
      sizes_.erase(victim);
      where_.erase(victim);
      order_.pop_back();
    }
    order_.push_front(s);
    where_[s] = order_.begin();
    sizes_[s] = size;
    used_ += size;
    return false;
  }

 private:
  std::uint64_t capacity_;
  std::uint64_t used_ = 0;
  std::list<Slot> order_;
  std::unordered_map<Slot, std::list<Slot>::iterator> where_;
  std::unordered_map<Slot, std::uint64_t> sizes_;
};

}  // namespace

bool CompiledTrace::uniform_sizes() const noexcept {
  return std::all_of(sizes.begin(), sizes.end(), [&](std::uint64_t s) { return s == sizes.front(); });
}

CompiledTrace compile_trace(const Trace& trace) {
  CompiledTrace ct;
  const auto& cat = trace.catalog;
  ct.sizes.reserve(cat.size());
  ct.keys.reserve(cat.size());
  for (const auto& e : cat.entries()) {
    ct.sizes.push_back(e.size_bytes);
    ct.keys.push_back(e.key);
  }

  std::vector<std::uint32_t> ids;
  ids.reserve(64);
  for (const auto& e : trace.events) ids.push_back(to_index(e.client));
  std::sort(ids.begin(), ids.end());
  ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
  std::unordered_map<std::uint32_t, std::uint32_t> dense;
  for (std::uint32_t i = 0; i < ids.size(); ++i) {
    dense[ids[i]] = i;
    ct.clients.push_back(ClientId{ids[i]});
  }

  const auto n = trace.events.size();
  ct.slot.resize(n);
  ct.client.resize(n);
  ct.time.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    const auto& e = trace.events[i];
    auto s = cat.find(e.object);
    if (!s) {
      throw ConfigError("event " + std::to_string(i) + " references object " +
                        std::to_string(e.object.id) + " missing from the catalog");
    }
    ct.slot[i] = static_cast<Slot>(*s);
    ct.client[i] = dense.at(to_index(e.client));
    ct.time[i] = e.time;
  }
  return ct;
}

std::uint64_t CacheConfig::local_capacity() const {
  return static_cast<std::uint64_t>(std::floor(local_cache_fraction * static_cast<double>(capacity_bytes)));
}

void CacheConfig::validate() const {
  if (capacity_bytes == 0) throw ConfigError("cache capacity must be > 0");
  if (!(local_cache_fraction >= 0.0 && local_cache_fraction < 1.0)) {
    throw ConfigError("local cache fraction must lie in [0, 1)");
  }
}

HitCounter SimulationMetrics::client_total(std::uint32_t client) const {
  HitCounter total;
  for (std::size_t s = 0; s < objects.size(); ++s) {
    const auto& c = cell(client, static_cast<Slot>(s));
    total.requests += c.requests;
    total.hits += c.hits;
  }
  return total;
}

CacheSimulator::CacheSimulator(const CompiledTrace& trace, const PolicyParams& params,
                               const CacheConfig& config, std::uint64_t seed)
    : trace_(trace), config_(config), state_(config.capacity_bytes, trace.sizes) {
  config_.validate();
  validate_params(params);

  forwarded_.assign(trace.size(), 1);
  if (const auto local = config_.local_capacity(); local > 0) {
    std::vector<LocalLru> locals(trace.client_count(), LocalLru(local));
    for (std::size_t i = 0; i < trace.size(); ++i) {
      if (locals[trace.client[i]].access(trace.slot[i], trace.sizes[trace.slot[i]])) forwarded_[i] = 0;
    }
  }
  main_stream_.reserve(trace.size());
  for (std::size_t i = 0; i < trace.size(); ++i) {
    if (forwarded_[i]) main_stream_.push_back(static_cast<std::uint32_t>(i));
  }

  policy_ = make_policy(params, PolicyContext{trace_, main_stream_, config.capacity_bytes});

  metrics_.seed = seed;
  metrics_.clients = trace.clients;
  metrics_.objects = trace.keys;
  metrics_.cells.assign(trace.client_count() * trace.slot_count(), HitCounter{});
}

CacheSimulator::~CacheSimulator() = default;

const StepOutcome& CacheSimulator::step() {
  if (done()) throw InternalError("step past end of trace");
  const std::size_t i = next_++;
  outcome_.evicted.clear();
  outcome_.hit = outcome_.bypassed = false;
  ++metrics_.total_requests;
  if (!forwarded_[i]) {
    outcome_.reached_main = false;
    ++metrics_.local_hits;
    return outcome_;
  }
  outcome_.reached_main = true;

  const Request req{main_pos_++, trace_.client[i], trace_.slot[i], trace_.time[i]};
  auto& cell = metrics_.cells[std::size_t{req.client} * trace_.slot_count() + req.slot];
  ++cell.requests;
  ++metrics_.forwarded;

  const bool hit = state_.resident(req.slot);
  policy_->on_request(state_, req, hit);
  if (hit) {
    outcome_.hit = true;
    ++cell.hits;
    ++metrics_.hits;
    state_.touch(req.slot, req.client);
    policy_->on_hit(state_, req);
  } else if (trace_.sizes[req.slot] > state_.capacity()) {
    outcome_.bypassed = true;
    ++metrics_.bypassed;
    state_.note_request(req.slot, req.client);
  } else if (!policy_->admits(req.slot)) {
    state_.note_request(req.slot, req.client);
  } else {
    outcome_.evicted = admit_with_eviction(state_, req, *policy_);
  }
  return outcome_;
}

void CacheSimulator::run() {
  while (!done()) step();
}

std::vector<Slot> admit_with_eviction(CacheState& state, const Request& incoming,
                                      EvictionPolicy& policy) {
  const auto size = state.size_of(incoming.slot);
  if (state.resident(incoming.slot)) throw InternalError("admission of a resident object");
  if (size > state.capacity()) throw InternalError("admission of an object larger than the cache");
  std::vector<Slot> victims;
  while (state.free_bytes() < size) {
    const Slot v = policy.victim(state);
    if (v == kNoSlot || v >= state.slot_count() || !state.resident(v)) {
      throw InternalError(policy.name() + " nominated a non-resident victim");
    }
    state.erase(v);
    policy.on_evict(state, v);
    victims.push_back(v);
  }
  state.insert(incoming.slot, incoming.client);
  policy.on_insert(state, incoming);
  return victims;
}

SimulationMetrics simulate(const CompiledTrace& trace, const PolicyParams& policy,
                           const CacheConfig& config, std::uint64_t seed) {
  CacheSimulator sim(trace, policy, config, seed);
  sim.run();
  return sim.metrics();
}

SimulationMetrics simulate(const Trace& trace, const PolicyParams& policy, const CacheConfig& config,
                           std::uint64_t seed) {
  const auto compiled = compile_trace(trace);
  return simulate(compiled, policy, config, seed);
}

double measured_hit_ratio(const SimulationMetrics& m) {
  if (m.forwarded == 0) throw ConfigError("hit ratio undefined: no request reached the cache");
  return static_cast<double>(m.hits) / static_cast<double>(m.forwarded);
}

double normalized_model_hit_rate(std::span<const GroupHitRates> groups) {
  double weighted = 0.0;
  double total = 0.0;
  for (const auto& g : groups) {
    const auto followers = g.follower_hits.size();
    for (std::size_t d = 0; d < g.object_rates.size(); ++d) {
      const double rate = g.object_rates[d];
      double h = g.leader_hits.at(d);
      for (const auto& fh : g.follower_hits) h += fh.at(d);
      weighted += rate * h;
      total += rate * static_cast<double>(1 + followers);
    }
  }
  if (!(total > 0.0)) throw ConfigError("model hit rate undefined: total request rate is zero");
  return weighted / total;
}

namespace {

std::string version_cell(ObjectKey k) {
  return k.versioned() ? std::to_string(static_cast<int>(k.version)) : std::string("-");
}

}  // namespace

void write_metrics_csv(const SimulationMetrics& m, std::ostream& out) {
  out << "client,object,version,requests,hits\n";
  HitCounter all;
  for (std::uint32_t c = 0; c < m.clients.size(); ++c) {
    for (std::size_t s = 0; s < m.objects.size(); ++s) {
      const auto& cell = m.cell(c, static_cast<Slot>(s));
      if (cell.requests == 0) continue;
      out << to_index(m.clients[c]) << ',' << m.objects[s].id << ',' << version_cell(m.objects[s]) << ','
          << cell.requests << ',' << cell.hits << '\n';
    }
  }
  for (std::uint32_t c = 0; c < m.clients.size(); ++c) {
    const auto t = m.client_total(c);
    all.requests += t.requests;
    all.hits += t.hits;
    out << to_index(m.clients[c]) << ",*,*," << t.requests << ',' << t.hits << '\n';
  }
  out << "*,*,*," << all.requests << ',' << all.hits << '\n';
}

void write_metrics_summary(const SimulationMetrics& m, const std::map<std::string, std::string>& extra,
                           std::ostream& out) {
  std::map<std::string, std::string> kv = extra;
  kv["total_requests"] = std::to_string(m.total_requests);
  kv["forwarded"] = std::to_string(m.forwarded);
  kv["hits"] = std::to_string(m.hits);
  kv["bypassed"] = std::to_string(m.bypassed);
  kv["local_hits"] = std::to_string(m.local_hits);
  kv["seed"] = std::to_string(m.seed);
  kv["hit_ratio"] = m.forwarded ? text::format_double(measured_hit_ratio(m)) : "undefined";
  for (const auto& [k, v] : kv) out << k << '=' << v << '\n';
}

}  // namespace corrcache
