#include "corrcache/policies.hpp"

#include <algorithm>
#include <cctype>
#include <optional>

#include "corrcache/cache_engine.hpp"
#include "corrcache/errors.hpp"
#include "corrcache/static_optimal.hpp"
#include "corrcache/text.hpp"

namespace corrcache {

// ---- LRU --------------------------------------------------------------------

Slot LruPolicy::victim(const CacheState& state) {
  if (state.empty()) throw InternalError("LRU victim requested from an empty cache");
  return state.least_recent();
}

// ---- LFU --------------------------------------------------------------------

void LfuPolicy::on_request(const CacheState& state, const Request& r, bool hit) {
  if (hit) order_.erase({counts_[r.slot], state.last_access(r.slot), r.slot});
  ++counts_[r.slot];
}

void LfuPolicy::on_hit(const CacheState& state, const Request& r) {
  order_.insert({counts_[r.slot], state.last_access(r.slot), r.slot});
}

void LfuPolicy::on_insert(const CacheState& state, const Request& r) {
  order_.insert({counts_[r.slot], state.last_access(r.slot), r.slot});
}

void LfuPolicy::on_evict(const CacheState& state, Slot s) {
  order_.erase({counts_[s], state.last_access(s), s});
}

Slot LfuPolicy::victim(const CacheState&) {
  if (order_.empty()) throw InternalError("LFU victim requested from an empty cache");
  return std::get<2>(*order_.begin());
}

// ---- SIEVE ------------------------------------------------------------------

SievePolicy::SievePolicy(std::size_t slots)
    : visited_(slots, 0), newer_(slots, kNoSlot), older_(slots, kNoSlot) {}

void SievePolicy::on_hit(const CacheState&, const Request& r) { visited_[r.slot] = 1; }

void SievePolicy::on_insert(const CacheState&, const Request& r) {
  const Slot s = r.slot;
  visited_[s] = 0;
  newer_[s] = kNoSlot;
  older_[s] = newest_;
  if (newest_ != kNoSlot) newer_[newest_] = s;
  newest_ = s;
  if (oldest_ == kNoSlot) oldest_ = s;
}

void SievePolicy::on_evict(const CacheState&, Slot s) {
  if (hand_ == s) hand_ = newer_[s];
  const Slot n = newer_[s];
  const Slot o = older_[s];
  if (n != kNoSlot) older_[n] = o; else newest_ = o;
  if (o != kNoSlot) newer_[o] = n; else oldest_ = n;
  newer_[s] = older_[s] = kNoSlot;
  visited_[s] = 0;
}

Slot SievePolicy::victim(const CacheState&) {
  if (oldest_ == kNoSlot) throw InternalError("SIEVE victim requested from an empty cache");
  Slot s = hand_ != kNoSlot ? hand_ : oldest_;
  while (visited_[s]) {
    visited_[s] = 0;
    s = newer_[s] != kNoSlot ? newer_[s] : oldest_;
  }
  hand_ = newer_[s];
  return s;
}

// ---- Belady -----------------------------------------------------------------

BeladyPolicy::BeladyPolicy(const PolicyContext& ctx)
    : next_use_(ctx.main_stream.size(), kNever), slot_next_(ctx.trace.slot_count(), kNever) {
  std::vector<std::uint64_t> seen(ctx.trace.slot_count(), kNever);
  for (std::size_t k = ctx.main_stream.size(); k-- > 0;) {
    const Slot s = ctx.trace.slot[ctx.main_stream[k]];
    next_use_[k] = seen[s];
    seen[s] = k;
  }
}

void BeladyPolicy::on_request(const CacheState& state, const Request& r, bool hit) {
  if (hit) order_.erase({slot_next_[r.slot], state.last_access(r.slot), r.slot});
  slot_next_[r.slot] = next_use_[r.position];
}

void BeladyPolicy::on_hit(const CacheState& state, const Request& r) {
  order_.insert({slot_next_[r.slot], state.last_access(r.slot), r.slot});
}

void BeladyPolicy::on_insert(const CacheState& state, const Request& r) {
  order_.insert({slot_next_[r.slot], state.last_access(r.slot), r.slot});
}

void BeladyPolicy::on_evict(const CacheState& state, Slot s) {
  order_.erase({slot_next_[s], state.last_access(s), s});
}

Slot BeladyPolicy::victim(const CacheState&) {
  if (order_.empty()) throw InternalError("Belady victim requested from an empty cache");
  return std::get<2>(*order_.begin());
}

// ---- Static optimal ---------------------------------------------------------

StaticOptimalPolicy::StaticOptimalPolicy(const PolicyParams& params, const PolicyContext& ctx)
    : member_(ctx.trace.slot_count(), 0) {
  const auto& tr = ctx.trace;
  std::vector<double> rates(tr.slot_count(), 0.0);
  std::vector<std::uint8_t> referenced(tr.slot_count(), 0);
  for (auto s : tr.slot) referenced[s] = 1;
  for (Slot s = 0; s < tr.slot_count(); ++s) {
    auto it = params.static_rates.find(tr.keys[s]);
    if (it != params.static_rates.end()) {
      rates[s] = it->second;
    } else if (referenced[s]) {
      throw ConfigError("STATIC_OPT: missing rate for object " + std::to_string(tr.keys[s].id));
    }
  }
  const auto sel = static_optimal_select(tr.sizes, rates, ctx.capacity);
  for (auto i : sel.chosen) member_[i] = 1;
  exact_ = sel.exact;
}

Slot StaticOptimalPolicy::victim(const CacheState& state) {
  if (state.empty()) throw InternalError("STATIC_OPT victim requested from an empty cache");
  return state.least_recent();
}

// ---- LFRU / LFRUS -----------------------------------------------------------

LfruPolicy::LfruPolicy(const PolicyContext& ctx, std::uint32_t window, double gamma)
    : tracker_(ctx.trace.client_count(), ctx.trace.slot_count(), window, gamma),
      owner_(ctx.trace.slot_count(), kNoClient),
      newer_(ctx.trace.slot_count(), kNoSlot),
      older_(ctx.trace.slot_count(), kNoSlot),
      list_newest_(ctx.trace.client_count(), kNoSlot),
      list_oldest_(ctx.trace.client_count(), kNoSlot) {}

std::string LfruPolicy::name() const {
  if (!tracker_.smoothed()) return "LFRU(w=" + std::to_string(tracker_.window_param()) + ")";
  return "LFRUS(w=" + std::to_string(tracker_.window_param()) +
         ",gamma=" + text::format_double(tracker_.gamma()) + ")";
}

void LfruPolicy::attach(Slot s, std::uint32_t client) {
  owner_[s] = client;
  newer_[s] = kNoSlot;
  older_[s] = list_newest_[client];
  if (list_newest_[client] != kNoSlot) newer_[list_newest_[client]] = s;
  list_newest_[client] = s;
  if (list_oldest_[client] == kNoSlot) list_oldest_[client] = s;
}

void LfruPolicy::detach(Slot s) {
  const auto c = owner_[s];
  const Slot n = newer_[s];
  const Slot o = older_[s];
  if (n != kNoSlot) older_[n] = o; else list_newest_[c] = o;
  if (o != kNoSlot) newer_[o] = n; else list_oldest_[c] = n;
  newer_[s] = older_[s] = kNoSlot;
  owner_[s] = kNoClient;
}

void LfruPolicy::on_request(const CacheState&, const Request& r, bool hit) {
  tracker_.record(r.client, r.slot, hit);
}

void LfruPolicy::on_hit(const CacheState&, const Request& r) {
  detach(r.slot);
  attach(r.slot, r.client);
}

void LfruPolicy::on_insert(const CacheState&, const Request& r) { attach(r.slot, r.client); }

void LfruPolicy::on_evict(const CacheState&, Slot s) { detach(s); }

Slot LfruPolicy::victim(const CacheState& state) {
  const auto scores = tracker_.row_scores();
  Slot best = kNoSlot;
  std::uint32_t best_score = 0;
  std::uint64_t best_stamp = 0;
  for (std::uint32_t c = 0; c < list_oldest_.size(); ++c) {
    const Slot s = list_oldest_[c];
    if (s == kNoSlot) continue;
    const auto score = scores[c];
    const auto stamp = state.last_access(s);
    if (best == kNoSlot || score < best_score || (score == best_score && stamp < best_stamp)) {
      best = s;
      best_score = score;
      best_stamp = stamp;
    }
  }
  if (best == kNoSlot) throw InternalError("LFRU victim requested from an empty cache");
  return best;
}

// ---- construction & parsing -------------------------------------------------

void validate_params(const PolicyParams& p) {
  if (p.kind == PolicyKind::kLfrus && !(p.gamma > 0.0 && p.gamma <= 1.0)) {
    throw ConfigError("LFRUS gamma must lie in (0, 1]");
  }
  if (p.kind == PolicyKind::kStaticOpt && p.static_rates.empty()) {
    throw ConfigError("STATIC_OPT requires request rates");
  }
}

std::unique_ptr<EvictionPolicy> make_policy(const PolicyParams& params, const PolicyContext& ctx) {
  validate_params(params);
  switch (params.kind) {
    case PolicyKind::kLru:
      return std::make_unique<LruPolicy>();
    case PolicyKind::kLfu:
      return std::make_unique<LfuPolicy>(ctx.trace.slot_count());
    case PolicyKind::kSieve:
      return std::make_unique<SievePolicy>(ctx.trace.slot_count());
    case PolicyKind::kBelady:
      if (!ctx.trace.uniform_sizes()) {
        throw ConfigError("BELADY requires a trace whose objects all have the same size");
      }
      return std::make_unique<BeladyPolicy>(ctx);
    case PolicyKind::kStaticOpt:
      return std::make_unique<StaticOptimalPolicy>(params, ctx);
    case PolicyKind::kLfru:
      return std::make_unique<LfruPolicy>(ctx, params.window, 1.0);
    case PolicyKind::kLfrus:
      return std::make_unique<LfruPolicy>(ctx, params.window, params.gamma);
  }
  throw InternalError("unknown policy kind");
}

PolicyParams parse_policy(std::string_view spec) {
  spec = text::trim(spec);
  std::string name;
  std::string_view args;
  if (auto open = spec.find('('); open != std::string_view::npos) {
    if (spec.back() != ')') throw ConfigError("malformed policy '" + std::string(spec) + "'");
    name = std::string(text::trim(spec.substr(0, open)));
    args = spec.substr(open + 1, spec.size() - open - 2);
  } else {
    name = std::string(spec);
  }
  std::transform(name.begin(), name.end(), name.begin(), [](unsigned char c) { return std::toupper(c); });

  std::optional<std::uint32_t> w;
  std::optional<double> gamma;
  if (!text::trim(args).empty()) {
    for (auto kv : text::split(args, ',')) {
      auto eq = kv.find('=');
      if (eq == std::string_view::npos) throw ConfigError("policy argument without '=': " + std::string(kv));
      auto key = text::trim(kv.substr(0, eq));
      auto val = text::trim(kv.substr(eq + 1));
      if (key == "w") {
        auto v = text::parse_uint(val);
        if (!v || *v > UINT32_MAX) throw ConfigError("bad window '" + std::string(val) + "'");
        w = static_cast<std::uint32_t>(*v);
      } else if (key == "gamma") {
        gamma = text::parse_double(val);
        if (!gamma) throw ConfigError("bad gamma '" + std::string(val) + "'");
      } else {
        throw ConfigError("unknown policy argument '" + std::string(key) + "'");
      }
    }
  }

  auto no_args = [&](PolicyParams p) {
    if (w || gamma) throw ConfigError(name + " takes no arguments");
    return p;
  };
  if (name == "LRU") return no_args(PolicyParams::lru());
  if (name == "LFU") return no_args(PolicyParams::lfu());
  if (name == "SIEVE") return no_args(PolicyParams::sieve());
  if (name == "BELADY") return no_args(PolicyParams::belady());
  if (name == "STATIC_OPT") return no_args(PolicyParams::of(PolicyKind::kStaticOpt));
  if (name == "LFRU") {
    if (!w) throw ConfigError("LFRU requires w, e.g. LFRU(w=20)");
    if (gamma) throw ConfigError("LFRU takes no gamma; use LFRUS");
    return PolicyParams::lfru(*w);
  }
  if (name == "LFRUS") {
    if (!w || !gamma) throw ConfigError("LFRUS requires w and gamma, e.g. LFRUS(w=2,gamma=0.5)");
    auto p = PolicyParams::lfrus(*w, *gamma);
    validate_params(p);
    return p;
  }
  throw ConfigError("unknown policy '" + std::string(spec) +
                    "' (known: LRU, LFU, SIEVE, BELADY, STATIC_OPT, LFRU(w=..), LFRUS(w=..,gamma=..))");
}

std::string policy_label(const PolicyParams& p) {
  switch (p.kind) {
    case PolicyKind::kLru: return "LRU";
    case PolicyKind::kLfu: return "LFU";
    case PolicyKind::kSieve: return "SIEVE";
    case PolicyKind::kBelady: return "BELADY";
    case PolicyKind::kStaticOpt: return "STATIC_OPT";
    case PolicyKind::kLfru: return "LFRU(w=" + std::to_string(p.window) + ")";
    case PolicyKind::kLfrus:
      return "LFRUS(w=" + std::to_string(p.window) + ",gamma=" + text::format_double(p.gamma) + ")";
  }
  return "?";
}

}  // namespace corrcache
