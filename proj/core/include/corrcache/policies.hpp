#pragma once

#include <cstdint>
#include <set>
#include <tuple>
#include <utility>
#include <vector>

#include "corrcache/follow.hpp"
#include "corrcache/policy.hpp"

namespace corrcache {

class LruPolicy final : public EvictionPolicy {
 public:
  std::string name() const override { return "LRU"; }
  Slot victim(const CacheState& state) override;
};

// Minimal lifetime request count; ties go to the least recently used.
class LfuPolicy final : public EvictionPolicy {
 public:
  explicit LfuPolicy(std::size_t slots) : counts_(slots, 0) {}

  std::string name() const override { return "LFU"; }
  void on_request(const CacheState& state, const Request& r, bool hit) override;
  void on_hit(const CacheState& state, const Request& r) override;
  void on_insert(const CacheState& state, const Request& r) override;
  void on_evict(const CacheState& state, Slot s) override;
  Slot victim(const CacheState& state) override;

  std::uint64_t count(Slot s) const { return counts_[s]; }

 private:
  using Key = std::tuple<std::uint64_t, std::uint64_t, Slot>;  // count, last access, slot
  std::vector<std::uint64_t> counts_;
  std::set<Key> order_;
};

// SIEVE: FIFO queue with visited bits and a hand that sweeps from the oldest
// entry toward newer ones, clearing visited bits, and wraps to the oldest end.
class SievePolicy final : public EvictionPolicy {
 public:
  explicit SievePolicy(std::size_t slots);

  std::string name() const override { return "SIEVE"; }
  void on_hit(const CacheState& state, const Request& r) override;
  void on_insert(const CacheState& state, const Request& r) override;
  void on_evict(const CacheState& state, Slot s) override;
  Slot victim(const CacheState& state) override;

  bool visited(Slot s) const { return visited_[s] != 0; }
  Slot hand() const { return hand_; }

 private:
  std::vector<std::uint8_t> visited_;
  std::vector<Slot> newer_;
  std::vector<Slot> older_;
  Slot newest_ = kNoSlot;
  Slot oldest_ = kNoSlot;
  Slot hand_ = kNoSlot;
};

// Offline optimal for equal sizes: evict the resident item whose next
// main-cache request is furthest away (never requested again beats all);
// ties go to the least recently used.
class BeladyPolicy final : public EvictionPolicy {
 public:
  explicit BeladyPolicy(const PolicyContext& ctx);

  std::string name() const override { return "BELADY"; }
  void on_request(const CacheState& state, const Request& r, bool hit) override;
  void on_hit(const CacheState& state, const Request& r) override;
  void on_insert(const CacheState& state, const Request& r) override;
  void on_evict(const CacheState& state, Slot s) override;
  Slot victim(const CacheState& state) override;

  static constexpr std::uint64_t kNever = ~std::uint64_t{0};
  // next_use[k]: position of the next main-cache request for the slot
  // requested at position k, or kNever.
  const std::vector<std::uint64_t>& next_use() const { return next_use_; }

 private:
  using Key = std::tuple<std::uint64_t, std::uint64_t, Slot>;  // next use, last access, slot
  struct Order {
    bool operator()(const Key& a, const Key& b) const {
      if (std::get<0>(a) != std::get<0>(b)) return std::get<0>(a) > std::get<0>(b);
      return std::get<1>(a) < std::get<1>(b);
    }
  };
  std::vector<std::uint64_t> next_use_;
  std::vector<std::uint64_t> slot_next_;
  std::set<Key, Order> order_;
};

// Fixed placement chosen by static_optimal_select. Only members of the set
// are admitted; they are never evicted while the set fits.
class StaticOptimalPolicy final : public EvictionPolicy {
 public:
  StaticOptimalPolicy(const PolicyParams& params, const PolicyContext& ctx);

  std::string name() const override { return "STATIC_OPT"; }
  bool admits(Slot s) const override { return member_[s] != 0; }
  Slot victim(const CacheState& state) override;

  bool exact() const { return exact_; }

 private:
  std::vector<std::uint8_t> member_;
  bool exact_ = true;
};

// LFRU(w) and LFRUS(w, gamma). Every resident item is associated with the
// client that requested it last. The victim is the least recently used item
// among those whose associated client has the smallest row score
// max_c2 F[c][c2].
class LfruPolicy final : public EvictionPolicy {
 public:
  LfruPolicy(const PolicyContext& ctx, std::uint32_t window, double gamma);

  std::string name() const override;
  void on_request(const CacheState& state, const Request& r, bool hit) override;
  void on_hit(const CacheState& state, const Request& r) override;
  void on_insert(const CacheState& state, const Request& r) override;
  void on_evict(const CacheState& state, Slot s) override;
  Slot victim(const CacheState& state) override;

  const FollowTracker& tracker() const { return tracker_; }
  std::uint32_t owner(Slot s) const { return owner_[s]; }

 private:
  void attach(Slot s, std::uint32_t client);
  void detach(Slot s);

  FollowTracker tracker_;
  // Per-client recency lists of resident items associated with that client.
  std::vector<std::uint32_t> owner_;
  std::vector<Slot> newer_;
  std::vector<Slot> older_;
  std::vector<Slot> list_newest_;
  std::vector<Slot> list_oldest_;
};

}  // namespace corrcache
