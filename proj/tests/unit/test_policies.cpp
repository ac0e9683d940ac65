#include <gtest/gtest.h>

#include "corrcache/cache_engine.hpp"
#include "corrcache/errors.hpp"
#include "corrcache/policies.hpp"
#include "oracles.hpp"

using namespace corrcache;
using oracle::Ev;

namespace {

// Objects evicted over the whole run, in order.
std::vector<std::uint32_t> victims(const oracle::Run& r) {
  std::vector<std::uint32_t> out;
  for (const auto& e : r.evicted) out.insert(out.end(), e.begin(), e.end());
  return out;
}

std::vector<Ev> one_client(std::initializer_list<std::uint32_t> objects) {
  std::vector<Ev> evs;
  for (auto d : objects) evs.push_back({1, d});
  return evs;
}

void expect_same(const oracle::Run& a, const oracle::Run& b) {
  ASSERT_EQ(a.hit.size(), b.hit.size());
  for (std::size_t n = 0; n < a.hit.size(); ++n) {
    ASSERT_EQ(a.hit[n], b.hit[n]) << "event " << n;
    ASSERT_EQ(a.evicted[n], b.evicted[n]) << "event " << n;
  }
}

}  // namespace

TEST(Lru, Examples) {
  EXPECT_EQ(victims(oracle::engine(oracle::to_trace(one_client({1, 2, 3, 4})), PolicyParams::lru(), 3)),
            std::vector<std::uint32_t>{1});
  EXPECT_EQ(victims(oracle::engine(oracle::to_trace(one_client({1, 2, 1, 3})), PolicyParams::lru(), 2)),
            std::vector<std::uint32_t>{2});
}

TEST(Lfu, Examples) {
  EXPECT_EQ(victims(oracle::engine(oracle::to_trace(one_client({1, 1, 1, 2, 3})), PolicyParams::lfu(), 2)),
            std::vector<std::uint32_t>{2});
  // equal counts: least recently used goes
  EXPECT_EQ(victims(oracle::engine(oracle::to_trace(one_client({1, 2, 2, 1, 3})), PolicyParams::lfu(), 2)),
            std::vector<std::uint32_t>{2});
}

TEST(Lfu, CountsSurviveEviction) {
  // d1 is requested 3 times, evicted, and comes back with count 4
  const auto r = oracle::engine(oracle::to_trace(one_client({1, 1, 1, 2, 3, 3, 1, 2, 4})), PolicyParams::lfu(), 2);
  EXPECT_EQ(victims(r), victims(oracle::lfu(one_client({1, 1, 1, 2, 3, 3, 1, 2, 4}), 2)));
}

TEST(Sieve, OldestUnvisitedGoesFirst) {
  EXPECT_EQ(victims(oracle::engine(oracle::to_trace(one_client({1, 2, 3, 4})), PolicyParams::sieve(), 3)),
            std::vector<std::uint32_t>{1});
}

TEST(Sieve, VisitedBitIsClearedOnPass) {
  const auto compiled = compile_trace(oracle::to_trace(one_client({1, 2, 1, 3})));
  CacheSimulator sim(compiled, PolicyParams::sieve(), CacheConfig{2, 0.0});
  std::vector<Slot> ev;
  while (!sim.done()) {
    const auto& o = sim.step();
    ev.insert(ev.end(), o.evicted.begin(), o.evicted.end());
  }
  ASSERT_EQ(ev.size(), 1u);
  EXPECT_EQ(compiled.keys[ev[0]].id, 2u);
  const auto& sieve = dynamic_cast<const SievePolicy&>(sim.policy());
  EXPECT_FALSE(sieve.visited(0));  // d1 survived but lost its bit
}

TEST(Sieve, AllVisitedEvictsOldestAfterFullPass) {
  EXPECT_EQ(
      victims(oracle::engine(oracle::to_trace(one_client({1, 2, 3, 1, 2, 3, 4})), PolicyParams::sieve(), 3)),
      std::vector<std::uint32_t>{1});
}

TEST(Sieve, HandContinuesFromLastPosition) {
  // d1 is spared once and the hand stays past d2, so d3 goes before d1
  EXPECT_EQ(victims(oracle::engine(oracle::to_trace(one_client({1, 2, 3, 1, 4, 5})), PolicyParams::sieve(), 3)),
            (std::vector<std::uint32_t>{2, 3}));
}

TEST(Belady, Examples) {
  EXPECT_EQ(victims(oracle::engine(oracle::to_trace(one_client({1, 2, 3, 1, 2, 4})), PolicyParams::belady(), 2)),
            (std::vector<std::uint32_t>{2, 3, 1}));
  // never-used-again beats any finite next use
  EXPECT_EQ(victims(oracle::engine(oracle::to_trace(one_client({1, 2, 3, 1})), PolicyParams::belady(), 2)),
            std::vector<std::uint32_t>{2});
}

TEST(Lfru, FollowedOwnerIsProtected) {
  const std::vector<Ev> evs{{1, 1}, {1, 2}, {2, 1}, {3, 3}};
  EXPECT_EQ(victims(oracle::engine(oracle::to_trace(evs), PolicyParams::lru(), 2)), std::vector<std::uint32_t>{2});
  EXPECT_EQ(victims(oracle::engine(oracle::to_trace(evs), PolicyParams::lfru(2), 2)), std::vector<std::uint32_t>{1});
}

TEST(Lfru, WindowZeroStillSeesTheCurrentFollow) {
  // w = 0 keeps the newest outcome, which can already reorder evictions
  const std::vector<Ev> evs{{1, 2}, {1, 1}, {2, 1}, {3, 3}};
  EXPECT_EQ(victims(oracle::engine(oracle::to_trace(evs), PolicyParams::lru(), 2)), std::vector<std::uint32_t>{2});
  EXPECT_EQ(victims(oracle::engine(oracle::to_trace(evs), PolicyParams::lfru(0), 2)), std::vector<std::uint32_t>{1});
}

TEST(Lfru, HitFreeTraceMatchesLru) {
  // cyclic scan larger than the cache never hits under LRU
  std::vector<Ev> evs;
  std::mt19937_64 rng(4);
  for (std::uint32_t n = 0; n < 2000; ++n) evs.push_back({1 + static_cast<std::uint32_t>(rng() % 5), 1 + n % 13});
  const auto t = oracle::to_trace(evs);
  const auto lru = oracle::engine(t, PolicyParams::lru(), 12);
  EXPECT_EQ(lru.hits, 0u);
  for (std::uint32_t w : {0u, 1u, 20u}) expect_same(oracle::engine(t, PolicyParams::lfru(w), 12), lru);
}

TEST(Lfru, GammaOneMatchesPlain) {
  std::mt19937_64 rng(8);
  for (int k = 0; k < 10; ++k) {
    const auto t = oracle::to_trace(oracle::random_events(3000, 6, 80, rng, 0.9));
    expect_same(oracle::engine(t, PolicyParams::lfrus(3, 1.0), 15), oracle::engine(t, PolicyParams::lfru(3), 15));
  }
}

TEST(Lfru, MatchesFromScratchOracle) {
  std::mt19937_64 rng(17);
  for (std::uint32_t w : {0u, 1u, 3u, 20u}) {
    for (double gamma : {1.0, 0.5, 0.9}) {
      const auto evs = oracle::random_events(1500, 5, 40, rng, 0.8);
      const auto t = oracle::to_trace(evs);
      const auto p = gamma < 1.0 ? PolicyParams::lfrus(w, gamma) : PolicyParams::lfru(w);
      expect_same(oracle::engine(t, p, 10), oracle::lfru(evs, 10, w, gamma));
    }
  }
}

TEST(Reference, LruLfuSieveBeladyMatchNaive) {
  std::mt19937_64 rng(99);
  for (int k = 0; k < 20; ++k) {
    const auto evs = oracle::random_events(2000, 3, 60, rng, k % 2 ? 0.9 : 0.0);
    const auto t = oracle::to_trace(evs);
    const std::uint64_t cap = 5 + static_cast<std::uint64_t>(k);
    expect_same(oracle::engine(t, PolicyParams::lru(), cap), oracle::lru(evs, cap));
    expect_same(oracle::engine(t, PolicyParams::lfu(), cap), oracle::lfu(evs, cap));
    expect_same(oracle::engine(t, PolicyParams::sieve(), cap), oracle::sieve(evs, cap));
    expect_same(oracle::engine(t, PolicyParams::belady(), cap), oracle::belady(evs, cap));
  }
}

TEST(Reference, VariableSizesMatchNaive) {
  std::mt19937_64 rng(7);
  oracle::Sizes sizes;
  for (std::uint32_t d = 1; d <= 50; ++d) sizes[d] = 1 + rng() % 6;
  for (int k = 0; k < 10; ++k) {
    const auto evs = oracle::random_events(2000, 3, 50, rng, 0.8);
    const auto t = oracle::to_trace(evs, sizes);
    expect_same(oracle::engine(t, PolicyParams::lru(), 30), oracle::lru(evs, 30, sizes));
    expect_same(oracle::engine(t, PolicyParams::lfu(), 30), oracle::lfu(evs, 30, sizes));
    expect_same(oracle::engine(t, PolicyParams::sieve(), 30), oracle::sieve(evs, 30, sizes));
  }
}

TEST(Belady, DominatesOnlinePolicies) {
  std::mt19937_64 rng(31);
  for (int k = 0; k < 10; ++k) {
    const auto t = oracle::to_trace(oracle::random_events(1000, 4, 50, rng, 0.7));
    for (std::uint64_t cap : {2u, 5u, 10u, 25u}) {
      const auto best = oracle::engine(t, PolicyParams::belady(), cap).hits;
      for (const auto& p : {PolicyParams::lru(), PolicyParams::lfu(), PolicyParams::sieve(), PolicyParams::lfru(2),
                            PolicyParams::lfrus(2, 0.5)}) {
        EXPECT_GE(best, oracle::engine(t, p, cap).hits) << policy_label(p) << " cap " << cap;
      }
    }
  }
}

TEST(StaticOpt, KeepsTheChosenSet) {
  // rates favour d1 and d2; d3 is never admitted
  const auto t = oracle::to_trace(one_client({3, 1, 2, 3, 1, 3, 2}));
  std::map<ObjectKey, double> rates{{{1}, 5.0}, {{2}, 3.0}, {{3}, 1.0}};
  const auto r = oracle::engine(t, PolicyParams::static_opt(rates), 2);
  EXPECT_EQ(r.hits, 2u);
  EXPECT_TRUE(victims(r).empty());
}

TEST(StaticOpt, MissingRateIsConfigError) {
  const auto t = oracle::to_trace(one_client({1, 2}));
  std::map<ObjectKey, double> rates{{{1}, 5.0}};
  EXPECT_THROW(oracle::engine(t, PolicyParams::static_opt(rates), 1), ConfigError);
  EXPECT_THROW(oracle::engine(t, PolicyParams::static_opt({}), 1), ConfigError);
}

TEST(ParsePolicy, Names) {
  EXPECT_EQ(parse_policy("lru").kind, PolicyKind::kLru);
  EXPECT_EQ(parse_policy("Sieve").kind, PolicyKind::kSieve);
  const auto p = parse_policy("LFRUS(w=2, gamma=0.5)");
  EXPECT_EQ(p.kind, PolicyKind::kLfrus);
  EXPECT_EQ(p.window, 2u);
  EXPECT_EQ(p.gamma, 0.5);
  EXPECT_EQ(policy_label(p), "LFRUS(w=2,gamma=0.5)");
  EXPECT_EQ(policy_label(parse_policy("LFRU(w=20)")), "LFRU(w=20)");
}

TEST(ParsePolicy, Errors) {
  for (const char* bad : {"MRU", "LFRU", "LFRU(w=-1)", "LFRU(w=2,gamma=0.5)", "LFRUS(w=2)", "LFRUS(w=2,gamma=0)",
                          "LFRUS(w=2,gamma=1.5)", "LRU(w=2)", "LFRU(w=2", ""}) {
    EXPECT_THROW(parse_policy(bad), ConfigError) << bad;
  }
}
