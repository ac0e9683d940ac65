#include <gtest/gtest.h>

#include <cmath>
#include <map>
#include <numeric>

#include "corrcache/errors.hpp"
#include "corrcache/trace.hpp"
#include "corrcache/workload_config.hpp"
#include "corrcache/workloads.hpp"

using namespace corrcache;

TEST(Zipf, Examples) {
  const auto u = zipf_pmf(4, 0.0);
  for (double p : u) EXPECT_DOUBLE_EQ(p, 0.25);
  const auto two = zipf_pmf(2, 1.0);
  EXPECT_NEAR(two[0], 2.0 / 3.0, 1e-15);
  EXPECT_NEAR(two[1], 1.0 / 3.0, 1e-15);
  const auto three = zipf_pmf(3, 2.0);
  EXPECT_NEAR(three[0], 36.0 / 49.0, 1e-15);
  EXPECT_NEAR(three[1], 9.0 / 49.0, 1e-15);
  EXPECT_NEAR(three[2], 4.0 / 49.0, 1e-15);
  const auto big = zipf_pmf(100000, 0.9);
  EXPECT_NEAR(std::accumulate(big.begin(), big.end(), 0.0), 1.0, 1e-12);
}

namespace {

GroupedWorkload one_group(std::uint32_t f, DelaySpec delays, double rate = 2.0, double horizon = 1000.0) {
  GroupedWorkload w;
  GroupSpec g;
  g.object_count = 20;
  g.leader_rate = rate;
  g.zipf_s = 1.0;
  g.followers = f;
  g.delays = std::move(delays);
  w.groups = {g};
  w.horizon = horizon;
  return w;
}

}  // namespace

TEST(GroupedTrace, NoFollowersIsIrm) {
  const auto t = gen_grouped_trace(one_group(0, StructuredDelay{1.0}), 1);
  ASSERT_FALSE(t.events.empty());
  for (const auto& e : t.events) EXPECT_EQ(e.client, ClientId{1});
  EXPECT_TRUE(validate_trace(t).ok());
}

TEST(GroupedTrace, StructuredFollowersReplayExactly) {
  const auto w = one_group(3, StructuredDelay{2.5});
  const auto t = gen_grouped_trace(w, 5);
  std::map<std::uint32_t, std::vector<RequestEvent>> by_client;
  for (const auto& e : t.events) by_client[to_index(e.client)].push_back(e);
  const auto& lead = by_client[1];
  for (std::uint32_t i = 1; i <= 3; ++i) {
    const auto& fol = by_client[1 + i];
    ASSERT_EQ(fol.size(), lead.size());
    for (std::size_t n = 0; n < lead.size(); ++n) {
      EXPECT_EQ(fol[n].object, lead[n].object);
      EXPECT_DOUBLE_EQ(fol[n].time, lead[n].time + 2.5 * i);
    }
  }
}

TEST(GroupedTrace, NegativeDelaysDropEarlyEvents) {
  UniformDelays u{{-10.0}, {-5.0}};
  const auto t = gen_grouped_trace(one_group(1, u), 2);
  std::size_t lead = 0, fol = 0;
  for (const auto& e : t.events) {
    EXPECT_GE(e.time, 0.0);
    (e.client == ClientId{1} ? lead : fol)++;
  }
  EXPECT_LT(fol, lead);
}

TEST(GroupedTrace, FollowerObjectMatchesLeader) {
  UniformDelays u{{0.0, 1.0}, {5.0, 8.0}};
  const auto t = gen_grouped_trace(one_group(2, u, 0.5), 3);
  // with rate 0.5 and short delays most follower events can be matched to the
  // latest leader event within their delay range
  std::vector<RequestEvent> lead;
  for (const auto& e : t.events) {
    if (e.client == ClientId{1}) lead.push_back(e);
  }
  for (const auto& e : t.events) {
    if (e.client == ClientId{1}) continue;
    const double lo = e.client == ClientId{2} ? 0.0 : 1.0;
    const double hi = e.client == ClientId{2} ? 5.0 : 8.0;
    bool found = false;
    for (const auto& l : lead) found = found || (l.object == e.object && e.time - l.time >= lo - 1e-9 && e.time - l.time <= hi + 1e-9);
    EXPECT_TRUE(found);
  }
}

TEST(GroupedTrace, RateOfSection41) {
  auto w = std::get<GroupedWorkload>(load_preset("grouped-4.1"));
  w.normalize_rates = false;
  w.horizon = 1e4;
  const auto t = gen_grouped_trace(w, 1);
  const double rate = static_cast<double>(t.events.size()) / w.horizon;
  EXPECT_NEAR(w.total_request_rate(), 295.0, 1e-9);
  EXPECT_NEAR(rate / 295.0, 1.0, 0.01);
  EXPECT_LE(trace_stats(t).distinct_objects, 3000u);
}

TEST(GroupedTrace, PoissonLeaderStream) {
  const auto t = gen_grouped_trace(one_group(0, StructuredDelay{1.0}, 4.0, 25000.0), 9);
  std::vector<double> gaps;
  for (std::size_t k = 1; k < t.events.size(); ++k) gaps.push_back(t.events[k].time - t.events[k - 1].time);
  const double n = static_cast<double>(gaps.size());
  ASSERT_GT(n, 1e5 - 2000);
  const double mean = std::accumulate(gaps.begin(), gaps.end(), 0.0) / n;
  double var = 0.0;
  for (double g : gaps) var += (g - mean) * (g - mean);
  var /= n - 1;
  // exponential(4): mean 0.25, sd 0.25; var has sd sqrt(8)/16 per sample
  EXPECT_NEAR(mean, 0.25, 3.0 * 0.25 / std::sqrt(n));
  EXPECT_NEAR(var, 0.0625, 3.0 * std::sqrt(8.0) * 0.0625 / std::sqrt(n));
}

TEST(GroupedTrace, PopularityChiSquare) {
  const auto w = one_group(0, StructuredDelay{1.0}, 10.0, 10000.0);
  const auto t = gen_grouped_trace(w, 4);
  const auto pmf = zipf_pmf(20, 1.0);
  std::vector<double> counts(20, 0.0);
  for (const auto& e : t.events) counts[e.object.id - 1] += 1.0;
  const double n = static_cast<double>(t.events.size());
  double chi2 = 0.0;
  for (std::size_t d = 0; d < 20; ++d) chi2 += std::pow(counts[d] - n * pmf[d], 2) / (n * pmf[d]);
  EXPECT_LT(chi2, 43.82);  // 99.9% quantile, 19 dof
}

TEST(GroupedTrace, Deterministic) {
  const auto w = std::get<GroupedWorkload>(load_preset("fig2-setup"));
  auto small = w;
  small.horizon = 50;
  const auto a = gen_grouped_trace(small, 11);
  const auto b = gen_grouped_trace(small, 11);
  EXPECT_EQ(a.events, b.events);
  EXPECT_EQ(a.metadata, b.metadata);
  EXPECT_NE(gen_grouped_trace(small, 12).events, a.events);
}

TEST(GroupedTrace, CommonRandomNumbersAcrossFollowerCounts) {
  // leader streams do not depend on the follower settings
  auto a = one_group(2, UniformDelays{{0.0, 0.0}, {60.0, 60.0}}, 1.0, 200.0);
  auto b = one_group(8, UniformDelays{std::vector<double>(8, 0.0), std::vector<double>(8, 60.0)}, 1.0, 200.0);
  std::vector<RequestEvent> la, lb;
  for (const auto& e : gen_grouped_trace(a, 3).events) {
    if (e.client == ClientId{1}) la.push_back(e);
  }
  for (const auto& e : gen_grouped_trace(b, 3).events) {
    if (e.client == ClientId{1}) lb.push_back(e);
  }
  EXPECT_EQ(la, lb);
}

TEST(GroupedWorkload, Validation) {
  auto w = one_group(1, StructuredDelay{0.0});
  EXPECT_THROW(w.validate(), ConfigError);
  w = one_group(2, UniformDelays{{5.0, 0.0}, {1.0, 1.0}});
  EXPECT_THROW(w.validate(), ConfigError);
  w = one_group(1, StructuredDelay{1.0});
  w.horizon = 0;
  EXPECT_THROW(w.validate(), ConfigError);
  w = one_group(1, FixedDelays{{1.0, 2.0}});
  EXPECT_THROW(w.validate(), ConfigError);
}

TEST(GroupedWorkload, ClientNumbering) {
  GroupedWorkload w;
  GroupSpec g1, g2;
  g1.object_count = g2.object_count = 5;
  g2.first_object = 6;
  g1.leader_rate = g2.leader_rate = 1;
  g1.followers = 3;
  g2.followers = 2;
  w.groups = {g1, g2};
  w.horizon = 1;
  EXPECT_EQ(w.client_count(), 7u);
  EXPECT_EQ(w.leader_client(0), 1u);
  EXPECT_EQ(w.leader_client(1), 5u);
}

TEST(GroupedWorkload, EvenOddSizes) {
  EXPECT_EQ(object_size(SizeRule::kEvenOdd, 2), 2u);
  EXPECT_EQ(object_size(SizeRule::kEvenOdd, 3), 5u);
  EXPECT_EQ(object_size(SizeRule::kUnit, 3), 1u);
}

TEST(JointDelays, SharedJitter) {
  std::mt19937_64 rng(1);
  std::vector<double> d;
  for (int k = 0; k < 100; ++k) {
    sample_joint(JointDelays{10.0, 3.0}, 3, rng, d);
    ASSERT_EQ(d.size(), 3u);
    EXPECT_NEAR(d[1] - d[0], 10.0, 1e-12);
    EXPECT_NEAR(d[2] - d[0], 20.0, 1e-12);
    EXPECT_LE(std::abs(d[0] - 10.0), 3.0);
  }
}
