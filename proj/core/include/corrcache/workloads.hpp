#pragma once

#include <cstdint>
#include <random>
#include <string>
#include <variant>
#include <vector>

#include "corrcache/trace.hpp"

namespace corrcache {

// p(d) = d^-s / sum_k k^-s for d = 1..count (index 0 holds rank 1).
std::vector<double> zipf_pmf(std::size_t count, double s);

// Independent generator stream for (seed, a, b). Generators draw each kind of
// randomness (arrivals, objects, each follower's delays) from its own stream,
// so variants that differ in one knob still share the rest.
std::mt19937_64 stream_rng(std::uint64_t seed, std::uint64_t a, std::uint64_t b);

// Delay_i = i * step, i = 1..f.
struct StructuredDelay {
  double step = 0.0;
};
// Delay_i = values[i-1], constant.
struct FixedDelays {
  std::vector<double> values;
};
// Delay_i ~ U[lo[i-1], hi[i-1]], independent across followers and requests.
struct UniformDelays {
  std::vector<double> lo;
  std::vector<double> hi;
  bool iid() const;
};
// Delay_i = i * step + J with one J ~ U[-jitter, jitter] shared by all
// followers of a request. The followers' delays are dependent, so the
// analysis evaluates this family by Monte Carlo.
struct JointDelays {
  double step = 0.0;
  double jitter = 0.0;
};

using DelaySpec = std::variant<StructuredDelay, FixedDelays, UniformDelays, JointDelays>;

// Draws the delay vector of one leader request into `out` (size = followers).
void sample_joint(const JointDelays& d, std::size_t followers, std::mt19937_64& rng, std::vector<double>& out);

struct GroupSpec {
  std::uint32_t first_object = 1;  // objects first_object .. first_object+object_count-1
  std::uint32_t object_count = 0;
  double leader_rate = 0.0;        // lambda^g
  double zipf_s = 1.0;
  std::uint32_t followers = 0;     // f^g
  DelaySpec delays = StructuredDelay{1.0};

  // Uniform delays with identical bounds for every follower (or no followers).
  bool iid_followers() const;
};

enum class SizeRule {
  kUnit,     // every object 1
  kEvenOdd,  // even ids 2, odd ids 5
};

struct GroupedWorkload {
  std::string name = "grouped";
  std::vector<GroupSpec> groups;
  double horizon = 0.0;
  SizeRule sizes = SizeRule::kUnit;
  // Rescale leader rates so they sum to 1 while keeping their proportions.
  bool normalize_rates = false;

  double effective_rate(std::size_t g) const;
  // Sum over groups of lambda^g (1 + f^g), with effective rates.
  double total_request_rate() const;
  std::uint32_t client_count() const;
  // External id of the leader of group g; follower i (1-based) is leader + i.
  std::uint32_t leader_client(std::size_t g) const;
  ObjectCatalog catalog() const;
  void validate() const;
};

std::uint64_t object_size(SizeRule rule, std::uint32_t id);

// Leader arrivals are Poisson on [0, horizon]; each follower event at
// A_n + Delta_i is kept iff its time is >= 0 (it may exceed the horizon).
Trace gen_grouped_trace(const GroupedWorkload& w, std::uint64_t seed);

}  // namespace corrcache
