#pragma once

#include <cstdint>
#include <span>
#include <string_view>
#include <vector>

namespace corrcache {

struct StaticSelection {
  std::vector<std::uint32_t> chosen;  // indices into the input arrays, ascending
  double objective = 0.0;             // sum of weighted rates over `chosen`
  std::uint64_t used_bytes = 0;
  bool exact = true;                  // false when the density-greedy fallback ran
  std::string_view method;            // "top-k", "branch-and-bound", "greedy"
};

inline constexpr std::size_t kStaticExactLimit = 25;

// Maximises sum_d rate(d) x(d) subject to sum_d size(d) x(d) <= capacity,
// x(d) in {0,1}, where rate(d) = sum_g lambda^g(d) (1 + f^g).
//
// Exact when all sizes are equal (top-k by rate) or when at most
// kStaticExactLimit objects are candidates (branch and bound); otherwise a
// density-greedy heuristic, reported through `exact`.
StaticSelection static_optimal_select(std::span<const std::uint64_t> sizes,
                                      std::span<const double> weighted_rates, std::uint64_t capacity);

}  // namespace corrcache
