#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <vector>

#include "corrcache/cache_state.hpp"

namespace corrcache {

// Outcome stored in a client's request window: index of the followed client,
// or kNotFollowing.
inline constexpr std::int32_t kNotFollowing = -1;

// Column of the smoothed following matrix for one follower c2:
// entry[c1] = floor(sum over window outcomes equal to c1 of gamma^lag), where
// lag 0 is the newest outcome. `outcomes` is ordered oldest first.
std::vector<std::uint32_t> lfrus_column(std::span<const std::int32_t> outcomes, double gamma,
                                        std::size_t clients);

// Following-event bookkeeping for LFRU/LFRUS.
//
// Each client keeps the outcomes of its last w+1 main-cache requests. A
// request by c2 that hits on an object last requested by a different client
// c1 is a following event with outcome c1. F[c1][c2] counts outcomes equal to
// c1 in c2's window (plain) or their gamma^lag-weighted sum, floored
// (smoothed). The last-requester index spans the whole run.
class FollowTracker {
 public:
  FollowTracker(std::size_t clients, std::size_t slots, std::uint32_t window, double gamma = 1.0);

  // Call once per main-cache request, after hit determination and before the
  // cache changes.
  void record(std::uint32_t client, Slot slot, bool hit);

  std::uint32_t entry(std::uint32_t c1, std::uint32_t c2) const;
  // max over c2 of F[c][c2], per client c.
  std::span<const std::uint32_t> row_scores() const;
  std::uint32_t last_requester(Slot s) const { return last_requester_[s]; }

  // Window of `client`, oldest first.
  std::vector<std::int32_t> window(std::uint32_t client) const;
  std::size_t clients() const noexcept { return clients_; }
  std::uint32_t window_param() const noexcept { return w_; }
  double gamma() const noexcept { return gamma_; }
  bool smoothed() const noexcept { return gamma_ < 1.0; }

 private:
  void refresh() const;

  std::size_t clients_;
  std::uint32_t w_;
  std::size_t cap_;  // w + 1
  double gamma_;
  std::vector<std::uint32_t> last_requester_;
  std::vector<std::int32_t> ring_;
  std::vector<std::size_t> ring_head_;  // index of the oldest entry
  std::vector<std::size_t> ring_len_;
  std::vector<std::uint32_t> counts_;  // plain counts, [c1 * clients + c2]

  mutable bool dirty_ = true;
  mutable std::vector<std::uint32_t> matrix_;
  mutable std::vector<std::uint32_t> row_scores_;
};

// CSV rows `c1,c2,count` for nonzero entries, client ids as given.
void write_follow_matrix_csv(const FollowTracker& tracker, std::span<const std::uint32_t> client_ids,
                             std::ostream& out);

}  // namespace corrcache
