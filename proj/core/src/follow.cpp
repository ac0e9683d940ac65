#include "corrcache/follow.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include "corrcache/errors.hpp"

namespace corrcache {

std::vector<std::uint32_t> lfrus_column(std::span<const std::int32_t> outcomes, double gamma,
                                        std::size_t clients) {
  std::vector<double> acc(clients, 0.0);
  double weight = 1.0;
  for (auto it = outcomes.rbegin(); it != outcomes.rend(); ++it) {
    if (*it != kNotFollowing) acc.at(static_cast<std::size_t>(*it)) += weight;
    weight *= gamma;
  }
  std::vector<std::uint32_t> column(clients);
  for (std::size_t c = 0; c < clients; ++c) column[c] = static_cast<std::uint32_t>(std::floor(acc[c]));
  return column;
}

FollowTracker::FollowTracker(std::size_t clients, std::size_t slots, std::uint32_t window, double gamma)
    : clients_(clients),
      w_(window),
      cap_(std::size_t{window} + 1),
      gamma_(gamma),
      last_requester_(slots, kNoClient),
      ring_(clients * cap_, kNotFollowing),
      ring_head_(clients, 0),
      ring_len_(clients, 0),
      counts_(clients * clients, 0),
      matrix_(clients * clients, 0),
      row_scores_(clients, 0) {
  if (!(gamma > 0.0 && gamma <= 1.0)) throw ConfigError("gamma must lie in (0, 1]");
}

void FollowTracker::record(std::uint32_t client, Slot slot, bool hit) {
  std::int32_t outcome = kNotFollowing;
  const std::uint32_t prev = last_requester_[slot];
  if (hit && prev != kNoClient && prev != client) outcome = static_cast<std::int32_t>(prev);
  last_requester_[slot] = client;

  auto* buf = ring_.data() + std::size_t{client} * cap_;
  auto& head = ring_head_[client];
  auto& len = ring_len_[client];
  if (len == cap_) {
    const std::int32_t dropped = buf[head];
    if (dropped != kNotFollowing) --counts_[static_cast<std::size_t>(dropped) * clients_ + client];
    buf[head] = outcome;
    head = (head + 1) % cap_;
  } else {
    buf[(head + len) % cap_] = outcome;
    ++len;
  }
  if (outcome != kNotFollowing) ++counts_[static_cast<std::size_t>(outcome) * clients_ + client];
  dirty_ = true;
}

std::vector<std::int32_t> FollowTracker::window(std::uint32_t client) const {
  std::vector<std::int32_t> out;
  out.reserve(ring_len_[client]);
  const auto* buf = ring_.data() + std::size_t{client} * cap_;
  for (std::size_t k = 0; k < ring_len_[client]; ++k) out.push_back(buf[(ring_head_[client] + k) % cap_]);
  return out;
}

void FollowTracker::refresh() const {
  if (!dirty_) return;
  if (!smoothed()) {
    matrix_ = counts_;
  } else {
    for (std::uint32_t c2 = 0; c2 < clients_; ++c2) {
      const auto column = lfrus_column(window(c2), gamma_, clients_);
      for (std::size_t c1 = 0; c1 < clients_; ++c1) matrix_[c1 * clients_ + c2] = column[c1];
    }
  }
  for (std::size_t c1 = 0; c1 < clients_; ++c1) {
    const auto* row = matrix_.data() + c1 * clients_;
    row_scores_[c1] = clients_ ? *std::max_element(row, row + clients_) : 0;
  }
  dirty_ = false;
}

std::uint32_t FollowTracker::entry(std::uint32_t c1, std::uint32_t c2) const {
  refresh();
  return matrix_[std::size_t{c1} * clients_ + c2];
}

std::span<const std::uint32_t> FollowTracker::row_scores() const {
  refresh();
  return row_scores_;
}

void write_follow_matrix_csv(const FollowTracker& tracker, std::span<const std::uint32_t> client_ids,
                             std::ostream& out) {
  for (std::uint32_t c1 = 0; c1 < tracker.clients(); ++c1) {
    for (std::uint32_t c2 = 0; c2 < tracker.clients(); ++c2) {
      if (const auto v = tracker.entry(c1, c2); v != 0) {
        out << client_ids[c1] << ',' << client_ids[c2] << ',' << v << '\n';
      }
    }
  }
}

}  // namespace corrcache
