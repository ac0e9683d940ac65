#pragma once

#include <cstdint>
#include <limits>
#include <span>
#include <vector>

namespace corrcache {

// Dense identity index into a compiled trace's object table.
using Slot = std::uint32_t;
inline constexpr Slot kNoSlot = std::numeric_limits<Slot>::max();
inline constexpr std::uint32_t kNoClient = std::numeric_limits<std::uint32_t>::max();

// Resident set M(t) of one byte-capacity cache with a most-recent to
// least-recent order kept as an intrusive doubly-linked list over slots.
class CacheState {
 public:
  CacheState(std::uint64_t capacity_bytes, std::span<const std::uint64_t> sizes);

  std::uint64_t capacity() const noexcept { return capacity_; }
  std::uint64_t used_bytes() const noexcept { return used_; }
  std::uint64_t free_bytes() const noexcept { return capacity_ - used_; }
  std::size_t resident_count() const noexcept { return count_; }
  bool empty() const noexcept { return count_ == 0; }
  std::size_t slot_count() const noexcept { return sizes_.size(); }

  bool resident(Slot s) const { return resident_[s] != 0; }
  std::uint64_t size_of(Slot s) const { return sizes_[s]; }

  Slot most_recent() const noexcept { return head_; }
  Slot least_recent() const noexcept { return tail_; }
  // Neighbours in recency order; kNoSlot at either end.
  Slot newer(Slot s) const { return prev_[s]; }
  Slot older(Slot s) const { return next_[s]; }

  // Monotone access stamp of the last request to s (0 if never requested).
  std::uint64_t last_access(Slot s) const { return stamp_[s]; }
  // Client of the most recent request to s over the whole run, kNoClient if
  // none. Persists across evictions.
  std::uint32_t last_requester(Slot s) const { return requester_[s]; }

  // Records a request without changing residency (bypassed or filtered).
  void note_request(Slot s, std::uint32_t client);
  // Hit: move s to most-recent.
  void touch(Slot s, std::uint32_t client);
  // Admission at most-recent. Caller guarantees room.
  void insert(Slot s, std::uint32_t client);
  void erase(Slot s);

 private:
  void link_front(Slot s);
  void unlink(Slot s);

  std::uint64_t capacity_;
  std::uint64_t used_ = 0;
  std::size_t count_ = 0;
  std::uint64_t clock_ = 0;
  std::span<const std::uint64_t> sizes_;
  std::vector<std::uint8_t> resident_;
  std::vector<Slot> prev_;
  std::vector<Slot> next_;
  std::vector<std::uint64_t> stamp_;
  std::vector<std::uint32_t> requester_;
  Slot head_ = kNoSlot;
  Slot tail_ = kNoSlot;
};

}  // namespace corrcache
