#include "corrcache/cache_state.hpp"

#include "corrcache/errors.hpp"

namespace corrcache {

CacheState::CacheState(std::uint64_t capacity_bytes, std::span<const std::uint64_t> sizes)
    : capacity_(capacity_bytes),
      sizes_(sizes),
      resident_(sizes.size(), 0),
      prev_(sizes.size(), kNoSlot),
      next_(sizes.size(), kNoSlot),
      stamp_(sizes.size(), 0),
      requester_(sizes.size(), kNoClient) {}

void CacheState::note_request(Slot s, std::uint32_t client) {
  stamp_[s] = ++clock_;
  requester_[s] = client;
}

void CacheState::touch(Slot s, std::uint32_t client) {
  if (!resident_[s]) throw InternalError("touch on non-resident slot");
  note_request(s, client);
  if (head_ != s) {
    unlink(s);
    link_front(s);
  }
}

void CacheState::insert(Slot s, std::uint32_t client) {
  if (resident_[s]) throw InternalError("insert of resident slot");
  if (sizes_[s] > free_bytes()) throw InternalError("insert without room");
  note_request(s, client);
  resident_[s] = 1;
  used_ += sizes_[s];
  ++count_;
  link_front(s);
}

void CacheState::erase(Slot s) {
  if (!resident_[s]) throw InternalError("erase of non-resident slot");
  unlink(s);
  resident_[s] = 0;
  used_ -= sizes_[s];
  --count_;
}

void CacheState::link_front(Slot s) {
  prev_[s] = kNoSlot;
  next_[s] = head_;
  if (head_ != kNoSlot) prev_[head_] = s;
  head_ = s;
  if (tail_ == kNoSlot) tail_ = s;
}

void CacheState::unlink(Slot s) {
  const Slot p = prev_[s];
  const Slot n = next_[s];
  if (p != kNoSlot) next_[p] = n; else head_ = n;
  if (n != kNoSlot) prev_[n] = p; else tail_ = p;
  prev_[s] = next_[s] = kNoSlot;
}

}  // namespace corrcache
