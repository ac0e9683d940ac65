#pragma once

#include <compare>
#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

namespace corrcache {

enum class ClientId : std::uint32_t {};

constexpr std::uint32_t to_index(ClientId c) noexcept { return static_cast<std::uint32_t>(c); }

// Cache identity. When versioning is in use, (id, version) pairs are distinct
// cacheable items; kNoVersion marks an unversioned object.
struct ObjectKey {
  static constexpr std::int8_t kNoVersion = -1;

  std::uint32_t id = 0;
  std::int8_t version = kNoVersion;

  bool versioned() const noexcept { return version != kNoVersion; }
  std::uint64_t packed() const noexcept {
    return (std::uint64_t{id} << 8) | static_cast<std::uint8_t>(version);
  }

  friend auto operator<=>(const ObjectKey&, const ObjectKey&) = default;
};

struct RequestEvent {
  double time = 0.0;
  ClientId client{};
  ObjectKey object;

  friend bool operator==(const RequestEvent&, const RequestEvent&) = default;
};

// Stable total order used for every trace: (time, client, object).
inline bool event_order(const RequestEvent& a, const RequestEvent& b) noexcept {
  if (a.time != b.time) return a.time < b.time;
  if (a.client != b.client) return a.client < b.client;
  return a.object < b.object;
}

class ObjectCatalog {
 public:
  struct Entry {
    ObjectKey key;
    std::uint64_t size_bytes = 0;
    friend bool operator==(const Entry&, const Entry&) = default;
  };

  // Throws ConfigError on a duplicate key, a zero id, or a zero size.
  void add(ObjectKey key, std::uint64_t size_bytes);

  std::optional<std::size_t> find(ObjectKey key) const;
  bool contains(ObjectKey key) const { return find(key).has_value(); }
  std::uint64_t size_of(ObjectKey key) const;

  std::size_t size() const noexcept { return entries_.size(); }
  bool empty() const noexcept { return entries_.empty(); }
  const Entry& operator[](std::size_t i) const { return entries_[i]; }
  std::span<const Entry> entries() const noexcept { return entries_; }

  std::uint64_t total_volume() const noexcept { return total_volume_; }
  bool uniform_sizes() const noexcept;

  friend bool operator==(const ObjectCatalog& a, const ObjectCatalog& b) {
    return a.entries_ == b.entries_;
  }

 private:
  std::vector<Entry> entries_;
  std::unordered_map<std::uint64_t, std::size_t> index_;
  std::uint64_t total_volume_ = 0;
};

struct Trace {
  std::vector<RequestEvent> events;
  ObjectCatalog catalog;
  // generator, seed, config_hash, preset, ...
  std::map<std::string, std::string> metadata;
};

struct Violation {
  std::size_t index = 0;
  std::string message;
};

struct ValidationReport {
  std::vector<Violation> violations;
  bool ok() const noexcept { return violations.empty(); }
};

ValidationReport validate_trace(const Trace& trace);

struct TraceStats {
  std::size_t event_count = 0;
  std::size_t distinct_objects = 0;
  std::size_t distinct_clients = 0;
  std::uint64_t total_volume = 0;
  double duration = 0.0;
};

TraceStats trace_stats(const Trace& trace);

// Sorts events into the canonical (time, client, object) order.
void sort_events(std::vector<RequestEvent>& events);

}  // namespace corrcache
