#include "corrcache/trace.hpp"

#include <algorithm>
#include <cmath>
#include <unordered_set>

#include "corrcache/errors.hpp"

namespace corrcache {

void ObjectCatalog::add(ObjectKey key, std::uint64_t size_bytes) {
  if (key.id == 0) throw ConfigError("object id must be >= 1");
  if (size_bytes == 0) {
    throw ConfigError("object " + std::to_string(key.id) + " has zero size");
  }
  auto [it, inserted] = index_.emplace(key.packed(), entries_.size());
  if (!inserted) {
    throw ConfigError("duplicate catalog entry for object " + std::to_string(key.id));
  }
  entries_.push_back({key, size_bytes});
  total_volume_ += size_bytes;
}

std::optional<std::size_t> ObjectCatalog::find(ObjectKey key) const {
  auto it = index_.find(key.packed());
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

std::uint64_t ObjectCatalog::size_of(ObjectKey key) const {
  auto i = find(key);
  if (!i) throw ConfigError("object " + std::to_string(key.id) + " not in catalog");
  return entries_[*i].size_bytes;
}

bool ObjectCatalog::uniform_sizes() const noexcept {
  return std::all_of(entries_.begin(), entries_.end(), [&](const Entry& e) {
    return e.size_bytes == entries_.front().size_bytes;
  });
}

ValidationReport validate_trace(const Trace& trace) {
  ValidationReport report;
  const auto& ev = trace.events;
  for (std::size_t i = 0; i < ev.size(); ++i) {
    const auto& e = ev[i];
    if (!std::isfinite(e.time) || e.time < 0.0) {
      report.violations.push_back({i, "non-finite or negative time at index " + std::to_string(i)});
    }
    if (to_index(e.client) == 0) {
      report.violations.push_back({i, "client id 0 at index " + std::to_string(i)});
    }
    if (!trace.catalog.contains(e.object)) {
      report.violations.push_back({i, "unknown object at index " + std::to_string(i)});
    }
    if (i > 0 && event_order(e, ev[i - 1])) {
      report.violations.push_back({i, "unsorted at index " + std::to_string(i)});
    }
  }
  return report;
}

TraceStats trace_stats(const Trace& trace) {
  TraceStats s;
  s.event_count = trace.events.size();
  s.total_volume = trace.catalog.total_volume();
  std::unordered_set<std::uint64_t> objects;
  std::unordered_set<std::uint32_t> clients;
  for (const auto& e : trace.events) {
    objects.insert(e.object.packed());
    clients.insert(to_index(e.client));
  }
  s.distinct_objects = objects.size();
  s.distinct_clients = clients.size();
  if (trace.events.size() > 1) {
    s.duration = trace.events.back().time - trace.events.front().time;
  }
  return s;
}

void sort_events(std::vector<RequestEvent>& events) {
  std::sort(events.begin(), events.end(), event_order);
}

}  // namespace corrcache
