#include "corrcache/static_optimal.hpp"

#include <algorithm>
#include <numeric>

#include "corrcache/errors.hpp"

namespace corrcache {
namespace {

struct Item {
  std::uint32_t index;
  std::uint64_t size;
  double rate;
};

class BranchAndBound {
 public:
  BranchAndBound(std::vector<Item> items, std::uint64_t capacity)
      : items_(std::move(items)), capacity_(capacity), take_(items_.size(), 0) {
    // Densest first so the fractional bound is the Dantzig bound.
    std::sort(items_.begin(), items_.end(), [](const Item& a, const Item& b) {
      const double da = a.rate / static_cast<double>(a.size);
      const double db = b.rate / static_cast<double>(b.size);
      if (da != db) return da > db;
      return a.index < b.index;
    });
  }

  std::vector<std::uint32_t> solve() {
    search(0, 0, 0.0);
    std::vector<std::uint32_t> out;
    for (std::size_t k = 0; k < items_.size(); ++k) {
      if (best_take_.size() == items_.size() && best_take_[k]) out.push_back(items_[k].index);
    }
    return out;
  }

 private:
  double bound(std::size_t k, std::uint64_t used, double value) const {
    std::uint64_t room = capacity_ - used;
    for (; k < items_.size(); ++k) {
      if (items_[k].size <= room) {
        room -= items_[k].size;
        value += items_[k].rate;
      } else {
        return value + items_[k].rate * static_cast<double>(room) / static_cast<double>(items_[k].size);
      }
    }
    return value;
  }

  void search(std::size_t k, std::uint64_t used, double value) {
    if (value > best_ || best_take_.empty()) {
      best_ = value;
      best_take_ = take_;
    }
    if (k == items_.size()) return;
    if (bound(k, used, value) <= best_) return;
    if (used + items_[k].size <= capacity_) {
      take_[k] = 1;
      search(k + 1, used + items_[k].size, value + items_[k].rate);
      take_[k] = 0;
    }
    search(k + 1, used, value);
  }

  std::vector<Item> items_;
  std::uint64_t capacity_;
  std::vector<std::uint8_t> take_;
  std::vector<std::uint8_t> best_take_;
  double best_ = 0.0;
};

}  // namespace

StaticSelection static_optimal_select(std::span<const std::uint64_t> sizes,
                                      std::span<const double> weighted_rates, std::uint64_t capacity) {
  if (sizes.size() != weighted_rates.size()) {
    throw ConfigError("static placement needs one rate per object");
  }
  if (capacity == 0) throw ConfigError("cache capacity must be > 0");

  std::vector<Item> items;
  for (std::uint32_t i = 0; i < sizes.size(); ++i) {
    if (weighted_rates[i] < 0.0) throw ConfigError("negative request rate");
    if (weighted_rates[i] > 0.0 && sizes[i] <= capacity) items.push_back({i, sizes[i], weighted_rates[i]});
  }

  StaticSelection sel;
  const bool uniform = std::all_of(items.begin(), items.end(),
                                   [&](const Item& it) { return it.size == items.front().size; });
  if (items.empty()) {
    sel.method = "top-k";
  } else if (uniform) {
    sel.method = "top-k";
    const std::size_t k = std::min<std::size_t>(items.size(), capacity / items.front().size);
    std::stable_sort(items.begin(), items.end(), [](const Item& a, const Item& b) { return a.rate > b.rate; });
    for (std::size_t j = 0; j < k; ++j) sel.chosen.push_back(items[j].index);
  } else if (items.size() <= kStaticExactLimit) {
    sel.method = "branch-and-bound";
    sel.chosen = BranchAndBound(items, capacity).solve();
  } else {
    sel.method = "greedy";
    sel.exact = false;
    std::stable_sort(items.begin(), items.end(), [](const Item& a, const Item& b) {
      return a.rate / static_cast<double>(a.size) > b.rate / static_cast<double>(b.size);
    });
    std::uint64_t used = 0;
    for (const auto& it : items) {
      if (used + it.size <= capacity) {
        used += it.size;
        sel.chosen.push_back(it.index);
      }
    }
  }

  std::sort(sel.chosen.begin(), sel.chosen.end());
  for (auto i : sel.chosen) {
    sel.objective += weighted_rates[i];
    sel.used_bytes += sizes[i];
  }
  return sel;
}

}  // namespace corrcache
