#include "corrcache/toroid.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "corrcache/errors.hpp"
#include "corrcache/text.hpp"
#include "corrcache/workload_config.hpp"
#include "corrcache/workloads.hpp"

namespace corrcache {

std::uint32_t ToroidSpec::follower_count() const {
  std::uint32_t f = 0;
  for (const auto& g : groups) f += static_cast<std::uint32_t>(g.size());
  return f;
}

std::uint32_t ToroidSpec::client_count() const { return static_cast<std::uint32_t>(groups.size()) + follower_count(); }

std::uint32_t ToroidSpec::max_delay() const {
  std::uint32_t m = 0;
  for (const auto& g : groups) {
    for (auto d : g) m = std::max(m, d);
  }
  return m;
}

void ToroidSpec::validate() const {
  if (!(side > 0.0)) throw ConfigError("toroid side must be > 0");
  if (objects == 0) throw ConfigError("toroid needs objects");
  if (!(speed >= 0.0)) throw ConfigError("speed must be >= 0");
  if (direction_period == 0) throw ConfigError("direction period must be >= 1");
  if (!(radius > 0.0) || radius * 2.0 > side) throw ConfigError("radius must lie in (0, side/2]");
  if (groups.empty()) throw ConfigError("toroid needs at least one group");
  for (const auto& g : groups) {
    for (auto d : g) {
      if (d < 1) throw ConfigError("follower delay must be >= 1 slot");
    }
  }
  if (horizon == 0 || horizon < max_delay()) throw ConfigError("horizon must cover the largest follower delay");
  if (versioning) {
    if (!(versioning->near >= 0.0 && versioning->near <= versioning->far)) {
      throw ConfigError("version tiers need 0 <= near <= far");
    }
    for (auto s : versioning->sizes) {
      if (s == 0) throw ConfigError("version sizes must be > 0");
    }
  } else if (object_size == 0) {
    throw ConfigError("object size must be > 0");
  }
}

void DynamicsSpec::validate(std::size_t leaders) const {
  if (kind == DynamicsKind::kNone) return;
  if (period == 0) throw ConfigError("dynamics period must be > 0");
  if (kind == DynamicsKind::kSwitch) {
    if (probabilities.size() != leaders) throw ConfigError("leader switch needs one probability per leader");
    double total = 0.0;
    for (double p : probabilities) {
      if (!(p >= 0.0)) throw ConfigError("switch probabilities must be >= 0");
      total += p;
    }
    if (std::abs(total - 1.0) > 1e-9) throw ConfigError("switch probabilities must sum to 1");
    if (step_delay == 0) throw ConfigError("switch step delay must be >= 1");
  }
}

std::uint32_t DynamicsSpec::max_delay(std::uint32_t followers) const {
  return kind == DynamicsKind::kSwitch ? step_delay * followers : 0;
}

void apply_order_shuffle(std::vector<std::uint32_t>& delays) {
  for (std::size_t i = 0; i + 1 < delays.size(); i += 2) std::swap(delays[i], delays[i + 1]);
}

void apply_order_shuffle(std::vector<FollowerAssignment>& assignments) {
  std::uint32_t leaders = 0;
  for (const auto& a : assignments) leaders = std::max(leaders, a.leader + 1);
  for (std::uint32_t g = 0; g < leaders; ++g) {
    std::vector<std::size_t> members;
    for (std::size_t k = 0; k < assignments.size(); ++k) {
      if (assignments[k].leader == g) members.push_back(k);
    }
    for (std::size_t i = 0; i + 1 < members.size(); i += 2) {
      std::swap(assignments[members[i]].delay, assignments[members[i + 1]].delay);
    }
  }
}

void apply_leader_switch(std::vector<FollowerAssignment>& assignments, const std::vector<double>& probabilities,
                         std::uint32_t step_delay, std::mt19937_64& rng) {
  std::discrete_distribution<std::uint32_t> pick(probabilities.begin(), probabilities.end());
  std::vector<std::uint32_t> joined(probabilities.size(), 0);
  for (auto& a : assignments) {
    a.leader = pick(rng);
    a.delay = step_delay * ++joined[a.leader];
  }
}

double torus_distance(const Vec3& a, const Vec3& b, double side) {
  double sum = 0.0;
  for (int k = 0; k < 3; ++k) {
    double d = std::abs(a[k] - b[k]);
    d = std::min(d, side - d);
    sum += d * d;
  }
  return std::sqrt(sum);
}

namespace {

double wrap(double x, double side) {
  x = std::fmod(x, side);
  if (x < 0.0) x += side;
  // fmod of a value just below 0 can round up to side
  if (x >= side) x = 0.0;
  return x;
}

Vec3 random_direction(std::mt19937_64& rng) {
  std::normal_distribution<double> n(0.0, 1.0);
  for (;;) {
    Vec3 v{n(rng), n(rng), n(rng)};
    const double len = std::sqrt(v[0] * v[0] + v[1] * v[1] + v[2] * v[2]);
    if (len > 1e-12) return {v[0] / len, v[1] / len, v[2] / len};
  }
}

}  // namespace

ToroidWorld::ToroidWorld(ToroidSpec spec, DynamicsSpec dynamics, std::uint64_t seed)
    : spec_(std::move(spec)), dyn_(std::move(dynamics)), seed_(seed), switch_rng_(stream_rng(seed, 2, 0)) {
  spec_.validate();
  dyn_.validate(spec_.groups.size());

  auto place = stream_rng(seed, 0, 0);
  std::uniform_real_distribution<double> coord(0.0, spec_.side);
  objects_.resize(spec_.objects);
  for (auto& p : objects_) p = {coord(place), coord(place), coord(place)};

  cells_ = std::max<std::uint32_t>(1, static_cast<std::uint32_t>(std::floor(spec_.side / spec_.radius)));
  cell_size_ = spec_.side / cells_;
  grid_.assign(std::size_t{cells_} * cells_ * cells_, {});
  auto cell_of = [&](double x) { return std::min(cells_ - 1, static_cast<std::uint32_t>(x / cell_size_)); };
  for (std::uint32_t k = 0; k < objects_.size(); ++k) {
    const auto& p = objects_[k];
    grid_[(std::size_t{cell_of(p[0])} * cells_ + cell_of(p[1])) * cells_ + cell_of(p[2])].push_back(k + 1);
  }

  std::uint32_t id = 1;
  for (std::size_t g = 0; g < spec_.groups.size(); ++g) {
    leader_ids_.push_back(id++);
    for (auto d : spec_.groups[g]) {
      follower_ids_.push_back(id++);
      assign_.push_back({static_cast<std::uint32_t>(g), d});
    }
  }

  const auto leaders = spec_.groups.size();
  depth_ = std::size_t{std::max(spec_.max_delay(), dyn_.max_delay(spec_.follower_count()))} + 1;
  pos_hist_.assign(leaders, std::vector<Vec3>(depth_));
  seen_hist_.assign(leaders, std::vector<std::vector<Seen>>(depth_));
  prev_.assign(spec_.client_count(), {});
  direction_.resize(leaders);
  for (std::size_t g = 0; g < leaders; ++g) {
    leader_rng_.push_back(stream_rng(seed, 1, g));
    auto& r = leader_rng_.back();
    pos_hist_[g][0] = {coord(r), coord(r), coord(r)};
  }
}

const Vec3& ToroidWorld::leader_position(std::uint32_t group) const {
  if (slot_ < 0) throw InternalError("toroid world has not started");
  return pos_hist_.at(group)[ring(slot_)];
}

std::optional<Vec3> ToroidWorld::client_position(std::uint32_t client) const {
  if (slot_ < 0) return std::nullopt;
  for (std::uint32_t g = 0; g < leader_ids_.size(); ++g) {
    if (leader_ids_[g] == client) return leader_position(g);
  }
  for (std::uint32_t k = 0; k < follower_ids_.size(); ++k) {
    if (follower_ids_[k] != client) continue;
    const auto& a = assign_[k];
    const std::int64_t n = slot_ - a.delay;
    if (n < 0) return std::nullopt;
    return pos_hist_[a.leader][ring(n)];
  }
  throw ConfigError("unknown client " + std::to_string(client));
}

void ToroidWorld::visible_from(const Vec3& p, std::vector<Seen>& out) const {
  out.clear();
  auto cell_of = [&](double x) { return std::min(cells_ - 1, static_cast<std::uint32_t>(x / cell_size_)); };
  const std::int64_t c[3] = {cell_of(p[0]), cell_of(p[1]), cell_of(p[2])};
  const std::int64_t n = cells_;
  std::vector<std::size_t> visited;
  for (int dx = -1; dx <= 1; ++dx) {
    for (int dy = -1; dy <= 1; ++dy) {
      for (int dz = -1; dz <= 1; ++dz) {
        const auto x = ((c[0] + dx) % n + n) % n;
        const auto y = ((c[1] + dy) % n + n) % n;
        const auto z = ((c[2] + dz) % n + n) % n;
        const auto cell = static_cast<std::size_t>((x * n + y) * n + z);
        // with fewer than 3 cells per axis neighbours repeat
        if (std::find(visited.begin(), visited.end(), cell) != visited.end()) continue;
        visited.push_back(cell);
        for (auto id : grid_[cell]) {
          const double dist = torus_distance(p, objects_[id - 1], spec_.side);
          if (dist > spec_.radius) continue;
          std::int8_t version = ObjectKey::kNoVersion;
          if (spec_.versioning) {
            version = dist < spec_.versioning->near ? 0 : (dist <= spec_.versioning->far ? 1 : 2);
          }
          out.push_back({id, version});
        }
      }
    }
  }
  std::sort(out.begin(), out.end());
}

void ToroidWorld::advance(std::vector<RequestEvent>& out) {
  const std::int64_t n = ++slot_;
  const auto un = static_cast<std::uint32_t>(n);

  for (std::size_t g = 0; g < leader_ids_.size(); ++g) {
    auto& r = leader_rng_[g];
    if (un % spec_.direction_period == 0) direction_[g] = random_direction(r);
    Vec3 p = pos_hist_[g][ring(n == 0 ? 0 : n - 1)];
    if (n > 0) {
      for (int k = 0; k < 3; ++k) p[k] = wrap(p[k] + spec_.speed * direction_[g][k], spec_.side);
    }
    pos_hist_[g][ring(n)] = p;
    visible_from(p, seen_hist_[g][ring(n)]);
  }

  if (dyn_.boundary(un)) {
    if (dyn_.kind == DynamicsKind::kShuffle) {
      apply_order_shuffle(assign_);
    } else {
      apply_leader_switch(assign_, dyn_.probabilities, dyn_.step_delay, switch_rng_);
    }
  }

  const double t = static_cast<double>(n);
  auto emit = [&](std::uint32_t client, const std::vector<Seen>& now) {
    auto& before = prev_[client - 1];
    for (const auto& s : now) {
      if (spec_.mode == RequestMode::kNewlyVisible && std::binary_search(before.begin(), before.end(), s)) continue;
      out.push_back({t, ClientId{client}, ObjectKey{s.id, s.version}});
    }
    before = now;
  };

  for (std::size_t g = 0; g < leader_ids_.size(); ++g) emit(leader_ids_[g], seen_hist_[g][ring(n)]);
  static const std::vector<Seen> kNothing;
  for (std::size_t k = 0; k < follower_ids_.size(); ++k) {
    const auto& a = assign_[k];
    const std::int64_t m = n - a.delay;
    emit(follower_ids_[k], m < 0 ? kNothing : seen_hist_[a.leader][ring(m)]);
  }
}

ObjectCatalog ToroidWorld::catalog() const {
  ObjectCatalog cat;
  for (std::uint32_t id = 1; id <= spec_.objects; ++id) {
    if (!spec_.versioning) {
      cat.add(ObjectKey{id}, spec_.object_size);
      continue;
    }
    const auto& v = *spec_.versioning;
    // only tiers reachable inside the visibility radius
    if (v.near > 0.0) cat.add(ObjectKey{id, 0}, v.sizes[0]);
    if (spec_.radius >= v.near) cat.add(ObjectKey{id, 1}, v.sizes[1]);
    if (spec_.radius > v.far) cat.add(ObjectKey{id, 2}, v.sizes[2]);
  }
  return cat;
}

Trace gen_toroid_trace(const ToroidSpec& spec, const DynamicsSpec& dynamics, std::uint64_t seed) {
  ToroidWorld world(spec, dynamics, seed);
  Trace trace;
  trace.catalog = world.catalog();
  for (std::uint32_t n = 0; n < spec.horizon; ++n) world.advance(trace.events);
  sort_events(trace.events);
  trace.metadata["generator"] = "toroid";
  trace.metadata["name"] = spec.name;
  trace.metadata["seed"] = std::to_string(seed);
  trace.metadata["config_hash"] = text::hex64(text::fnv1a(format_toroid(spec, dynamics)));
  return trace;
}

}  // namespace corrcache
