#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "corrcache/trace.hpp"

namespace corrcache {

using Vec3 = std::array<double, 3>;

enum class RequestMode {
  kEverySlot,     // every visible object, every slot
  kNewlyVisible,  // only identities not visible to the client in the previous slot
};

// Distance tiers: < near -> version 0, [near, far] -> 1, > far -> 2.
struct VersionTiers {
  double near = 10.0;
  double far = 50.0;
  std::array<std::uint64_t, 3> sizes{1000000, 500000, 100000};
};

struct ToroidSpec {
  std::string name = "toroid";
  double side = 1000.0;
  std::uint32_t objects = 4000;
  double speed = 25.0;
  std::uint32_t direction_period = 10;
  double radius = 50.0;
  // Per group, the follower delays in slots (follower i trails by delays[i-1]).
  std::vector<std::vector<std::uint32_t>> groups;
  std::uint32_t horizon = 0;  // slots
  RequestMode mode = RequestMode::kEverySlot;
  std::optional<VersionTiers> versioning;
  std::uint64_t object_size = 1;  // unversioned runs

  std::uint32_t client_count() const;
  std::uint32_t follower_count() const;
  std::uint32_t max_delay() const;
  void validate() const;
};

enum class DynamicsKind { kNone, kShuffle, kSwitch };

struct DynamicsSpec {
  DynamicsKind kind = DynamicsKind::kNone;
  std::uint32_t period = 0;
  std::vector<double> probabilities;  // switch: one per leader
  std::uint32_t step_delay = 5;       // switch: i-th joiner trails by i * step_delay

  void validate(std::size_t leaders) const;
  // Largest delay the dynamics can produce for `followers` followers.
  std::uint32_t max_delay(std::uint32_t followers) const;
  // Dynamics act at slots n > 0 with n % period == 0.
  bool boundary(std::uint32_t slot) const { return kind != DynamicsKind::kNone && slot > 0 && slot % period == 0; }
};

struct FollowerAssignment {
  std::uint32_t leader = 0;  // group index
  std::uint32_t delay = 0;   // slots
  friend bool operator==(const FollowerAssignment&, const FollowerAssignment&) = default;
};

// Followers 2i-1 and 2i exchange delays; an odd trailing follower keeps its own.
void apply_order_shuffle(std::vector<std::uint32_t>& delays);
// Shuffle applied per group to assignments listed in follower-id order.
void apply_order_shuffle(std::vector<FollowerAssignment>& assignments);

// Each follower, in id order, draws a leader from `probabilities`; its delay is
// step_delay * (number of followers that already picked that leader + 1).
void apply_leader_switch(std::vector<FollowerAssignment>& assignments, const std::vector<double>& probabilities,
                         std::uint32_t step_delay, std::mt19937_64& rng);

// Minimal per-axis displacement on a torus of the given side.
double torus_distance(const Vec3& a, const Vec3& b, double side);

// Slot-by-slot state of the toroid workload. Clients are numbered group-major
// from 1: leader of group 0, its followers, leader of group 1, ...
class ToroidWorld {
 public:
  ToroidWorld(ToroidSpec spec, DynamicsSpec dynamics, std::uint64_t seed);

  // Advances to the next slot and appends that slot's requests.
  void advance(std::vector<RequestEvent>& out);

  // Slot most recently produced by advance(), or -1 before the first call.
  std::int64_t slot() const { return slot_; }
  const Vec3& object_position(std::uint32_t id) const { return objects_.at(id - 1); }
  const Vec3& leader_position(std::uint32_t group) const;
  // Position of a client at the current slot; nullopt for a follower whose
  // delay reaches before slot 0.
  std::optional<Vec3> client_position(std::uint32_t client) const;
  const std::vector<FollowerAssignment>& assignments() const { return assign_; }
  std::uint32_t leader_client(std::uint32_t group) const { return leader_ids_.at(group); }
  // External id of follower k (0-based, id order).
  std::uint32_t follower_client(std::uint32_t k) const { return follower_ids_.at(k); }
  const ToroidSpec& spec() const { return spec_; }

  ObjectCatalog catalog() const;

 private:
  struct Seen {
    std::uint32_t id;
    std::int8_t version;
    friend auto operator<=>(const Seen&, const Seen&) = default;
  };

  void visible_from(const Vec3& p, std::vector<Seen>& out) const;
  std::size_t ring(std::int64_t n) const { return static_cast<std::size_t>(n % static_cast<std::int64_t>(depth_)); }

  ToroidSpec spec_;
  DynamicsSpec dyn_;
  std::uint64_t seed_;
  std::vector<Vec3> objects_;
  std::uint32_t cells_ = 1;
  double cell_size_ = 0.0;
  std::vector<std::vector<std::uint32_t>> grid_;  // object ids per cell

  std::vector<std::mt19937_64> leader_rng_;
  std::mt19937_64 switch_rng_;
  std::vector<Vec3> direction_;
  std::vector<std::uint32_t> leader_ids_;
  std::vector<std::uint32_t> follower_ids_;
  std::vector<FollowerAssignment> assign_;

  std::size_t depth_ = 1;  // ring depth = max delay + 1
  std::vector<std::vector<Vec3>> pos_hist_;                 // [leader][ring]
  std::vector<std::vector<std::vector<Seen>>> seen_hist_;  // [leader][ring]
  std::vector<std::vector<Seen>> prev_;                     // per client, last slot's set
  std::int64_t slot_ = -1;
};

Trace gen_toroid_trace(const ToroidSpec& spec, const DynamicsSpec& dynamics, std::uint64_t seed);

}  // namespace corrcache
