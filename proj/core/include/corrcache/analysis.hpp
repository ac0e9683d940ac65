#pragma once

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "corrcache/workloads.hpp"

namespace corrcache {

// Adaptive Simpson on [a, b], split first at every breakpoint inside (a, b).
// Stops when each panel's Richardson estimate is below rel_tol times the
// running magnitude of the integral.
double integrate(const std::function<double(double)>& f, double a, double b, std::span<const double> breakpoints,
                 double rel_tol = 1e-8);

struct AnalysisOptions {
  double solver_rel_tol = 1e-6;       // |b - occupancy(t*)| <= solver_rel_tol * b
  double quad_rel_tol = 1e-8;
  std::size_t mc_samples = 1000000;   // joint delay samplers
  std::uint64_t mc_seed = 1;
};

struct CharacteristicTime {
  double t_star = 0.0;
  double b = 0.0;
  double residual = 0.0;
  double tolerance = 0.0;
  std::size_t iterations = 0;
  std::string method;
};

// Working-set view of a grouped workload: per-object rates lambda^g(d), sizes,
// and the follower delay laws. The characteristic time t is shared by all
// objects.
class WorkingSetModel {
 public:
  explicit WorkingSetModel(const GroupedWorkload& w, AnalysisOptions opt = {});

  std::size_t group_count() const { return groups_.size(); }
  const GroupSpec& group(std::size_t g) const { return groups_[g]; }
  double group_rate(std::size_t g) const { return rates_[g]; }
  // lambda^g(d); zero when d is outside the group.
  double object_rate(std::size_t g, std::uint32_t object) const;
  const std::vector<std::uint32_t>& objects() const { return ids_; }
  std::uint64_t size_of(std::uint32_t object) const;
  std::uint64_t total_volume() const { return total_volume_; }

  // Expected length of the set of leader times tau for which some request of
  // the group falls in [-t, 0]: t plus the integral of q_tau outside [-t, 0].
  double exposure(std::size_t g, double t) const;
  // Probability that the object was requested at least once in the last t.
  double p_requested(std::uint32_t object, double t) const;
  // sum_d p(d, t) s(d)
  double occupancy(double t) const;

  CharacteristicTime solve(double b) const;

  // P(no follower of g requests in [-t, 0] given the leader at 0).
  double leader_miss_factor(std::size_t g, double t) const;
  // P(E^{i,l} and E^{i,j} for all j != i); i is 1-based.
  double follower_miss_factor(std::size_t g, std::uint32_t i, double t) const;

  double leader_hit_prob(std::uint32_t object, std::size_t g, double t) const;
  double follower_hit_prob(std::uint32_t object, std::size_t g, std::uint32_t i, double t) const;

  // "closed-form", "quadrature", "exact" (fixed delays) or "monte-carlo".
  std::string exposure_method(std::size_t g) const;
  const AnalysisOptions& options() const { return opt_; }

 private:
  std::vector<GroupSpec> groups_;
  std::vector<double> rates_;
  std::vector<std::vector<double>> pmf_;
  std::vector<std::uint32_t> ids_;       // ascending
  std::vector<std::uint64_t> sizes_;     // per ids_ entry
  std::uint64_t total_volume_ = 0;
  // Joint-delay samples per group, row-major [sample][follower].
  std::vector<std::vector<double>> samples_;
  AnalysisOptions opt_;
};

struct ModelHitRow {
  std::uint32_t group = 0;          // 1-based
  bool leader = true;
  std::uint32_t follower = 0;       // 1-based; 0 for the leader or a shared iid column
  std::uint32_t object = 0;
  double hit_prob = 0.0;
};

struct ModelHitReport {
  CharacteristicTime t;
  std::vector<ModelHitRow> rows;
};

ModelHitReport model_hit_report(const WorkingSetModel& model, double b);
// `#`-prefixed header (t_star, b, residual, method), then
// group,client_role,follower_index,object,hit_prob
void write_model_report_csv(const ModelHitReport& report, std::ostream& out);

}  // namespace corrcache
