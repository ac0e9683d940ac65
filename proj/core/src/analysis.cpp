#include "corrcache/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>

#include "corrcache/errors.hpp"
#include "corrcache/text.hpp"

namespace corrcache {
namespace {

double simpson(const std::function<double(double)>& f, double a, double b, double fa, double fm, double fb,
               double whole, double eps, int depth) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m);
  const double rm = 0.5 * (m + b);
  const double flm = f(lm);
  const double frm = f(rm);
  const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  const double delta = left + right - whole;
  if (depth <= 0 || std::abs(delta) <= 15.0 * eps) return left + right + delta / 15.0;
  return simpson(f, a, m, fa, flm, fm, left, 0.5 * eps, depth - 1) +
         simpson(f, m, b, fm, frm, fb, right, 0.5 * eps, depth - 1);
}

// P(X in [a, b]) for X ~ U[lo, hi]; a point mass when lo == hi.
double uniform_mass(double lo, double hi, double a, double b) {
  if (lo == hi) return (a <= lo && lo <= b) ? 1.0 : 0.0;
  const double w = std::min(hi, b) - std::max(lo, a);
  return w > 0.0 ? w / (hi - lo) : 0.0;
}

// Length of [-t, 0] united with [-t - d, -d] for every delay d.
double union_length(std::span<const double> delays, double t, std::vector<std::pair<double, double>>& buf) {
  buf.clear();
  buf.emplace_back(-t, 0.0);
  for (double d : delays) buf.emplace_back(-t - d, -d);
  std::sort(buf.begin(), buf.end());
  double total = 0.0;
  double lo = buf[0].first;
  double hi = buf[0].second;
  for (std::size_t k = 1; k < buf.size(); ++k) {
    if (buf[k].first > hi) {
      total += hi - lo;
      lo = buf[k].first;
      hi = buf[k].second;
    } else {
      hi = std::max(hi, buf[k].second);
    }
  }
  return total + (hi - lo);
}

bool inside(double x, double a, double b) { return a <= x && x <= b; }

}  // namespace

double integrate(const std::function<double(double)>& f, double a, double b, std::span<const double> breakpoints,
                 double rel_tol) {
  if (!(b > a)) return 0.0;
  std::vector<double> cuts{a};
  for (double x : breakpoints) {
    if (x > a && x < b) cuts.push_back(x);
  }
  cuts.push_back(b);
  std::sort(cuts.begin(), cuts.end());
  cuts.erase(std::unique(cuts.begin(), cuts.end()), cuts.end());

  // Coarse magnitude to turn the relative tolerance into an absolute one.
  struct Panel {
    double a, b, fa, fm, fb, whole;
  };
  std::vector<Panel> panels;
  double scale = 0.0;
  for (std::size_t k = 0; k + 1 < cuts.size(); ++k) {
    const double lo = cuts[k];
    const double hi = cuts[k + 1];
    const double fa = f(lo);
    const double fm = f(0.5 * (lo + hi));
    const double fb = f(hi);
    const double whole = (hi - lo) / 6.0 * (fa + 4.0 * fm + fb);
    panels.push_back({lo, hi, fa, fm, fb, whole});
    scale += std::abs(whole);
  }
  const double eps = std::max(rel_tol * scale, std::numeric_limits<double>::min());
  double total = 0.0;
  for (const auto& p : panels) {
    total += simpson(f, p.a, p.b, p.fa, p.fm, p.fb, p.whole, eps * (p.b - p.a) / (b - a), 48);
  }
  return total;
}

WorkingSetModel::WorkingSetModel(const GroupedWorkload& w, AnalysisOptions opt) : groups_(w.groups), opt_(opt) {
  w.validate();
  for (std::size_t g = 0; g < groups_.size(); ++g) {
    rates_.push_back(w.effective_rate(g));
    pmf_.push_back(zipf_pmf(groups_[g].object_count, groups_[g].zipf_s));
  }
  const auto cat = w.catalog();
  for (const auto& e : cat.entries()) {
    ids_.push_back(e.key.id);
    sizes_.push_back(e.size_bytes);
  }
  total_volume_ = cat.total_volume();

  samples_.resize(groups_.size());
  for (std::size_t g = 0; g < groups_.size(); ++g) {
    const auto* j = std::get_if<JointDelays>(&groups_[g].delays);
    if (!j || groups_[g].followers == 0) continue;
    if (opt_.mc_samples == 0) throw ConfigError("joint delays need a positive Monte Carlo sample count");
    auto rng = stream_rng(opt_.mc_seed, g, 7);
    const std::size_t f = groups_[g].followers;
    auto& s = samples_[g];
    s.resize(opt_.mc_samples * f);
    std::vector<double> one;
    for (std::size_t n = 0; n < opt_.mc_samples; ++n) {
      sample_joint(*j, f, rng, one);
      std::copy(one.begin(), one.end(), s.begin() + static_cast<std::ptrdiff_t>(n * f));
    }
  }
}

double WorkingSetModel::object_rate(std::size_t g, std::uint32_t object) const {
  const auto& grp = groups_.at(g);
  if (object < grp.first_object || object - grp.first_object >= grp.object_count) return 0.0;
  return rates_[g] * pmf_[g][object - grp.first_object];
}

std::uint64_t WorkingSetModel::size_of(std::uint32_t object) const {
  auto it = std::lower_bound(ids_.begin(), ids_.end(), object);
  if (it == ids_.end() || *it != object) throw ConfigError("object " + std::to_string(object) + " is not in the model");
  return sizes_[static_cast<std::size_t>(it - ids_.begin())];
}

std::string WorkingSetModel::exposure_method(std::size_t g) const {
  const auto& grp = groups_.at(g);
  if (grp.followers == 0 || std::holds_alternative<StructuredDelay>(grp.delays)) return "closed-form";
  if (std::holds_alternative<FixedDelays>(grp.delays)) return "exact";
  if (std::holds_alternative<UniformDelays>(grp.delays)) return "quadrature";
  return "monte-carlo";
}

double WorkingSetModel::exposure(std::size_t g, double t) const {
  const auto& grp = groups_.at(g);
  const std::uint32_t f = grp.followers;
  if (f == 0) return t;
  std::vector<std::pair<double, double>> buf;

  if (const auto* s = std::get_if<StructuredDelay>(&grp.delays)) return t + f * std::min(s->step, t);
  if (const auto* d = std::get_if<FixedDelays>(&grp.delays)) return union_length(d->values, t, buf);

  if (const auto* u = std::get_if<UniformDelays>(&grp.delays)) {
    auto q = [&](double tau) {
      double miss = 1.0;
      for (std::uint32_t i = 0; i < f; ++i) miss *= 1.0 - uniform_mass(u->lo[i], u->hi[i], -t - tau, -tau);
      return 1.0 - miss;
    };
    std::vector<double> kinks;
    double max_hi = -std::numeric_limits<double>::infinity();
    double min_lo = std::numeric_limits<double>::infinity();
    for (std::uint32_t i = 0; i < f; ++i) {
      kinks.insert(kinks.end(), {-t - u->hi[i], -t - u->lo[i], -u->hi[i], -u->lo[i]});
      max_hi = std::max(max_hi, u->hi[i]);
      min_lo = std::min(min_lo, u->lo[i]);
    }
    double total = t;
    // leader before the window: some follower lands inside it
    if (max_hi > 0.0) total += integrate(q, -t - max_hi, -t, kinks, opt_.quad_rel_tol);
    // leader after the window: a follower ran ahead into it
    if (min_lo < 0.0) total += integrate(q, 0.0, -min_lo, kinks, opt_.quad_rel_tol);
    return total;
  }

  const auto& s = samples_[g];
  const std::size_t n = s.size() / f;
  double acc = 0.0;
  for (std::size_t k = 0; k < n; ++k) acc += union_length(std::span<const double>(s.data() + k * f, f), t, buf);
  return acc / static_cast<double>(n);
}

double WorkingSetModel::p_requested(std::uint32_t object, double t) const {
  if (!(t >= 0.0)) throw ConfigError("t must be >= 0");
  double x = 0.0;
  for (std::size_t g = 0; g < groups_.size(); ++g) {
    const double r = object_rate(g, object);
    if (r > 0.0) x += r * exposure(g, t);
  }
  return -std::expm1(-x);
}

double WorkingSetModel::occupancy(double t) const {
  std::vector<double> expo(groups_.size());
  for (std::size_t g = 0; g < groups_.size(); ++g) expo[g] = exposure(g, t);
  double total = 0.0;
  for (std::size_t k = 0; k < ids_.size(); ++k) {
    double x = 0.0;
    for (std::size_t g = 0; g < groups_.size(); ++g) {
      const double r = object_rate(g, ids_[k]);
      if (r > 0.0) x += r * expo[g];
    }
    total += -std::expm1(-x) * static_cast<double>(sizes_[k]);
  }
  return total;
}

CharacteristicTime WorkingSetModel::solve(double b) const {
  if (!(b > 0.0)) throw ConfigError("capacity must be > 0");
  if (b >= static_cast<double>(total_volume_)) {
    throw ConfigError("cache unbounded: capacity " + text::format_double(b) + " >= total volume " +
                      std::to_string(total_volume_));
  }
  CharacteristicTime out;
  out.b = b;
  out.tolerance = opt_.solver_rel_tol * b;

  double lo = 0.0;
  double hi = 1.0;
  while (occupancy(hi) < b) {
    lo = hi;
    hi *= 2.0;
    if (hi > 1e300) throw ConfigError("characteristic time diverges");
  }
  double mid = hi;
  double r = occupancy(hi) - b;
  for (std::size_t it = 0; it < 4000; ++it) {
    if (std::abs(r) <= out.tolerance) break;
    mid = 0.5 * (lo + hi);
    r = occupancy(mid) - b;
    ++out.iterations;
    if (r < 0.0) {
      lo = mid;
    } else {
      hi = mid;
    }
    if (hi - lo <= 4.0 * std::numeric_limits<double>::epsilon() * hi) break;
  }
  out.t_star = mid;
  out.residual = std::abs(r);

  out.method = "bisection rel_tol=" + text::format_double(opt_.solver_rel_tol) +
               " iterations=" + std::to_string(out.iterations) + " exposure=";
  bool mc = false;
  for (std::size_t g = 0; g < groups_.size(); ++g) {
    out.method += (g ? "," : "") + exposure_method(g);
    mc = mc || exposure_method(g) == "monte-carlo";
  }
  if (mc) out.method += " mc_samples=" + std::to_string(opt_.mc_samples);
  out.method += " quad_rel_tol=" + text::format_double(opt_.quad_rel_tol);
  return out;
}

double WorkingSetModel::leader_miss_factor(std::size_t g, double t) const {
  const auto& grp = groups_.at(g);
  const std::uint32_t f = grp.followers;
  if (f == 0 || std::holds_alternative<StructuredDelay>(grp.delays)) return 1.0;
  if (const auto* d = std::get_if<FixedDelays>(&grp.delays)) {
    for (double x : d->values) {
      if (inside(x, -t, 0.0)) return 0.0;
    }
    return 1.0;
  }
  if (const auto* u = std::get_if<UniformDelays>(&grp.delays)) {
    double p = 1.0;
    for (std::uint32_t i = 0; i < f; ++i) p *= 1.0 - uniform_mass(u->lo[i], u->hi[i], -t, 0.0);
    return p;
  }
  const auto& s = samples_[g];
  const std::size_t n = s.size() / f;
  std::size_t ok = 0;
  for (std::size_t k = 0; k < n; ++k) {
    bool miss = true;
    for (std::uint32_t i = 0; i < f && miss; ++i) miss = !inside(s[k * f + i], -t, 0.0);
    ok += miss;
  }
  return static_cast<double>(ok) / static_cast<double>(n);
}

double WorkingSetModel::follower_miss_factor(std::size_t g, std::uint32_t i, double t) const {
  const auto& grp = groups_.at(g);
  const std::uint32_t f = grp.followers;
  if (i == 0 || i > f) throw ConfigError("follower index out of range");
  const std::size_t me = i - 1;

  if (const auto* s = std::get_if<StructuredDelay>(&grp.delays)) return s->step < t ? 0.0 : 1.0;

  auto joint_ok = [&](std::span<const double> d) {
    if (inside(d[me], 0.0, t)) return false;
    for (std::size_t j = 0; j < f; ++j) {
      if (j != me && inside(d[j] - d[me], -t, 0.0)) return false;
    }
    return true;
  };
  if (const auto* d = std::get_if<FixedDelays>(&grp.delays)) return joint_ok(d->values) ? 1.0 : 0.0;

  if (const auto* u = std::get_if<UniformDelays>(&grp.delays)) {
    auto given = [&](double x) {
      if (inside(x, 0.0, t)) return 0.0;
      double p = 1.0;
      for (std::size_t j = 0; j < f; ++j) {
        if (j != me) p *= 1.0 - uniform_mass(u->lo[j], u->hi[j], x - t, x);
      }
      return p;
    };
    const double lo = u->lo[me];
    const double hi = u->hi[me];
    if (lo == hi) return given(lo);
    std::vector<double> kinks{0.0, t};
    for (std::size_t j = 0; j < f; ++j) kinks.insert(kinks.end(), {u->lo[j], u->hi[j], u->lo[j] + t, u->hi[j] + t});
    return integrate(given, lo, hi, kinks, opt_.quad_rel_tol) / (hi - lo);
  }

  const auto& s = samples_[g];
  const std::size_t n = s.size() / f;
  std::size_t ok = 0;
  for (std::size_t k = 0; k < n; ++k) ok += joint_ok(std::span<const double>(s.data() + k * f, f));
  return static_cast<double>(ok) / static_cast<double>(n);
}

double WorkingSetModel::leader_hit_prob(std::uint32_t object, std::size_t g, double t) const {
  const double p = p_requested(object, t);
  if (groups_.at(g).followers == 0 || std::holds_alternative<StructuredDelay>(groups_[g].delays)) return p;
  const double m = leader_miss_factor(g, t);
  return m == 1.0 ? p : 1.0 - (1.0 - p) * m;
}

double WorkingSetModel::follower_hit_prob(std::uint32_t object, std::size_t g, std::uint32_t i, double t) const {
  const double p = p_requested(object, t);
  const double m = follower_miss_factor(g, i, t);
  return m == 1.0 ? p : 1.0 - (1.0 - p) * m;
}

ModelHitReport model_hit_report(const WorkingSetModel& model, double b) {
  ModelHitReport rep;
  rep.t = model.solve(b);
  const double t = rep.t.t_star;
  std::vector<double> expo(model.group_count());
  for (std::size_t g = 0; g < model.group_count(); ++g) expo[g] = model.exposure(g, t);
  for (std::size_t g = 0; g < model.group_count(); ++g) {
    const auto& grp = model.group(g);
    std::vector<double> p(grp.object_count);
    for (std::uint32_t k = 0; k < grp.object_count; ++k) {
      double x = 0.0;
      for (std::size_t h = 0; h < model.group_count(); ++h) x += model.object_rate(h, grp.first_object + k) * expo[h];
      p[k] = -std::expm1(-x);
    }

    const double lm = model.leader_miss_factor(g, t);
    const bool structured = std::holds_alternative<StructuredDelay>(grp.delays);
    for (std::uint32_t k = 0; k < grp.object_count; ++k) {
      const double v = structured || lm == 1.0 ? p[k] : 1.0 - (1.0 - p[k]) * lm;
      rep.rows.push_back({static_cast<std::uint32_t>(g + 1), true, 0, grp.first_object + k, v});
    }
    if (grp.followers == 0) continue;
    const bool shared = grp.iid_followers();
    const std::uint32_t columns = shared ? 1 : grp.followers;
    for (std::uint32_t i = 1; i <= columns; ++i) {
      const double fm = model.follower_miss_factor(g, i, t);
      for (std::uint32_t k = 0; k < grp.object_count; ++k) {
        rep.rows.push_back({static_cast<std::uint32_t>(g + 1), false, shared ? 0u : i, grp.first_object + k,
                            fm == 1.0 ? p[k] : 1.0 - (1.0 - p[k]) * fm});
      }
    }
  }
  return rep;
}

void write_model_report_csv(const ModelHitReport& report, std::ostream& out) {
  out << "# t_star=" << text::format_double(report.t.t_star) << '\n';
  out << "# b=" << text::format_double(report.t.b) << '\n';
  out << "# residual=" << text::format_double(report.t.residual) << '\n';
  out << "# method=" << report.t.method << '\n';
  out << "group,client_role,follower_index,object,hit_prob\n";
  for (const auto& r : report.rows) {
    out << r.group << ',' << (r.leader ? "leader" : "follower") << ',';
    if (r.leader) {
      out << '-';
    } else if (r.follower == 0) {
      out << '*';
    } else {
      out << r.follower;
    }
    out << ',' << r.object << ',' << text::format_double(r.hit_prob) << '\n';
  }
}

}  // namespace corrcache
