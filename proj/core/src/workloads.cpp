#include "corrcache/workloads.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "corrcache/errors.hpp"
#include "corrcache/text.hpp"
#include "corrcache/workload_config.hpp"

namespace corrcache {

std::vector<double> zipf_pmf(std::size_t count, double s) {
  if (count == 0) throw ConfigError("zipf: need at least one object");
  if (!(s >= 0.0) || !std::isfinite(s)) throw ConfigError("zipf: exponent must be >= 0");
  std::vector<double> p(count);
  for (std::size_t k = 0; k < count; ++k) p[k] = std::pow(static_cast<double>(k + 1), -s);
  // smallest terms first
  double total = 0.0;
  for (std::size_t k = count; k-- > 0;) total += p[k];
  for (auto& v : p) v /= total;
  return p;
}

std::mt19937_64 stream_rng(std::uint64_t seed, std::uint64_t a, std::uint64_t b) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(a), static_cast<std::uint32_t>(a >> 32),
                    static_cast<std::uint32_t>(b), static_cast<std::uint32_t>(b >> 32)};
  return std::mt19937_64(seq);
}

bool UniformDelays::iid() const {
  for (std::size_t i = 1; i < lo.size(); ++i) {
    if (lo[i] != lo[0] || hi[i] != hi[0]) return false;
  }
  return true;
}

void sample_joint(const JointDelays& d, std::size_t followers, std::mt19937_64& rng, std::vector<double>& out) {
  out.resize(followers);
  double j = 0.0;
  if (d.jitter > 0.0) j = std::uniform_real_distribution<double>(-d.jitter, d.jitter)(rng);
  for (std::size_t i = 0; i < followers; ++i) out[i] = static_cast<double>(i + 1) * d.step + j;
}

bool GroupSpec::iid_followers() const {
  if (followers == 0) return true;
  const auto* u = std::get_if<UniformDelays>(&delays);
  return u && u->iid();
}

std::uint64_t object_size(SizeRule rule, std::uint32_t id) {
  switch (rule) {
    case SizeRule::kUnit: return 1;
    case SizeRule::kEvenOdd: return id % 2 == 0 ? 2 : 5;
  }
  return 1;
}

double GroupedWorkload::effective_rate(std::size_t g) const {
  if (!normalize_rates) return groups.at(g).leader_rate;
  double total = 0.0;
  for (const auto& gr : groups) total += gr.leader_rate;
  return groups.at(g).leader_rate / total;
}

double GroupedWorkload::total_request_rate() const {
  double r = 0.0;
  for (std::size_t g = 0; g < groups.size(); ++g) r += effective_rate(g) * (1.0 + groups[g].followers);
  return r;
}

std::uint32_t GroupedWorkload::client_count() const {
  std::uint32_t c = 0;
  for (const auto& g : groups) c += 1 + g.followers;
  return c;
}

std::uint32_t GroupedWorkload::leader_client(std::size_t g) const {
  std::uint32_t id = 1;
  for (std::size_t h = 0; h < g; ++h) id += 1 + groups[h].followers;
  return id;
}

ObjectCatalog GroupedWorkload::catalog() const {
  std::vector<std::uint32_t> ids;
  for (const auto& g : groups) {
    for (std::uint32_t k = 0; k < g.object_count; ++k) ids.push_back(g.first_object + k);
  }
  std::sort(ids.begin(), ids.end());
  ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
  ObjectCatalog cat;
  for (auto id : ids) cat.add(ObjectKey{id}, object_size(sizes, id));
  return cat;
}

namespace {

struct DelayCheck {
  std::uint32_t f;
  void operator()(const StructuredDelay& d) const {
    if (!(d.step > 0.0) || !std::isfinite(d.step)) throw ConfigError("structured delay step must be > 0");
  }
  void operator()(const FixedDelays& d) const {
    if (d.values.size() != f) throw ConfigError("delay list length must equal the follower count");
    for (double v : d.values) {
      if (!std::isfinite(v)) throw ConfigError("delays must be finite");
    }
  }
  void operator()(const UniformDelays& d) const {
    if (d.lo.size() != f || d.hi.size() != f) {
      throw ConfigError("uniform delay bounds must be given for every follower");
    }
    for (std::size_t i = 0; i < f; ++i) {
      if (!std::isfinite(d.lo[i]) || !std::isfinite(d.hi[i])) throw ConfigError("delays must be finite");
      if (d.lo[i] > d.hi[i]) throw ConfigError("uniform delay needs lo <= hi");
    }
  }
  void operator()(const JointDelays& d) const {
    if (!std::isfinite(d.step) || !(d.jitter >= 0.0) || !std::isfinite(d.jitter)) {
      throw ConfigError("joint delay needs a finite step and jitter >= 0");
    }
  }
};

}  // namespace

void GroupedWorkload::validate() const {
  if (groups.empty()) throw ConfigError("workload has no groups");
  if (!(horizon > 0.0) || !std::isfinite(horizon)) throw ConfigError("horizon must be > 0");
  for (const auto& g : groups) {
    if (g.first_object == 0) throw ConfigError("object ids start at 1");
    if (g.object_count == 0) throw ConfigError("group has no objects");
    if (!(g.leader_rate > 0.0) || !std::isfinite(g.leader_rate)) throw ConfigError("leader rate must be > 0");
    if (!(g.zipf_s >= 0.0)) throw ConfigError("zipf exponent must be >= 0");
    std::visit(DelayCheck{g.followers}, g.delays);
  }
}

Trace gen_grouped_trace(const GroupedWorkload& w, std::uint64_t seed) {
  w.validate();
  Trace trace;
  trace.catalog = w.catalog();

  std::vector<double> delays;
  for (std::size_t g = 0; g < w.groups.size(); ++g) {
    const auto& grp = w.groups[g];
    const double rate = w.effective_rate(g);
    const auto leader = w.leader_client(g);
    const auto pmf = zipf_pmf(grp.object_count, grp.zipf_s);

    auto arrivals = stream_rng(seed, g, 0);
    auto objects = stream_rng(seed, g, 1);
    std::vector<std::mt19937_64> follower_rng;
    for (std::uint32_t i = 0; i < grp.followers; ++i) follower_rng.push_back(stream_rng(seed, g, 2 + i));
    auto joint_rng = stream_rng(seed, g, 1u << 20);

    std::exponential_distribution<double> gap(rate);
    std::discrete_distribution<std::uint32_t> pick(pmf.begin(), pmf.end());
    trace.events.reserve(trace.events.size() +
                         static_cast<std::size_t>(rate * w.horizon * (1.0 + grp.followers) * 1.01) + 16);

    delays.assign(grp.followers, 0.0);
    for (double t = gap(arrivals); t <= w.horizon; t += gap(arrivals)) {
      const ObjectKey key{grp.first_object + pick(objects)};
      trace.events.push_back({t, ClientId{leader}, key});

      if (const auto* s = std::get_if<StructuredDelay>(&grp.delays)) {
        for (std::uint32_t i = 0; i < grp.followers; ++i) delays[i] = (i + 1) * s->step;
      } else if (const auto* f = std::get_if<FixedDelays>(&grp.delays)) {
        delays = f->values;
      } else if (const auto* u = std::get_if<UniformDelays>(&grp.delays)) {
        for (std::uint32_t i = 0; i < grp.followers; ++i) {
          delays[i] = std::uniform_real_distribution<double>(u->lo[i], u->hi[i])(follower_rng[i]);
        }
      } else {
        sample_joint(std::get<JointDelays>(grp.delays), grp.followers, joint_rng, delays);
      }

      for (std::uint32_t i = 0; i < grp.followers; ++i) {
        const double ft = t + delays[i];
        if (ft >= 0.0) trace.events.push_back({ft, ClientId{leader + 1 + i}, key});
      }
    }
  }
  sort_events(trace.events);

  trace.metadata["generator"] = "grouped";
  trace.metadata["name"] = w.name;
  trace.metadata["seed"] = std::to_string(seed);
  trace.metadata["config_hash"] = text::hex64(text::fnv1a(format_grouped(w)));
  return trace;
}

}  // namespace corrcache
