#include "corrcache/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <functional>
#include <mutex>
#include <numeric>
#include <set>
#include <sstream>
#include <thread>

#include "corrcache/analysis.hpp"
#include "corrcache/errors.hpp"
#include "corrcache/text.hpp"
#include "corrcache/trace_io.hpp"

#ifndef CORRCACHE_VERSION
#define CORRCACHE_VERSION "0.0.0"
#endif

namespace corrcache {

std::string_view toolkit_version() { return CORRCACHE_VERSION; }

// ---- sources and capacities -------------------------------------------------

TraceSource TraceSource::parse(std::string_view s) {
  s = text::trim(s);
  TraceSource src;
  if (text::starts_with(s, "preset:")) {
    src.kind = Kind::kPreset;
    src.value = std::string(s.substr(7));
  } else if (text::starts_with(s, "config:")) {
    src.kind = Kind::kConfig;
    src.value = std::string(s.substr(7));
  } else if (text::starts_with(s, "file:")) {
    src.kind = Kind::kFile;
    src.value = std::string(s.substr(5));
  } else {
    src.kind = Kind::kPreset;
    src.value = std::string(s);
  }
  if (src.value.empty()) throw ConfigError("empty trace source");
  if (src.kind == Kind::kPreset) preset_text(src.value);  // unknown names fail here
  return src;
}

std::string TraceSource::str() const {
  switch (kind) {
    case Kind::kPreset: return "preset:" + value;
    case Kind::kConfig: return "config:" + value;
    case Kind::kFile: return "file:" + value;
  }
  return value;
}

CapacitySpec CapacitySpec::parse(std::string_view s) {
  s = text::trim(s);
  CapacitySpec c;
  if (!s.empty() && s.back() == '%') {
    c.percent = true;
    s.remove_suffix(1);
  }
  auto v = text::parse_double(s);
  if (!v || !(*v > 0.0) || !std::isfinite(*v)) throw ConfigError("bad capacity '" + std::string(s) + "'");
  if (!c.percent && *v != std::floor(*v)) throw ConfigError("absolute capacity must be a whole number of bytes");
  c.value = *v;
  return c;
}

std::string CapacitySpec::str() const { return text::format_double(value) + (percent ? "%" : ""); }

void ExperimentConfig::validate() const {
  if (seeds.empty()) throw ConfigError("sweep needs at least one seed");
  if (policies.empty()) throw ConfigError("sweep needs at least one policy");
  if (capacities.empty()) throw ConfigError("capacity grid is empty");
  for (std::size_t k = 1; k < capacities.size(); ++k) {
    if (capacities[k].percent != capacities[0].percent) {
      throw ConfigError("capacity grid mixes percentages and bytes");
    }
    if (!(capacities[k].value > capacities[k - 1].value)) {
      throw ConfigError("capacity grid must be strictly increasing");
    }
  }
  if (!(scale > 0.0)) throw ConfigError("scale must be > 0");
  if (!(local_fraction >= 0.0 && local_fraction < 1.0)) throw ConfigError("local_fraction must lie in [0, 1)");
  // STATIC_OPT rates are derived from the trace at run time
  for (const auto& p : policies) {
    if (p.kind != PolicyKind::kStaticOpt) validate_params(p);
  }
  std::set<std::string> labels;
  for (const auto& p : policies) {
    if (!labels.insert(policy_label(p)).second) throw ConfigError("policy listed twice: " + policy_label(p));
  }
}

namespace {

std::vector<std::string_view> words(std::string_view s) { return text::fields(s); }

}  // namespace

ExperimentConfig parse_experiment_config(std::string_view text, const std::string& source) {
  ExperimentConfig c;
  std::set<std::string> seen;
  std::size_t line_no = 0;
  bool have_trace = false;
  std::istringstream in{std::string(text)};
  std::string raw;
  while (std::getline(in, raw)) {
    ++line_no;
    std::string_view line = raw;
    if (auto h = line.find('#'); h != std::string_view::npos) line = line.substr(0, h);
    line = text::trim(line);
    if (line.empty()) continue;
    auto eq = line.find('=');
    if (eq == std::string_view::npos) throw ParseError(source, line_no, "expected 'key = value'");
    const std::string key(text::trim(line.substr(0, eq)));
    const std::string_view value = text::trim(line.substr(eq + 1));
    if (!seen.insert(key).second) throw ParseError(source, line_no, "repeated key '" + key + "'");
    try {
      if (key == "name") {
        c.name = std::string(value);
      } else if (key == "trace") {
        c.trace = TraceSource::parse(value);
        have_trace = true;
      } else if (key == "scale") {
        auto v = text::parse_double(value);
        if (!v) throw ConfigError("scale: expected a number");
        c.scale = *v;
      } else if (key == "seeds") {
        c.seeds.clear();
        for (auto w : words(value)) {
          auto v = text::parse_uint(w);
          if (!v) throw ConfigError("seeds: bad seed '" + std::string(w) + "'");
          c.seeds.push_back(*v);
        }
      } else if (key == "policies") {
        for (auto p : text::split(value, ';')) {
          if (!text::trim(p).empty()) c.policies.push_back(parse_policy(p));
        }
      } else if (key == "capacities") {
        for (auto w : words(value)) c.capacities.push_back(CapacitySpec::parse(w));
      } else if (key == "capacity_basis") {
        if (value == "volume") {
          c.basis = CapacityBasis::kVolume;
        } else if (value == "footprint") {
          c.basis = CapacityBasis::kFootprint;
        } else {
          throw ConfigError("capacity_basis: expected volume or footprint");
        }
      } else if (key == "local_fraction") {
        auto v = text::parse_double(value);
        if (!v) throw ConfigError("local_fraction: expected a number");
        c.local_fraction = *v;
      } else if (key == "threads") {
        auto v = text::parse_uint(value);
        if (!v || *v > 1024) throw ConfigError("threads: expected a small non-negative integer");
        c.threads = static_cast<unsigned>(*v);
      } else if (key == "output") {
        c.output = std::string(value);
      } else {
        throw ConfigError("unknown key '" + key + "'");
      }
    } catch (const ParseError&) {
      throw;
    } catch (const ConfigError& e) {
      throw ParseError(source, line_no, e.what());
    }
  }
  if (!have_trace) throw ParseError(source, line_no, "missing 'trace'");
  try {
    c.validate();
  } catch (const ConfigError& e) {
    throw ConfigError(source + ": " + e.what());
  }
  return c;
}

ExperimentConfig load_experiment_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_experiment_config(ss.str(), path);
}

std::string format_experiment_config(const ExperimentConfig& c) {
  std::ostringstream out;
  out << "name = " << c.name << '\n';
  out << "trace = " << c.trace.str() << '\n';
  out << "scale = " << text::format_double(c.scale) << '\n';
  out << "seeds =";
  for (auto s : c.seeds) out << ' ' << s;
  out << "\npolicies = ";
  for (std::size_t k = 0; k < c.policies.size(); ++k) out << (k ? "; " : "") << policy_label(c.policies[k]);
  out << "\ncapacities =";
  for (const auto& cap : c.capacities) out << ' ' << cap.str();
  out << "\ncapacity_basis = " << (c.basis == CapacityBasis::kVolume ? "volume" : "footprint") << '\n';
  out << "local_fraction = " << text::format_double(c.local_fraction) << '\n';
  return out.str();
}

Trace load_trace(const TraceSource& src, double scale, std::uint64_t seed, std::optional<WorkloadConfig>* workload) {
  if (src.kind == TraceSource::Kind::kFile) {
    if (workload) workload->reset();
    return read_trace(std::filesystem::path(src.value));
  }
  auto cfg = src.kind == TraceSource::Kind::kPreset ? load_preset(src.value) : load_workload_config(src.value);
  if (scale != 1.0) cfg = scale_workload(std::move(cfg), scale);
  auto trace = generate_trace(cfg, seed);
  if (scale != 1.0) trace.metadata["scale"] = text::format_double(scale);
  if (workload) *workload = std::move(cfg);
  return trace;
}

std::uint64_t resolve_capacity(const CapacitySpec& c, CapacityBasis basis, const Trace& trace) {
  if (!c.percent) return static_cast<std::uint64_t>(c.value);
  double base = 0.0;
  if (basis == CapacityBasis::kVolume) {
    base = static_cast<double>(trace.catalog.total_volume());
  } else {
    std::set<ObjectKey> seen;
    for (const auto& e : trace.events) seen.insert(e.object);
    for (const auto& k : seen) base += static_cast<double>(trace.catalog.size_of(k));
  }
  const double b = std::floor(c.value / 100.0 * base);
  return std::max<std::uint64_t>(1, static_cast<std::uint64_t>(b));
}

std::map<ObjectKey, double> static_rates(const Trace& trace, const std::optional<WorkloadConfig>& workload) {
  std::map<ObjectKey, double> rates;
  if (workload) {
    if (const auto* g = std::get_if<GroupedWorkload>(&*workload)) {
      for (std::size_t k = 0; k < g->groups.size(); ++k) {
        const auto& grp = g->groups[k];
        const auto pmf = zipf_pmf(grp.object_count, grp.zipf_s);
        const double scale = g->effective_rate(k) * (1.0 + grp.followers);
        for (std::uint32_t j = 0; j < grp.object_count; ++j) rates[ObjectKey{grp.first_object + j}] += scale * pmf[j];
      }
      return rates;
    }
  }
  for (const auto& e : trace.catalog.entries()) rates[e.key] = 0.0;
  for (const auto& e : trace.events) rates[e.object] += 1.0;
  return rates;
}

// ---- sweep -----------------------------------------------------------------

const SweepRow& SweepReport::row(std::size_t p, std::size_t c, std::size_t s) const {
  return rows.at((p * capacities.size() + c) * seeds.size() + s);
}

namespace {

void run_parallel(std::size_t n, unsigned threads, const std::function<void(std::size_t)>& fn) {
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, n));
  if (threads <= 1) {
    for (std::size_t k = 0; k < n; ++k) fn(k);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr error;
  std::mutex error_mu;
  std::vector<std::thread> pool;
  for (unsigned t = 0; t < threads; ++t) {
    pool.emplace_back([&] {
      for (;;) {
        const auto k = next.fetch_add(1);
        if (k >= n) return;
        try {
          fn(k);
        } catch (...) {
          std::lock_guard lock(error_mu);
          if (!error) error = std::current_exception();
          next = n;
        }
      }
    });
  }
  for (auto& th : pool) th.join();
  if (error) std::rethrow_exception(error);
}

SweepRow make_row(const SimulationMetrics& m) {
  SweepRow r;
  r.requests = m.forwarded;
  r.hits = m.hits;
  r.bypassed = m.bypassed;
  r.hit_ratio = m.forwarded ? static_cast<double>(m.hits) / static_cast<double>(m.forwarded) : 0.0;
  for (std::uint32_t c = 0; c < m.clients.size(); ++c) {
    const auto t = m.client_total(c);
    r.clients.push_back({to_index(m.clients[c]), t.requests, t.hits});
  }
  return r;
}

}  // namespace

SweepReport run_sweep(const ExperimentConfig& config) {
  config.validate();
  SweepReport rep;
  rep.name = config.name;
  rep.version = std::string(toolkit_version());
  rep.config_hash = text::hex64(text::fnv1a(format_experiment_config(config)));
  for (const auto& p : config.policies) rep.policies.push_back(policy_label(p));
  for (const auto& c : config.capacities) rep.capacities.push_back(c.str());
  rep.seeds = config.seeds;
  rep.rows.resize(config.policies.size() * config.capacities.size() * config.seeds.size());

  const bool needs_rates = std::any_of(config.policies.begin(), config.policies.end(),
                                       [](const PolicyParams& p) { return p.kind == PolicyKind::kStaticOpt; });
  const std::size_t P = config.policies.size();
  const std::size_t C = config.capacities.size();
  const std::size_t S = config.seeds.size();

  std::optional<Trace> shared;
  for (std::size_t s = 0; s < S; ++s) {
    const auto seed = config.seeds[s];
    std::optional<WorkloadConfig> workload;
    Trace local;
    const Trace* trace = nullptr;
    if (config.trace.kind == TraceSource::Kind::kFile) {
      if (!shared) shared = load_trace(config.trace, config.scale, seed, &workload);
      trace = &*shared;
    } else {
      local = load_trace(config.trace, config.scale, seed, &workload);
      trace = &local;
    }
    if (s == 0) {
      if (auto it = trace->metadata.find("config_hash"); it != trace->metadata.end()) {
        rep.notes["trace_config_hash"] = it->second;
      }
      rep.notes["trace_events"] = std::to_string(trace->events.size());
      rep.notes["total_volume"] = std::to_string(trace->catalog.total_volume());
    }
    const auto compiled = compile_trace(*trace);
    std::map<ObjectKey, double> rates;
    if (needs_rates) rates = static_rates(*trace, workload);
    std::vector<std::uint64_t> bytes(C);
    for (std::size_t c = 0; c < C; ++c) bytes[c] = resolve_capacity(config.capacities[c], config.basis, *trace);

    run_parallel(P * C, config.threads, [&](std::size_t k) {
      const std::size_t p = k / C;
      const std::size_t c = k % C;
      auto params = config.policies[p];
      if (params.kind == PolicyKind::kStaticOpt) params.static_rates = rates;
      CacheConfig cc{bytes[c], config.local_fraction};
      SimulationMetrics m;
      try {
        m = simulate(compiled, params, cc, seed);
      } catch (const ConfigError& e) {
        throw ConfigError("policy " + rep.policies[p] + ", capacity " + rep.capacities[c] + ", seed " +
                          std::to_string(seed) + ": " + e.what());
      }
      auto row = make_row(m);
      row.policy = rep.policies[p];
      row.capacity = rep.capacities[c];
      row.capacity_bytes = bytes[c];
      row.seed = seed;
      rep.rows[(p * C + c) * S + s] = std::move(row);
    });
  }
  return rep;
}

std::vector<SummaryRow> summarize(const SweepReport& report) {
  std::vector<SummaryRow> out;
  for (std::size_t p = 0; p < report.policies.size(); ++p) {
    for (std::size_t c = 0; c < report.capacities.size(); ++c) {
      SummaryRow r;
      r.policy = report.policies[p];
      r.capacity = report.capacities[c];
      r.seeds = report.seeds.size();
      std::vector<double> v;
      for (std::size_t s = 0; s < report.seeds.size(); ++s) v.push_back(report.row(p, c, s).hit_ratio);
      double sum = 0.0;
      for (double x : v) sum += x;
      r.mean = sum / static_cast<double>(v.size());
      r.min = *std::min_element(v.begin(), v.end());
      r.max = *std::max_element(v.begin(), v.end());
      if (v.size() > 1) {
        double ss = 0.0;
        for (double x : v) ss += (x - r.mean) * (x - r.mean);
        r.stderr_ = std::sqrt(ss / static_cast<double>(v.size() - 1)) / std::sqrt(static_cast<double>(v.size()));
      }
      out.push_back(r);
    }
  }
  return out;
}

Comparison compare_policies(const SweepReport& report) {
  if (report.policies.size() < 2) throw ConfigError("comparison needs at least two policies");
  const auto summary = summarize(report);
  const std::size_t C = report.capacities.size();
  auto mean = [&](std::size_t p, std::size_t c) { return summary[p * C + c].mean; };
  auto index_of = [&](std::string_view label) -> std::optional<std::size_t> {
    for (std::size_t p = 0; p < report.policies.size(); ++p) {
      if (report.policies[p] == label) return p;
    }
    return std::nullopt;
  };

  Comparison cmp;
  for (std::size_t c = 0; c < C; ++c) {
    std::vector<std::size_t> order(report.policies.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return mean(a, c) > mean(b, c); });
    cmp.best.push_back({report.capacities[c], report.policies[order[0]], mean(order[0], c),
                        mean(order[0], c) - mean(order[1], c)});

    for (std::size_t p = 0; p < report.policies.size(); ++p) {
      if (!text::starts_with(report.policies[p], "LFRU")) continue;
      for (std::string_view base : {"LRU", "LFU"}) {
        auto b = index_of(base);
        if (!b) continue;
        Multiplier m{report.capacities[c], report.policies[p], std::string(base), std::nullopt};
        if (mean(*b, c) > 0.0) m.value = mean(p, c) / mean(*b, c);
        cmp.multipliers.push_back(m);
      }
    }
  }
  return cmp;
}

namespace {

std::string ratio(std::uint64_t hits, std::uint64_t requests) {
  return requests ? text::format_double(static_cast<double>(hits) / static_cast<double>(requests)) : "undefined";
}

void write_file(const std::filesystem::path& path, const std::function<void(std::ostream&)>& body) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot open " + path.string() + " for writing");
  body(out);
  if (!out) throw ConfigError("write failed for " + path.string());
}

// RFC 4180 quoting; policy labels such as "LFRUS(w=2,gamma=0.5)" carry commas.
std::string csv(const std::string& field) {
  if (field.find_first_of(",\"\n") == std::string::npos) return field;
  std::string out = "\"";
  for (char ch : field) {
    if (ch == '"') out += '"';
    out += ch;
  }
  return out + '"';
}

}  // namespace

void write_sweep_csv(const SweepReport& report, std::ostream& out) {
  out << "policy,capacity,capacity_bytes,seed,requests,hits,bypassed,hit_ratio\n";
  for (const auto& r : report.rows) {
    out << csv(r.policy) << ',' << r.capacity << ',' << r.capacity_bytes << ',' << r.seed << ',' << r.requests << ','
        << r.hits << ',' << r.bypassed << ',' << ratio(r.hits, r.requests) << '\n';
  }
}

void write_clients_csv(const SweepReport& report, std::ostream& out) {
  out << "policy,capacity,seed,client,requests,hits,hit_ratio\n";
  for (const auto& r : report.rows) {
    for (const auto& c : r.clients) {
      out << csv(r.policy) << ',' << r.capacity << ',' << r.seed << ',' << c.client << ',' << c.requests << ',' << c.hits
          << ',' << ratio(c.hits, c.requests) << '\n';
    }
  }
}

void write_summary_csv(const std::vector<SummaryRow>& rows, std::ostream& out) {
  out << "policy,capacity,seeds,mean_hit_ratio,min_hit_ratio,max_hit_ratio,stderr\n";
  for (const auto& r : rows) {
    out << csv(r.policy) << ',' << r.capacity << ',' << r.seeds << ',' << text::format_double(r.mean) << ','
        << text::format_double(r.min) << ',' << text::format_double(r.max) << ',' << text::format_double(r.stderr_)
        << '\n';
  }
}

void write_compare_csv(const Comparison& cmp, std::ostream& out) {
  out << "capacity,kind,policy,baseline,value\n";
  for (const auto& b : cmp.best) {
    out << b.capacity << ",best," << csv(b.policy) << ",-," << text::format_double(b.hit_ratio) << '\n';
    out << b.capacity << ",gap," << csv(b.policy) << ",runner-up," << text::format_double(b.gap) << '\n';
  }
  for (const auto& m : cmp.multipliers) {
    out << m.capacity << ",multiplier," << csv(m.policy) << ',' << csv(m.baseline) << ','
        << (m.value ? text::format_double(*m.value) : "undefined") << '\n';
  }
}

void write_sweep_outputs(const SweepReport& report, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  write_file(dir / "sweep.csv", [&](std::ostream& o) { write_sweep_csv(report, o); });
  write_file(dir / "clients.csv", [&](std::ostream& o) { write_clients_csv(report, o); });
  write_file(dir / "summary.csv", [&](std::ostream& o) { write_summary_csv(summarize(report), o); });
  if (report.policies.size() >= 2) {
    write_file(dir / "compare.csv", [&](std::ostream& o) { write_compare_csv(compare_policies(report), o); });
  }
  write_file(dir / "manifest.txt", [&](std::ostream& o) {
    o << "schema=1\n";
    o << "name=" << report.name << '\n';
    o << "version=" << report.version << '\n';
    o << "config_hash=" << report.config_hash << '\n';
    for (const auto& [k, v] : report.notes) o << k << '=' << v << '\n';
  });
}

// ---- reproduce -------------------------------------------------------------

std::vector<OverlayRow> lru_overlay(const GroupedWorkload& w, const Trace& trace, std::uint64_t b,
                                    std::map<std::string, std::string>* notes) {
  WorkingSetModel model(w);
  const auto rep = model_hit_report(model, static_cast<double>(b));
  const auto m = simulate(trace, PolicyParams::lru(), CacheConfig{b, 0.0});

  std::map<std::uint32_t, std::uint32_t> dense;  // external client id -> dense
  for (std::uint32_t c = 0; c < m.clients.size(); ++c) dense[to_index(m.clients[c])] = c;
  std::map<ObjectKey, Slot> slot_of;
  for (Slot s = 0; s < m.objects.size(); ++s) slot_of[m.objects[s]] = s;

  std::vector<OverlayRow> rows;
  double worst = 0.0;
  for (const auto& r : rep.rows) {
    const auto g = r.group - 1;
    const auto leader = w.leader_client(g);
    std::vector<std::uint32_t> clients;
    if (r.leader) {
      clients.push_back(leader);
    } else if (r.follower == 0) {
      for (std::uint32_t i = 1; i <= w.groups[g].followers; ++i) clients.push_back(leader + i);
    } else {
      clients.push_back(leader + r.follower);
    }
    OverlayRow o{"", r.group, r.leader, r.follower, r.object, 0, 0.0, r.hit_prob};
    std::uint64_t hits = 0;
    auto s = slot_of.find(ObjectKey{r.object});
    for (auto c : clients) {
      auto d = dense.find(c);
      if (d == dense.end() || s == slot_of.end()) continue;
      const auto& cell = m.cell(d->second, s->second);
      o.sim_requests += cell.requests;
      hits += cell.hits;
    }
    o.sim_hit_prob = o.sim_requests ? static_cast<double>(hits) / static_cast<double>(o.sim_requests) : 0.0;
    if (r.object - w.groups[g].first_object < 20) worst = std::max(worst, std::abs(o.sim_hit_prob - o.model_hit_prob));
    rows.push_back(o);
  }
  if (notes) {
    (*notes)["capacity_bytes"] = std::to_string(b);
    (*notes)["t_star"] = text::format_double(rep.t.t_star);
    (*notes)["residual"] = text::format_double(rep.t.residual);
    (*notes)["method"] = rep.t.method;
    (*notes)["max_abs_diff_top20"] = text::format_double(worst);
    (*notes)["sim_hit_ratio"] = text::format_double(measured_hit_ratio(m));
  }
  return rows;
}

namespace {

ExperimentConfig default_sweep(const std::string& preset, const ReproduceOptions& opt) {
  ExperimentConfig c;
  c.name = preset;
  c.trace = TraceSource{TraceSource::Kind::kPreset, preset};
  c.scale = opt.scale;
  c.seeds = {opt.seed};
  c.threads = opt.threads;
  for (auto cap : {"0.1%", "0.2%", "0.5%", "1%", "2%", "3.2%", "3.8%", "5%", "10%"}) {
    c.capacities.push_back(CapacitySpec::parse(cap));
  }
  for (auto p : {"LRU", "LFU", "SIEVE", "BELADY", "STATIC_OPT", "LFRU(w=20)", "LFRU(w=2)", "LFRUS(w=20,gamma=0.5)",
                 "LFRUS(w=2,gamma=0.5)"}) {
    c.policies.push_back(parse_policy(p));
  }
  return c;
}

bool non_increasing(const std::vector<double>& v) {
  for (std::size_t k = 1; k < v.size(); ++k) {
    if (v[k] > v[k - 1]) return false;
  }
  return true;
}

}  // namespace

ReproduceResult reproduce(const std::string& preset, const ReproduceOptions& opt) {
  auto base = load_preset(preset);  // throws for unknown names
  if (opt.scale != 1.0) base = scale_workload(std::move(base), opt.scale);
  ReproduceResult res;
  res.preset = preset;
  res.notes["version"] = std::string(toolkit_version());
  res.notes["seed"] = std::to_string(opt.seed);
  res.notes["scale"] = text::format_double(opt.scale);

  if (std::holds_alternative<ToroidWorkload>(base)) {
    auto cfg = default_sweep(preset, opt);
    cfg.local_fraction = 0.05;
    // Belady needs equal sizes
    if (std::get<ToroidWorkload>(base).spec.versioning) {
      std::erase_if(cfg.policies, [](const PolicyParams& p) { return p.kind == PolicyKind::kBelady; });
    }
    res.sweep = run_sweep(cfg);
    return res;
  }

  auto& w = std::get<GroupedWorkload>(base);
  if (preset == "grouped-4.1") {
    auto cfg = default_sweep(preset, opt);
    res.sweep = run_sweep(cfg);
    WorkingSetModel model(w);
    const auto trace = generate_trace(base, opt.seed);
    for (const auto& cap : cfg.capacities) {
      const auto b = resolve_capacity(cap, cfg.basis, trace);
      res.notes["t_star@" + cap.str()] = text::format_double(model.solve(static_cast<double>(b)).t_star);
    }
    return res;
  }

  const auto cap = opt.capacity.value_or(CapacitySpec::parse(preset == "fig2-setup" ? "10%" : "5%"));
  auto overlay_for = [&](const GroupedWorkload& variant, const std::string& label) {
    const auto trace = gen_grouped_trace(variant, opt.seed);
    const auto b = resolve_capacity(cap, CapacityBasis::kVolume, trace);
    std::map<std::string, std::string> notes;
    auto rows = lru_overlay(variant, trace, b, &notes);
    for (auto& r : rows) r.variant = label;
    for (const auto& [k, v] : notes) res.notes[label.empty() ? k : label + "." + k] = v;
    res.overlay.insert(res.overlay.end(), rows.begin(), rows.end());
  };

  std::vector<std::string> labels;
  if (preset == "fig3a-setup") {
    for (double sd : {5.0, 15.0, 25.0}) {
      auto v = w;
      const double h = sd * std::sqrt(3.0);
      const auto f = v.groups[0].followers;
      v.groups[0].delays = UniformDelays{std::vector<double>(f, 30.0 - h), std::vector<double>(f, 30.0 + h)};
      labels.push_back("std=" + text::format_double(sd));
      overlay_for(v, labels.back());
    }
  } else if (preset == "fig3b-setup") {
    for (std::uint32_t f : {2u, 4u, 8u}) {
      auto v = w;
      v.groups[0].followers = f;
      v.groups[0].delays = UniformDelays{std::vector<double>(f, 0.0), std::vector<double>(f, 60.0)};
      labels.push_back("f=" + std::to_string(f));
      overlay_for(v, labels.back());
    }
  } else {
    overlay_for(w, "");
  }

  if (!labels.empty()) {
    // Follower columns per object across the variants, in grid order.
    std::map<std::uint32_t, std::vector<double>> model_col, sim_col;
    for (const auto& r : res.overlay) {
      if (r.leader) continue;
      model_col[r.object].push_back(r.model_hit_prob);
      sim_col[r.object].push_back(r.sim_hit_prob);
    }
    const bool decreasing = preset == "fig3a-setup";
    std::size_t model_ok = 0, sim_ok = 0;
    for (auto& [obj, col] : model_col) {
      auto m = col;
      auto s = sim_col[obj];
      if (!decreasing) {
        std::reverse(m.begin(), m.end());
        std::reverse(s.begin(), s.end());
      }
      model_ok += non_increasing(m);
      sim_ok += non_increasing(s);
    }
    res.notes["trend"] = decreasing ? "non-increasing" : "non-decreasing";
    res.notes["objects"] = std::to_string(model_col.size());
    res.notes["model_trend_objects"] = std::to_string(model_ok);
    res.notes["sim_trend_objects"] = std::to_string(sim_ok);
  }
  return res;
}

void write_overlay_csv(const std::vector<OverlayRow>& rows, std::ostream& out) {
  out << "variant,group,client_role,follower_index,object,sim_requests,sim_hit_prob,model_hit_prob\n";
  for (const auto& r : rows) {
    out << r.variant << ',' << r.group << ',' << (r.leader ? "leader" : "follower") << ',';
    if (r.leader) {
      out << '-';
    } else if (r.follower == 0) {
      out << '*';
    } else {
      out << r.follower;
    }
    out << ',' << r.object << ',' << r.sim_requests << ',' << text::format_double(r.sim_hit_prob) << ','
        << text::format_double(r.model_hit_prob) << '\n';
  }
}

void write_reproduce_outputs(const ReproduceResult& r, const std::filesystem::path& dir) {
  std::filesystem::create_directories(dir);
  if (r.sweep) write_sweep_outputs(*r.sweep, dir);
  if (!r.overlay.empty()) write_file(dir / "overlay.csv", [&](std::ostream& o) { write_overlay_csv(r.overlay, o); });
  write_file(dir / "notes.txt", [&](std::ostream& o) {
    o << "preset=" << r.preset << '\n';
    for (const auto& [k, v] : r.notes) o << k << '=' << v << '\n';
  });
}

}  // namespace corrcache
