#include "corrcache/workload_config.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <sstream>

#include "corrcache/errors.hpp"
#include "corrcache/text.hpp"

namespace corrcache {
namespace {

struct Entry {
  std::string value;
  std::size_t line = 0;
  bool used = false;
};

struct Section {
  std::size_t line = 0;
  std::map<std::string, Entry> entries;
};

// Key/value reader with strict accounting: every key must be consumed.
class Reader {
 public:
  Reader(Section& s, const std::string& source) : s_(s), source_(source) {}

  bool has(const std::string& key) const { return s_.entries.count(key) != 0; }

  [[noreturn]] void fail(const std::string& key, const std::string& what) const {
    auto it = s_.entries.find(key);
    throw ParseError(source_, it != s_.entries.end() ? it->second.line : s_.line, what);
  }

  const std::string* raw(const std::string& key) {
    auto it = s_.entries.find(key);
    if (it == s_.entries.end()) return nullptr;
    it->second.used = true;
    return &it->second.value;
  }

  std::string str(const std::string& key, std::string fallback) {
    auto* v = raw(key);
    return v ? *v : fallback;
  }

  double real(const std::string& key, double fallback) {
    auto* v = raw(key);
    if (!v) return fallback;
    auto d = text::parse_double(*v);
    if (!d) fail(key, key + ": expected a number, got '" + *v + "'");
    return *d;
  }

  double required_real(const std::string& key) {
    if (!has(key)) fail(key, "missing '" + key + "'");
    return real(key, 0.0);
  }

  std::uint64_t uint(const std::string& key, std::uint64_t fallback) {
    auto* v = raw(key);
    if (!v) return fallback;
    auto d = text::parse_uint(*v);
    if (!d) fail(key, key + ": expected a non-negative integer, got '" + *v + "'");
    return *d;
  }

  std::uint32_t uint32(const std::string& key, std::uint32_t fallback) {
    const auto v = uint(key, fallback);
    if (v > UINT32_MAX) fail(key, key + ": value too large");
    return static_cast<std::uint32_t>(v);
  }

  bool boolean(const std::string& key, bool fallback) {
    auto* v = raw(key);
    if (!v) return fallback;
    if (*v == "true" || *v == "on" || *v == "yes") return true;
    if (*v == "false" || *v == "off" || *v == "no") return false;
    fail(key, key + ": expected true or false");
  }

  std::vector<double> reals(const std::string& key) {
    std::vector<double> out;
    auto* v = raw(key);
    if (!v) return out;
    for (auto tok : text::fields(*v)) {
      auto d = text::parse_double(tok);
      if (!d) fail(key, key + ": bad number '" + std::string(tok) + "'");
      out.push_back(*d);
    }
    return out;
  }

  void finish() const {
    for (const auto& [k, e] : s_.entries) {
      if (!e.used) throw ParseError(source_, e.line, "unknown key '" + k + "'");
    }
  }

 private:
  Section& s_;
  const std::string& source_;
};

struct Parsed {
  Section top;
  std::vector<Section> groups;
};

Parsed split_sections(std::string_view text, const std::string& source) {
  Parsed p;
  Section* cur = &p.top;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    auto nl = text.find('\n', pos);
    if (nl == std::string_view::npos) nl = text.size();
    std::string_view line = text.substr(pos, nl - pos);
    pos = nl + 1;
    ++line_no;
    if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
    line = text::trim(line);
    if (line.empty()) {
      if (nl == text.size()) break;
      continue;
    }
    if (line.front() == '[') {
      if (line != "[group]") throw ParseError(source, line_no, "unknown section '" + std::string(line) + "'");
      p.groups.push_back(Section{line_no, {}});
      cur = &p.groups.back();
      continue;
    }
    auto eq = line.find('=');
    if (eq == std::string_view::npos) throw ParseError(source, line_no, "expected 'key = value'");
    std::string key(text::trim(line.substr(0, eq)));
    std::string value(text::trim(line.substr(eq + 1)));
    if (key.empty()) throw ParseError(source, line_no, "empty key");
    if (!cur->entries.emplace(key, Entry{value, line_no}).second) {
      throw ParseError(source, line_no, "repeated key '" + key + "'");
    }
    if (nl == text.size()) break;
  }
  return p;
}

DelaySpec parse_delay(Reader& r, std::uint32_t followers) {
  if (!r.has("delay")) {
    if (followers == 0) return StructuredDelay{1.0};
    r.fail("followers", "group with followers needs 'delay'");
  }
  const std::string value = *r.raw("delay");
  auto tok = text::fields(value);
  if (tok.empty()) r.fail("delay", "empty delay");
  auto num = [&](std::string_view s) {
    auto d = text::parse_double(s);
    if (!d) r.fail("delay", "bad number '" + std::string(s) + "' in delay");
    return *d;
  };
  const auto kind = tok[0];
  if (kind == "structured") {
    if (tok.size() != 2) r.fail("delay", "expected 'structured <step>'");
    return StructuredDelay{num(tok[1])};
  }
  if (kind == "fixed") {
    FixedDelays d;
    for (std::size_t i = 1; i < tok.size(); ++i) d.values.push_back(num(tok[i]));
    return d;
  }
  if (kind == "uniform") {
    UniformDelays d;
    const bool pairs = tok.size() >= 2 && tok[1].find(':') != std::string_view::npos;
    if (!pairs) {
      if (tok.size() != 3) r.fail("delay", "expected 'uniform <lo> <hi>' or 'uniform <lo>:<hi> ...'");
      d.lo.assign(followers, num(tok[1]));
      d.hi.assign(followers, num(tok[2]));
      return d;
    }
    for (std::size_t i = 1; i < tok.size(); ++i) {
      auto c = tok[i].find(':');
      if (c == std::string_view::npos) r.fail("delay", "expected '<lo>:<hi>'");
      d.lo.push_back(num(tok[i].substr(0, c)));
      d.hi.push_back(num(tok[i].substr(c + 1)));
    }
    return d;
  }
  if (kind == "joint") {
    if (tok.size() != 3) r.fail("delay", "expected 'joint <step> <jitter>'");
    return JointDelays{num(tok[1]), num(tok[2])};
  }
  r.fail("delay", "unknown delay kind '" + std::string(kind) + "' (structured, fixed, uniform, joint)");
}

std::pair<std::uint32_t, std::uint32_t> parse_range(Reader& r, const std::string& key) {
  if (!r.has(key)) r.fail(key, "missing '" + key + "'");
  const std::string v = *r.raw(key);
  auto dots = v.find("..");
  if (dots == std::string::npos) r.fail(key, key + ": expected '<first>..<last>'");
  auto a = text::parse_uint(text::trim(std::string_view(v).substr(0, dots)));
  auto b = text::parse_uint(text::trim(std::string_view(v).substr(dots + 2)));
  if (!a || !b || *a == 0 || *b < *a || *b > UINT32_MAX) r.fail(key, key + ": bad range '" + v + "'");
  return {static_cast<std::uint32_t>(*a), static_cast<std::uint32_t>(*b - *a + 1)};
}

GroupedWorkload build_grouped(Parsed& p, Reader& top, const std::string& source) {
  GroupedWorkload w;
  w.name = top.str("name", "grouped");
  w.horizon = top.required_real("horizon");
  const auto sizes = top.str("sizes", "unit");
  if (sizes == "unit") {
    w.sizes = SizeRule::kUnit;
  } else if (sizes == "even-odd") {
    w.sizes = SizeRule::kEvenOdd;
  } else {
    top.fail("sizes", "sizes: expected 'unit' or 'even-odd'");
  }
  w.normalize_rates = top.boolean("normalize_rates", false);
  top.finish();

  for (auto& sec : p.groups) {
    Reader r(sec, source);
    GroupSpec g;
    std::tie(g.first_object, g.object_count) = parse_range(r, "objects");
    g.leader_rate = r.required_real("rate");
    g.zipf_s = r.real("zipf", 1.0);
    g.followers = r.uint32("followers", 0);
    g.delays = parse_delay(r, g.followers);
    r.finish();
    w.groups.push_back(std::move(g));
  }
  try {
    w.validate();
  } catch (const ParseError&) {
    throw;
  } catch (const ConfigError& e) {
    throw ConfigError(source + ": " + e.what());
  }
  return w;
}

ToroidWorkload build_toroid(Parsed& p, Reader& top, const std::string& source) {
  ToroidWorkload t;
  auto& s = t.spec;
  s.name = top.str("name", "toroid");
  s.side = top.real("side", s.side);
  s.objects = top.uint32("objects", s.objects);
  s.speed = top.real("speed", s.speed);
  s.direction_period = top.uint32("direction_period", s.direction_period);
  s.radius = top.real("radius", s.radius);
  s.horizon = top.uint32("horizon", 0);
  s.object_size = top.uint("object_size", s.object_size);
  const auto mode = top.str("mode", "every-slot");
  if (mode == "every-slot") {
    s.mode = RequestMode::kEverySlot;
  } else if (mode == "newly-visible") {
    s.mode = RequestMode::kNewlyVisible;
  } else {
    top.fail("mode", "mode: expected 'every-slot' or 'newly-visible'");
  }
  if (top.boolean("versioning", false)) {
    VersionTiers v;
    v.near = top.real("near", v.near);
    v.far = top.real("far", v.far);
    if (top.has("version_sizes")) {
      const auto sz = top.reals("version_sizes");
      if (sz.size() != 3) top.fail("version_sizes", "version_sizes: expected three sizes (high middle low)");
      for (int k = 0; k < 3; ++k) {
        if (!(sz[k] >= 1.0) || sz[k] != static_cast<double>(static_cast<std::uint64_t>(sz[k]))) {
          top.fail("version_sizes", "version_sizes: sizes must be positive integers");
        }
        v.sizes[k] = static_cast<std::uint64_t>(sz[k]);
      }
    }
    s.versioning = v;
  }

  auto& d = t.dynamics;
  const auto dyn = top.str("dynamics", "none");
  if (dyn == "none") {
    d.kind = DynamicsKind::kNone;
  } else if (dyn == "shuffle") {
    d.kind = DynamicsKind::kShuffle;
  } else if (dyn == "switch") {
    d.kind = DynamicsKind::kSwitch;
  } else {
    top.fail("dynamics", "dynamics: expected none, shuffle or switch");
  }
  if (d.kind != DynamicsKind::kNone) d.period = top.uint32("period", 0);
  if (d.kind == DynamicsKind::kSwitch) {
    d.probabilities = top.reals("probabilities");
    d.step_delay = top.uint32("step_delay", d.step_delay);
  }
  top.finish();

  for (auto& sec : p.groups) {
    Reader r(sec, source);
    std::vector<std::uint32_t> delays;
    if (r.has("delays")) {
      for (double v : r.reals("delays")) {
        if (!(v >= 1.0) || v != static_cast<double>(static_cast<std::uint32_t>(v))) {
          r.fail("delays", "delays: slot delays must be positive integers");
        }
        delays.push_back(static_cast<std::uint32_t>(v));
      }
      if (r.has("followers") && r.uint32("followers", 0) != delays.size()) {
        r.fail("followers", "followers disagrees with the delay list");
      }
    } else {
      const auto f = r.uint32("followers", 0);
      const auto step = r.uint32("delay_step", 0);
      if (f > 0 && step == 0) r.fail("followers", "group needs 'delays' or 'delay_step'");
      for (std::uint32_t i = 1; i <= f; ++i) delays.push_back(i * step);
    }
    r.finish();
    s.groups.push_back(std::move(delays));
  }
  try {
    s.validate();
    d.validate(s.groups.size());
  } catch (const ConfigError& e) {
    throw ConfigError(source + ": " + e.what());
  }
  return t;
}

std::string fmt(double v) { return text::format_double(v); }

struct DelayFormat {
  std::string operator()(const StructuredDelay& d) const { return "structured " + fmt(d.step); }
  std::string operator()(const FixedDelays& d) const {
    std::string s = "fixed";
    for (double v : d.values) s += " " + fmt(v);
    return s;
  }
  std::string operator()(const UniformDelays& d) const {
    if (!d.lo.empty() && d.iid()) return "uniform " + fmt(d.lo[0]) + " " + fmt(d.hi[0]);
    std::string s = "uniform";
    for (std::size_t i = 0; i < d.lo.size(); ++i) s += " " + fmt(d.lo[i]) + ":" + fmt(d.hi[i]);
    return s;
  }
  std::string operator()(const JointDelays& d) const { return "joint " + fmt(d.step) + " " + fmt(d.jitter); }
};

// ---- presets ----------------------------------------------------------------

constexpr std::string_view kGrouped41 = R"(kind = grouped
name = grouped-4.1
horizon = 60000
sizes = unit
# leader rates enter in proportion 10:15:20
normalize_rates = true

[group]
objects = 1..1000
rate = 10
zipf = 0.8
followers = 8
delay = structured 10

[group]
objects = 1001..2000
rate = 15
zipf = 0.85
followers = 6
delay = structured 20

[group]
objects = 2001..3000
rate = 20
zipf = 0.9
followers = 4
delay = structured 30
)";

constexpr std::string_view kFig2 = R"(kind = grouped
name = fig2-setup
horizon = 10000
sizes = even-odd

[group]
objects = 1..1000
rate = 10
zipf = 1
followers = 6
delay = uniform -10 20

[group]
objects = 1001..2000
rate = 8
zipf = 1
followers = 4
delay = uniform 15 30

[group]
objects = 2001..3000
rate = 12
zipf = 1
followers = 3
delay = uniform -5 40
)";

constexpr std::string_view kFig3 = R"(kind = grouped
name = fig3-setup
horizon = 5000
sizes = even-odd

[group]
objects = 1..5000
rate = 20
zipf = 1
followers = 4
delay = uniform 0 60
)";

// std 15 around mean 30: half-width 15*sqrt(3)
constexpr std::string_view kFig3a = R"(kind = grouped
name = fig3a-setup
horizon = 5000
sizes = even-odd

[group]
objects = 1..5000
rate = 20
zipf = 1
followers = 4
delay = uniform 4.019237886466843 55.98076211353316
)";

constexpr std::string_view kFig3b = R"(kind = grouped
name = fig3b-setup
horizon = 5000
sizes = even-odd

[group]
objects = 1..5000
rate = 20
zipf = 1
followers = 4
delay = uniform 0 60
)";

constexpr std::string_view kToroidTrace1 = R"(kind = toroid
name = toroid-trace1
horizon = 20000

[group]
followers = 8
delay_step = 4

[group]
followers = 4
delay_step = 8

[group]
followers = 2
delay_step = 20
)";

constexpr std::string_view kToroidShuffle = R"(kind = toroid
name = toroid-shuffle
horizon = 20000
dynamics = shuffle
period = 40

[group]
followers = 8
delay_step = 4

[group]
followers = 4
delay_step = 8

[group]
followers = 2
delay_step = 20
)";

constexpr std::string_view kToroidSwitch = R"(kind = toroid
name = toroid-switch
horizon = 20000
dynamics = switch
period = 50
probabilities = 0.5 0.3 0.2
step_delay = 5

[group]
followers = 8
delay_step = 5

[group]
followers = 4
delay_step = 5

[group]
followers = 2
delay_step = 5
)";

constexpr std::string_view kToroidDelayUniform = R"(kind = toroid
name = toroid-delay-uniform
horizon = 20000

[group]
delays = 25 50
)";

constexpr std::string_view kToroidDelayNonuniform = R"(kind = toroid
name = toroid-delay-nonuniform
horizon = 20000

[group]
delays = 25 90
)";

constexpr std::string_view kToroidVersioned = R"(kind = toroid
name = toroid-versioned
horizon = 20000
mode = newly-visible
versioning = true
near = 10
far = 50
version_sizes = 1000000 500000 100000

[group]
followers = 4
delay_step = 4

[group]
followers = 4
delay_step = 8

[group]
followers = 4
delay_step = 20
)";

const std::vector<std::pair<std::string, std::string_view>>& presets() {
  static const std::vector<std::pair<std::string, std::string_view>> all = {
      {"grouped-4.1", kGrouped41},
      {"fig2-setup", kFig2},
      {"fig3-setup", kFig3},
      {"fig3a-setup", kFig3a},
      {"fig3b-setup", kFig3b},
      {"toroid-trace1", kToroidTrace1},
      {"toroid-shuffle", kToroidShuffle},
      {"toroid-switch", kToroidSwitch},
      {"toroid-delay-uniform", kToroidDelayUniform},
      {"toroid-delay-nonuniform", kToroidDelayNonuniform},
      {"toroid-versioned", kToroidVersioned},
  };
  return all;
}

}  // namespace

WorkloadConfig parse_workload_config(std::string_view text, const std::string& source) {
  auto parsed = split_sections(text, source);
  Reader top(parsed.top, source);
  if (!top.has("kind")) throw ParseError(source, 1, "missing 'kind' (grouped or toroid)");
  const auto kind = top.str("kind", "");
  if (kind == "grouped") return build_grouped(parsed, top, source);
  if (kind == "toroid") return build_toroid(parsed, top, source);
  top.fail("kind", "kind: expected 'grouped' or 'toroid'");
}

WorkloadConfig load_workload_config(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return parse_workload_config(ss.str(), path);
}

std::string format_grouped(const GroupedWorkload& w) {
  std::ostringstream out;
  out << "kind = grouped\n";
  out << "name = " << w.name << '\n';
  out << "horizon = " << fmt(w.horizon) << '\n';
  out << "sizes = " << (w.sizes == SizeRule::kUnit ? "unit" : "even-odd") << '\n';
  out << "normalize_rates = " << (w.normalize_rates ? "true" : "false") << '\n';
  for (const auto& g : w.groups) {
    out << "\n[group]\n";
    out << "objects = " << g.first_object << ".." << (g.first_object + g.object_count - 1) << '\n';
    out << "rate = " << fmt(g.leader_rate) << '\n';
    out << "zipf = " << fmt(g.zipf_s) << '\n';
    out << "followers = " << g.followers << '\n';
    if (g.followers > 0) out << "delay = " << std::visit(DelayFormat{}, g.delays) << '\n';
  }
  return out.str();
}

std::string format_toroid(const ToroidSpec& s, const DynamicsSpec& d) {
  std::ostringstream out;
  out << "kind = toroid\n";
  out << "name = " << s.name << '\n';
  out << "side = " << fmt(s.side) << '\n';
  out << "objects = " << s.objects << '\n';
  out << "speed = " << fmt(s.speed) << '\n';
  out << "direction_period = " << s.direction_period << '\n';
  out << "radius = " << fmt(s.radius) << '\n';
  out << "horizon = " << s.horizon << '\n';
  out << "mode = " << (s.mode == RequestMode::kEverySlot ? "every-slot" : "newly-visible") << '\n';
  if (s.versioning) {
    out << "versioning = true\n";
    out << "near = " << fmt(s.versioning->near) << '\n';
    out << "far = " << fmt(s.versioning->far) << '\n';
    out << "version_sizes = " << s.versioning->sizes[0] << ' ' << s.versioning->sizes[1] << ' '
        << s.versioning->sizes[2] << '\n';
  } else {
    out << "versioning = false\n";
    out << "object_size = " << s.object_size << '\n';
  }
  switch (d.kind) {
    case DynamicsKind::kNone:
      out << "dynamics = none\n";
      break;
    case DynamicsKind::kShuffle:
      out << "dynamics = shuffle\nperiod = " << d.period << '\n';
      break;
    case DynamicsKind::kSwitch:
      out << "dynamics = switch\nperiod = " << d.period << "\nprobabilities =";
      for (double p : d.probabilities) out << ' ' << fmt(p);
      out << "\nstep_delay = " << d.step_delay << '\n';
      break;
  }
  for (const auto& g : s.groups) {
    out << "\n[group]\ndelays =";
    for (auto v : g) out << ' ' << v;
    out << '\n';
  }
  return out.str();
}

std::string format_workload(const WorkloadConfig& w) {
  if (const auto* g = std::get_if<GroupedWorkload>(&w)) return format_grouped(*g);
  const auto& t = std::get<ToroidWorkload>(w);
  return format_toroid(t.spec, t.dynamics);
}

std::string workload_name(const WorkloadConfig& w) {
  if (const auto* g = std::get_if<GroupedWorkload>(&w)) return g->name;
  return std::get<ToroidWorkload>(w).spec.name;
}

const std::vector<std::string>& preset_names() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> n;
    for (const auto& [k, v] : presets()) n.push_back(k);
    return n;
  }();
  return names;
}

bool is_preset(std::string_view name) {
  const auto& n = preset_names();
  return std::find(n.begin(), n.end(), name) != n.end();
}

std::string_view preset_text(std::string_view name) {
  for (const auto& [k, v] : presets()) {
    if (k == name) return v;
  }
  std::string msg = "unknown preset '" + std::string(name) + "'; available:";
  for (const auto& k : preset_names()) msg += " " + k;
  throw ConfigError(msg);
}

WorkloadConfig load_preset(std::string_view name) {
  return parse_workload_config(preset_text(name), "preset:" + std::string(name));
}

WorkloadConfig scale_workload(WorkloadConfig w, double scale) {
  if (!(scale > 0.0) || !std::isfinite(scale)) throw ConfigError("scale must be > 0");
  if (auto* g = std::get_if<GroupedWorkload>(&w)) {
    g->horizon *= scale;
  } else {
    auto& t = std::get<ToroidWorkload>(w);
    const double h = std::round(t.spec.horizon * scale);
    t.spec.horizon = static_cast<std::uint32_t>(std::max(1.0, h));
    t.spec.validate();
  }
  return w;
}

Trace generate_trace(const WorkloadConfig& w, std::uint64_t seed) {
  if (const auto* g = std::get_if<GroupedWorkload>(&w)) return gen_grouped_trace(*g, seed);
  const auto& t = std::get<ToroidWorkload>(w);
  return gen_toroid_trace(t.spec, t.dynamics, seed);
}

}  // namespace corrcache
