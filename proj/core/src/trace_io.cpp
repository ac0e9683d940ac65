#include "corrcache/trace_io.hpp"

#include <fstream>
#include <istream>
#include <ostream>

#include "corrcache/errors.hpp"
#include "corrcache/text.hpp"

namespace corrcache {
namespace {

std::string version_token(ObjectKey k) {
  return k.versioned() ? std::to_string(static_cast<int>(k.version)) : std::string("-");
}

std::int8_t parse_version(std::string_view tok, const std::string& src, std::size_t line) {
  if (tok == "-") return ObjectKey::kNoVersion;
  auto v = text::parse_int(tok);
  if (!v || *v < 0 || *v > 127) throw ParseError(src, line, "bad version '" + std::string(tok) + "'");
  return static_cast<std::int8_t>(*v);
}

}  // namespace

void write_trace(const Trace& trace, std::ostream& out) {
  for (const auto& [k, v] : trace.metadata) out << "#meta " << k << '=' << v << '\n';
  for (const auto& e : trace.catalog.entries()) {
    out << "#obj " << e.key.id << ' ' << version_token(e.key) << ' ' << e.size_bytes << '\n';
  }
  std::string line;
  for (const auto& e : trace.events) {
    line.clear();
    line += text::format_double(e.time);
    line += ' ';
    line += std::to_string(to_index(e.client));
    line += ' ';
    line += std::to_string(e.object.id);
    line += ' ';
    line += version_token(e.object);
    line += '\n';
    out << line;
  }
}

void write_trace(const Trace& trace, const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ConfigError("cannot open " + path.string() + " for writing");
  write_trace(trace, out);
  if (!out) throw ConfigError("write failed for " + path.string());
}

Trace read_trace(std::istream& in, const std::string& source) {
  Trace trace;
  std::string raw;
  std::size_t line_no = 0;
  while (std::getline(in, raw)) {
    ++line_no;
    std::string_view line = text::trim(raw);
    if (line.empty()) continue;
    if (text::starts_with(line, "#meta ")) {
      auto body = text::trim(line.substr(6));
      auto eq = body.find('=');
      if (eq == std::string_view::npos) throw ParseError(source, line_no, "meta line without '='");
      trace.metadata[std::string(body.substr(0, eq))] = std::string(body.substr(eq + 1));
      continue;
    }
    if (text::starts_with(line, "#obj ")) {
      auto f = text::fields(line.substr(5));
      if (f.size() != 3) throw ParseError(source, line_no, "expected '#obj <id> <version|-> <size>'");
      auto id = text::parse_uint(f[0]);
      auto size = text::parse_uint(f[2]);
      if (!id || *id == 0 || *id > UINT32_MAX) throw ParseError(source, line_no, "bad object id");
      if (!size || *size == 0) throw ParseError(source, line_no, "bad object size");
      ObjectKey key{static_cast<std::uint32_t>(*id), parse_version(f[1], source, line_no)};
      try {
        trace.catalog.add(key, *size);
      } catch (const ConfigError& e) {
        throw ParseError(source, line_no, e.what());
      }
      continue;
    }
    if (line.front() == '#') continue;
    auto f = text::fields(line);
    if (f.size() != 4) {
      throw ParseError(source, line_no, "expected '<time> <client> <object> <version|->', got '" +
                                            std::string(line) + "'");
    }
    auto t = text::parse_double(f[0]);
    auto c = text::parse_uint(f[1]);
    auto o = text::parse_uint(f[2]);
    if (!t) throw ParseError(source, line_no, "bad time '" + std::string(f[0]) + "'");
    if (!c || *c == 0 || *c > UINT32_MAX) throw ParseError(source, line_no, "bad client id");
    if (!o || *o == 0 || *o > UINT32_MAX) throw ParseError(source, line_no, "bad object id");
    trace.events.push_back({*t, ClientId{static_cast<std::uint32_t>(*c)},
                            ObjectKey{static_cast<std::uint32_t>(*o), parse_version(f[3], source, line_no)}});
  }
  return trace;
}

Trace read_trace(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ConfigError("cannot open trace " + path.string());
  return read_trace(in, path.string());
}

}  // namespace corrcache
