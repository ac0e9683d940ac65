#pragma once

#include <filesystem>
#include <iosfwd>
#include <string>

#include "corrcache/trace.hpp"

namespace corrcache {

// Text trace format:
//
//   #meta <key>=<value>
//   #obj <id> <version|-> <size_bytes>
//   <time> <client> <object> <version|->
//
// Times are written as the shortest decimal that round-trips, so
// write_trace followed by read_trace reproduces every event exactly.
void write_trace(const Trace& trace, std::ostream& out);
void write_trace(const Trace& trace, const std::filesystem::path& path);

// Throws ParseError (with the 1-based line number) on malformed input and
// ConfigError when the file cannot be opened.
Trace read_trace(std::istream& in, const std::string& source = "<stream>");
Trace read_trace(const std::filesystem::path& path);

}  // namespace corrcache
