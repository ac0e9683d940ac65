#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace corrcache {

// Bad user input: configuration, unknown preset, incompatible policy, domain
// errors. The CLI maps these to exit code 2.
class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ParseError : public ConfigError {
 public:
  ParseError(const std::string& source, std::size_t line, const std::string& what)
      : ConfigError(source + ":" + std::to_string(line) + ": " + what), line_(line) {}

  std::size_t line() const noexcept { return line_; }

 private:
  std::size_t line_;
};

// A broken internal invariant (e.g. a policy nominating a non-resident
// victim). The CLI maps these to exit code 3.
class InternalError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

}  // namespace corrcache
