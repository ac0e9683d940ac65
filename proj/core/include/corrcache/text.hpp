#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace corrcache::text {

// Shortest decimal that round-trips to the same double.
std::string format_double(double v);

std::string_view trim(std::string_view s);
std::vector<std::string_view> split(std::string_view s, char sep);
// Whitespace-separated tokens.
std::vector<std::string_view> fields(std::string_view s);
bool starts_with(std::string_view s, std::string_view prefix);

std::optional<double> parse_double(std::string_view s);
std::optional<std::int64_t> parse_int(std::string_view s);
std::optional<std::uint64_t> parse_uint(std::string_view s);

// 64-bit FNV-1a, used for config hashes recorded in outputs.
std::uint64_t fnv1a(std::string_view bytes);
std::string hex64(std::uint64_t v);

}  // namespace corrcache::text
