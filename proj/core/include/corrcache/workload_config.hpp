#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "corrcache/toroid.hpp"
#include "corrcache/trace.hpp"
#include "corrcache/workloads.hpp"

namespace corrcache {

struct ToroidWorkload {
  ToroidSpec spec;
  DynamicsSpec dynamics;
};

using WorkloadConfig = std::variant<GroupedWorkload, ToroidWorkload>;

// Generator config text:
//
//   kind = grouped | toroid
//   key = value            top-level settings
//   [group]                one block per group
//   key = value
//
// '#' starts a comment. Unknown or repeated keys are errors. See
// preset_text() for complete examples of both kinds.
WorkloadConfig parse_workload_config(std::string_view text, const std::string& source = "<config>");
WorkloadConfig load_workload_config(const std::string& path);

// Canonical text; parse_workload_config(format_*(x)) reproduces x.
std::string format_grouped(const GroupedWorkload& w);
std::string format_toroid(const ToroidSpec& spec, const DynamicsSpec& dynamics);
std::string format_workload(const WorkloadConfig& w);

std::string workload_name(const WorkloadConfig& w);

const std::vector<std::string>& preset_names();
bool is_preset(std::string_view name);
// Throws ConfigError listing the available presets for an unknown name.
std::string_view preset_text(std::string_view name);
WorkloadConfig load_preset(std::string_view name);

// Multiplies the horizon (time units or slots) by `scale` (> 0).
WorkloadConfig scale_workload(WorkloadConfig w, double scale);

Trace generate_trace(const WorkloadConfig& w, std::uint64_t seed);

}  // namespace corrcache
