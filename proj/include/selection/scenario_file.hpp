#pragma once

// Sectioned key-value scenario files:
//
//   [domain]       x_min, x_max, n_cells
//   [model]        c0 (default 1), b, d, u0
//   [run]          t_end, dt, sample_every, scheme (default exponential),
//                  stop_tol, snapshot_times
//   [diagnostics]  epsilon, tail_R
//
// '#' starts a comment. Keys are unique within a section.

#include <filesystem>
#include <map>
#include <string>
#include <string_view>

#include "selection/model.hpp"

namespace selection {

struct ScenarioFile {
  std::map<std::string, std::map<std::string, std::string>> sections;

  bool has(const std::string& section, const std::string& key) const;
  const std::string& get(const std::string& section, const std::string& key) const;
};

/// Throws InputError with a line number on malformed text or unknown keys.
ScenarioFile parse_scenario_file(std::string_view text);

/// Throws InputError("missing key model.b") and similar on incomplete files.
Scenario assemble_scenario(const ScenarioFile& file);

Scenario load_scenario(const std::filesystem::path& path);

}  // namespace selection
