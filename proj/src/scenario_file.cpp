#include "selection/scenario_file.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>
#include <vector>

#include "selection/errors.hpp"

namespace selection {

namespace {

const std::map<std::string, std::set<std::string>>& known_keys() {
  static const std::map<std::string, std::set<std::string>> keys{
      {"domain", {"x_min", "x_max", "n_cells"}},
      {"model", {"c0", "b", "d", "u0"}},
      {"run", {"t_end", "dt", "sample_every", "scheme", "stop_tol", "snapshot_times"}},
      {"diagnostics", {"epsilon", "tail_R"}},
  };
  return keys;
}

std::string trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return std::string(s.substr(first, last - first + 1));
}

double to_real(const std::string& text, const std::string& key) {
  double v = 0.0;
  const auto res = std::from_chars(text.data(), text.data() + text.size(), v);
  if (res.ec != std::errc() || res.ptr != text.data() + text.size() || !std::isfinite(v))
    throw InputError("invalid number for " + key + ": '" + text + "'");
  return v;
}

int to_int(const std::string& text, const std::string& key) {
  int v = 0;
  const auto res = std::from_chars(text.data(), text.data() + text.size(), v);
  if (res.ec != std::errc() || res.ptr != text.data() + text.size())
    throw InputError("invalid integer for " + key + ": '" + text + "'");
  return v;
}

std::vector<double> to_list(std::string text, const std::string& key) {
  text = trim(text);
  if (!text.empty() && text.front() == '[') {
    if (text.back() != ']') throw InputError("unterminated list for " + key);
    text = text.substr(1, text.size() - 2);
  }
  std::vector<double> out;
  if (trim(text).empty()) return out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(to_real(trim(item), key));
  return out;
}

}  // namespace

bool ScenarioFile::has(const std::string& section, const std::string& key) const {
  const auto s = sections.find(section);
  return s != sections.end() && s->second.count(key) != 0;
}

const std::string& ScenarioFile::get(const std::string& section, const std::string& key) const {
  if (!has(section, key)) throw InputError("missing key " + section + "." + key);
  return sections.at(section).at(key);
}

ScenarioFile parse_scenario_file(std::string_view text) {
  ScenarioFile file;
  std::string section;
  std::size_t line_no = 0;
  std::istringstream in{std::string(text)};
  std::string raw;
  while (std::getline(in, raw)) {
    ++line_no;
    const auto hash = raw.find('#');
    const std::string line = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
    if (line.empty()) continue;
    const std::string where = "line " + std::to_string(line_no) + ": ";
    if (line.front() == '[') {
      if (line.back() != ']') throw InputError(where + "malformed section header");
      section = trim(line.substr(1, line.size() - 2));
      if (!known_keys().count(section)) throw InputError(where + "unknown section [" + section + "]");
      file.sections[section];
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw InputError(where + "expected key = value");
    if (section.empty()) throw InputError(where + "key outside of a section");
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    if (!known_keys().at(section).count(key))
      throw InputError(where + "unknown key " + section + "." + key);
    if (value.empty()) throw InputError(where + "empty value for " + section + "." + key);
    if (!file.sections[section].emplace(key, value).second)
      throw InputError(where + "duplicate key " + section + "." + key);
  }
  return file;
}

Scenario assemble_scenario(const ScenarioFile& file) {
  const Grid grid(to_real(file.get("domain", "x_min"), "domain.x_min"),
                  to_real(file.get("domain", "x_max"), "domain.x_max"),
                  to_int(file.get("domain", "n_cells"), "domain.n_cells"));
  const std::string& b = file.get("model", "b");
  const std::string& d = file.get("model", "d");
  const std::string& u0 = file.get("model", "u0");

  ScenarioSettings cfg;
  if (file.has("model", "c0")) cfg.c0 = to_real(file.get("model", "c0"), "model.c0");
  cfg.t_end = to_real(file.get("run", "t_end"), "run.t_end");
  cfg.dt = to_real(file.get("run", "dt"), "run.dt");
  cfg.sample_every = to_int(file.get("run", "sample_every"), "run.sample_every");
  if (file.has("run", "scheme")) cfg.scheme = scheme_from_string(file.get("run", "scheme"));
  if (file.has("run", "stop_tol")) cfg.stop_tol = to_real(file.get("run", "stop_tol"), "run.stop_tol");
  if (file.has("run", "snapshot_times"))
    cfg.snapshot_times = to_list(file.get("run", "snapshot_times"), "run.snapshot_times");
  if (file.has("diagnostics", "epsilon"))
    cfg.epsilon = to_real(file.get("diagnostics", "epsilon"), "diagnostics.epsilon");
  if (file.has("diagnostics", "tail_R"))
    cfg.tail_R = to_real(file.get("diagnostics", "tail_R"), "diagnostics.tail_R");

  return Scenario::assemble(grid, b, d, u0, cfg);
}

Scenario load_scenario(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open scenario file " + path.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return assemble_scenario(parse_scenario_file(buf.str()));
}

}  // namespace selection
