#pragma once

#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <sstream>

#include "granulite/error.hpp"

namespace granulite::pipeline {

struct PipelineConfig {
  std::string command;
  std::filesystem::path input;
  std::filesystem::path labels;  // metrics: label file for the input mesh
  std::filesystem::path output_dir = "granulite_out";
  int resolution = 64;
  int padding = 4;
  double cg_tolerance = 1e-8;
  std::size_t normal_neighbors = 10;
  double threshold = 0.7;
  std::size_t min_faces = 1;
  std::optional<double> true_length;
  std::optional<double> measured_length;
  std::vector<double> sieves;  // gradation thresholds; empty = automatic
  std::string fixture = "stockpile";
  std::uint64_t seed = 7;
  unsigned threads = 1;
  bool timings = true;

  void validate() const;
};

// Every setting, by the name used both as `--name` flag and as config file key.
inline const std::vector<std::string>& setting_names() {
  static const std::vector<std::string> names = {"input",     "labels",     "output-dir",    "grid-res",      "padding",
                                                 "cg-tol",    "neighbors",  "threshold",     "min-faces",     "true-length",
                                                 "measured-length", "sieves", "fixture", "seed", "threads", "timings"};
  return names;
}

namespace detail {

inline std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  return s.substr(b, s.find_last_not_of(" \t\r\n") - b + 1);
}

template <typename T>
T parse_number(const std::string& key, const std::string& value) {
  std::istringstream in(value);
  T out{};
  std::string rest;
  if (!(in >> out) || (in >> rest)) throw ConfigError("setting '" + key + "' expects a number, got '" + value + "'");
  if constexpr (std::is_unsigned_v<T>)
    if (trim(value).starts_with("-")) throw ConfigError("setting '" + key + "' must not be negative");
  return out;
}

}  // namespace detail

inline void apply_setting(PipelineConfig& cfg, const std::string& key, const std::string& raw) {
  using detail::parse_number;
  const std::string value = detail::trim(raw);
  if (key == "input") cfg.input = value;
  else if (key == "labels") cfg.labels = value;
  else if (key == "output-dir") cfg.output_dir = value;
  else if (key == "grid-res") cfg.resolution = parse_number<int>(key, value);
  else if (key == "padding") cfg.padding = parse_number<int>(key, value);
  else if (key == "cg-tol") cfg.cg_tolerance = parse_number<double>(key, value);
  else if (key == "neighbors") cfg.normal_neighbors = parse_number<std::size_t>(key, value);
  else if (key == "threshold") cfg.threshold = parse_number<double>(key, value);
  else if (key == "min-faces") cfg.min_faces = parse_number<std::size_t>(key, value);
  else if (key == "true-length") cfg.true_length = parse_number<double>(key, value);
  else if (key == "measured-length") cfg.measured_length = parse_number<double>(key, value);
  else if (key == "fixture") cfg.fixture = value;
  else if (key == "seed") cfg.seed = parse_number<std::uint64_t>(key, value);
  else if (key == "threads") cfg.threads = parse_number<unsigned>(key, value);
  else if (key == "timings") {
    if (value == "true" || value == "1" || value == "on") cfg.timings = true;
    else if (value == "false" || value == "0" || value == "off") cfg.timings = false;
    else throw ConfigError("setting 'timings' expects true or false, got '" + value + "'");
  } else if (key == "sieves") {
    cfg.sieves.clear();
    std::stringstream in(value);
    std::string item;
    while (std::getline(in, item, ','))
      if (!detail::trim(item).empty()) cfg.sieves.push_back(parse_number<double>(key, item));
  } else {
    throw ConfigError("unknown setting '" + key + "'");
  }
}

// Flat `key = value` lines; '#' starts a comment.
inline std::map<std::string, std::string> read_config_file(const std::filesystem::path& path) {
  std::ifstream is(path);
  if (!is) throw ConfigError("cannot open config file " + path.string());
  std::map<std::string, std::string> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(is, line)) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    if (detail::trim(line).empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ConfigError(path.string() + ":" + std::to_string(line_no) + ": expected 'key = value'");
    out[detail::trim(line.substr(0, eq))] = detail::trim(line.substr(eq + 1));
  }
  return out;
}

inline void PipelineConfig::validate() const {
  if (resolution < 8 || resolution > 256) throw ConfigError("grid-res must lie in [8, 256], got " + std::to_string(resolution));
  if (padding < 1 || resolution - 2 * padding < 2) throw ConfigError("padding must be at least 1 and leave interior cells");
  if (!(threshold >= -2.0 && threshold <= 2.0)) throw ConfigError("threshold must lie in [-2, 2]");
  if (!(cg_tolerance > 0.0)) throw ConfigError("cg-tol must be positive");
  if (min_faces < 1) throw ConfigError("min-faces must be at least 1");
  if (normal_neighbors < 3) throw ConfigError("neighbors must be at least 3");
  if (threads < 1) throw ConfigError("threads must be at least 1");
  if (true_length.has_value() != measured_length.has_value())
    throw ConfigError("true-length and measured-length must be given together");
  if (true_length && (!(*true_length > 0.0) || !(*measured_length > 0.0))) throw ConfigError("calibration lengths must be positive");
  for (std::size_t i = 1; i < sieves.size(); ++i)
    if (!(sieves[i] > sieves[i - 1])) throw ConfigError("sieves must be strictly ascending");
  if (output_dir.empty()) throw ConfigError("output-dir must not be empty");
}

}  // namespace granulite::pipeline
