#include <CLI11.hpp>

#include "granulite/pipeline/runner.hpp"

namespace gp = granulite::pipeline;

int main(int argc, char** argv) {
  CLI::App app{"granulite: stockpile reconstruction, particle segmentation and morphometrics"};
  app.require_subcommand(1);

  const char* help[] = {
      "input file (.ply cloud or mesh, .obj mesh, scene text for 'ba')",
      "label file for 'metrics'",
      "directory for outputs and summary.json",
      "Poisson grid cells along the longest axis (8..256, default 64)",
      "padding cells on each side of the grid (default 4)",
      "conjugate gradient relative tolerance (default 1e-8)",
      "neighbors for normal estimation (default 10)",
      "curvature criterion threshold t in [-2, 2] (default 0.7)",
      "drop segments with fewer faces (default 1)",
      "calibration: true length of the reference object",
      "calibration: measured length of the reference object in model units",
      "comma-separated ascending gradation sizes (default: 8 equal steps up to the largest d2)",
      "fixture for 'synth': sphere, icosphere, two-ball, stockpile, scene (default stockpile)",
      "random seed (default 7)",
      "worker threads for the Poisson solve (default 1)",
      "write stage timings into the summary (default true)",
  };
  std::map<std::string, std::string> flags;
  std::string config_path;
  std::vector<std::pair<CLI::App*, std::vector<CLI::Option*>>> subs;
  const std::map<std::string, std::string> descriptions = {
      {"reconstruct", "oriented or plain point cloud -> mesh.ply"},
      {"segment", "mesh -> labels and segments.ply colored by particle"},
      {"metrics", "mesh + labels -> metrics.csv, gradation.csv, metrics.txt"},
      {"ba", "scene text -> refined.scene by bundle adjustment"},
      {"pipeline", "point cloud -> mesh, segmentation and metrics"},
      {"synth", "write a test fixture"}};
  for (const auto& name : gp::commands()) {
    CLI::App* sub = app.add_subcommand(name, descriptions.at(name));
    sub->add_option("--config", config_path, "key = value file; flags override it");
    std::vector<CLI::Option*> opts;
    const auto& keys = gp::setting_names();
    for (std::size_t k = 0; k < keys.size(); ++k) opts.push_back(sub->add_option("--" + keys[k], flags[keys[k]], help[k]));
    subs.emplace_back(sub, opts);
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : gp::kExitConfig;
  }

  gp::PipelineConfig cfg;
  try {
    for (const auto& [sub, opts] : subs) {
      if (!sub->parsed()) continue;
      cfg.command = sub->get_name();
      std::map<std::string, std::string> settings;
      if (!config_path.empty()) settings = gp::read_config_file(config_path);
      const auto& keys = gp::setting_names();
      for (std::size_t k = 0; k < keys.size(); ++k)
        if (opts[k]->count() > 0) settings[keys[k]] = flags[keys[k]];
      for (const auto& [key, value] : settings) gp::apply_setting(cfg, key, value);
    }
  } catch (const granulite::ConfigError& e) {
    std::cerr << "granulite: config error: " << e.what() << '\n';
    return gp::kExitConfig;
  }
  return gp::run_command(cfg);
}
