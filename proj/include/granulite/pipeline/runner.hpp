#pragma once

#include <chrono>
#include <functional>
#include <iostream>

#include "json.hpp"

#include "granulite/geometry/primitives.hpp"
#include "granulite/geometry/validate.hpp"
#include "granulite/io/obj.hpp"
#include "granulite/io/ply.hpp"
#include "granulite/morpho/gradation.hpp"
#include "granulite/pipeline/config.hpp"
#include "granulite/recon/reconstruct.hpp"
#include "granulite/sfm/bundle_adjust.hpp"
#include "granulite/sfm/scene_io.hpp"
#include "granulite/sfm/synth_scene.hpp"
#include "granulite/synth/fixtures.hpp"

namespace granulite::pipeline {

inline constexpr int kExitOk = 0;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitStage = 3;

using Json = nlohmann::ordered_json;

// Raised inside a stage; carries the stage name into the error message.
class StageFailure : public Error {
 public:
  StageFailure(const std::string& stage, const std::string& what) : Error(stage + ": " + what), stage_name(stage) {}
  std::string stage_name;
};

class Run {
 public:
  explicit Run(PipelineConfig cfg, std::ostream& log) : cfg_(std::move(cfg)), log_(log) {}

  const PipelineConfig& config() const { return cfg_; }
  Json& summary() { return summary_; }
  std::filesystem::path out(const std::string& name) const { return cfg_.output_dir / name; }

  // Runs fn as a named stage: timing recorded separately from results, any
  // library error rethrown tagged with the stage name.
  template <typename Fn>
  auto stage(const std::string& name, Fn&& fn) {
    log_ << "[" << name << "]\n";
    const auto t0 = std::chrono::steady_clock::now();
    try {
      if constexpr (std::is_void_v<decltype(fn())>) {
        fn();
        record_time(name, t0);
      } else {
        auto result = fn();
        record_time(name, t0);
        return result;
      }
    } catch (const StageFailure&) {
      throw;
    } catch (const std::exception& e) {
      throw StageFailure(name, e.what());
    }
  }

  void warn(const std::string& stage, const std::string& message) {
    log_ << "  warning: " << message << '\n';
    summary_["warnings"].push_back(stage + ": " + message);
  }

  void write_summary() {
    if (cfg_.timings) summary_["timings_seconds"] = timings_;
    std::ofstream os(out("summary.json"));
    if (!os) throw IoError("cannot write " + out("summary.json").string());
    os << summary_.dump(2) << '\n';
  }

  std::ostream& log() { return log_; }

 private:
  void record_time(const std::string& name, std::chrono::steady_clock::time_point t0) {
    timings_[name] = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  }

  PipelineConfig cfg_;
  std::ostream& log_;
  Json summary_ = Json::object();
  Json timings_ = Json::object();
};

namespace detail {

inline Json parameters_json(const PipelineConfig& c) {
  Json p;
  p["grid_res"] = c.resolution;
  p["padding"] = c.padding;
  p["cg_tol"] = c.cg_tolerance;
  p["neighbors"] = c.normal_neighbors;
  p["threshold"] = c.threshold;
  p["min_faces"] = c.min_faces;
  p["seed"] = c.seed;
  p["threads"] = c.threads;
  if (c.true_length) {
    p["true_length"] = *c.true_length;
    p["measured_length"] = *c.measured_length;
  }
  if (!c.sieves.empty()) p["sieves"] = c.sieves;
  return p;
}

inline std::string extension(const std::filesystem::path& p) {
  std::string e = p.extension().string();
  std::transform(e.begin(), e.end(), e.begin(), [](unsigned char ch) { return static_cast<char>(std::tolower(ch)); });
  return e;
}

inline PointCloud load_cloud(Run& run) {
  const auto& path = run.config().input;
  if (extension(path) != ".ply") throw Error("point clouds are read from .ply files: " + path.string());
  io::PlyData data = io::read_ply(path);
  for (const auto& w : data.warnings) run.warn("read", w);
  if (data.has_face_element && !data.faces.empty()) run.warn("read", "input has faces; only its vertices are used");
  return data.cloud;
}

inline TriMesh load_mesh(Run& run) {
  const auto& path = run.config().input;
  const std::string ext = extension(path);
  if (ext == ".obj") return io::read_obj(path);
  if (ext != ".ply") throw Error("meshes are read from .ply or .obj files: " + path.string());
  io::PlyData data = io::read_ply(path);
  for (const auto& w : data.warnings) run.warn("read", w);
  if (data.faces.empty()) throw Error(path.string() + " has no faces");
  return data.mesh();
}

inline TriMesh reconstruct(Run& run, const PointCloud& cloud) {
  const auto& c = run.config();
  recon::ReconstructionParams params;
  params.resolution = c.resolution;
  params.padding = c.padding;
  params.cg_tolerance = c.cg_tolerance;
  params.normal_neighbors = c.normal_neighbors;
  params.threads = c.threads;
  recon::Reconstruction rec = run.stage("reconstruct", [&] { return recon::reconstruct_surface_detailed(cloud, params); });
  if (!rec.cg_converged)
    run.warn("reconstruct", "conjugate gradient stopped before reaching the tolerance");
  const MeshReport report = validate_mesh(rec.mesh);
  if (!report.empty()) run.warn("reconstruct", report.summary());
  Json& s = run.summary()["reconstruct"];
  s["points"] = cloud.size();
  s["normals_estimated"] = rec.normals_estimated;
  s["grid"] = {rec.lattice.nx, rec.lattice.ny, rec.lattice.nz};
  s["spacing"] = rec.lattice.h;
  s["iso_level"] = rec.iso_level;
  s["cg_iterations"] = rec.cg_iterations;
  s["cg_relative_residual"] = rec.cg_relative_residual;
  s["cg_converged"] = rec.cg_converged;
  s["vertices"] = rec.mesh.vertices.size();
  s["faces"] = rec.mesh.faces.size();
  s["mesh_defects"] = report.defect_count();
  run.stage("write_mesh", [&] { io::write_ply(run.out("mesh.ply"), rec.mesh); });
  return rec.mesh;
}

inline seg::SegmentLabels segment(Run& run, const TriMesh& mesh) {
  const auto& c = run.config();
  std::vector<std::string> warnings;
  seg::SegmentLabels raw = run.stage("segment", [&] {
    const FaceAdjacency adj = build_adjacency(mesh);
    return seg::segment_mesh(mesh, adj, seg::CriterionParams{c.threshold}, &warnings);
  });
  for (const auto& w : warnings) run.warn("segment", w);
  seg::SegmentLabels labels = c.min_faces > 1 ? seg::filter_segments(raw, c.min_faces) : raw;
  Json& s = run.summary()["segment"];
  s["faces"] = mesh.faces.size();
  s["raw_segment_count"] = raw.segment_count;
  s["segment_count"] = labels.segment_count;
  s["boundary_faces"] = seg::boundary_faces(labels).size();
  auto sizes = labels.segment_sizes();
  std::sort(sizes.begin(), sizes.end(), std::greater<>());
  s["largest_segments"] = std::vector<std::size_t>(sizes.begin(), sizes.begin() + static_cast<std::ptrdiff_t>(std::min<std::size_t>(sizes.size(), 16)));
  run.summary()["segment_count"] = labels.segment_count;
  run.stage("write_labels", [&] { io::write_ply_labeled(mesh, labels, run.out("segments.ply")); });
  return labels;
}

inline void metrics(Run& run, const TriMesh& input_mesh, const seg::SegmentLabels& labels) {
  const auto& c = run.config();
  const TriMesh mesh = c.true_length ? morpho::apply_scale(input_mesh, *c.true_length, *c.measured_length) : input_mesh;
  const morpho::MetricsTable table = run.stage("metrics", [&] { return morpho::all_segment_metrics(mesh, labels); });
  if (!table.skipped.empty())
    run.warn("metrics", std::to_string(table.skipped.size()) + " segments with fewer than 4 faces or no extent were not measured");
  Json& s = run.summary()["metrics"];
  s["scale_factor"] = c.true_length ? *c.true_length / *c.measured_length : 1.0;
  s["particles"] = table.particles.size();
  s["skipped_segments"] = table.skipped.size();
  if (table.particles.empty()) {
    run.warn("metrics", "no segment is large enough to measure; gradation skipped");
    return;
  }
  std::vector<double> sieves = c.sieves;
  if (sieves.empty()) {
    double largest = 0.0;
    for (const auto& p : table.particles) largest = std::max(largest, p.d2());
    for (int k = 1; k <= 8; ++k) sieves.push_back(largest * k / 8.0);
  }
  const morpho::GradationReport grad = run.stage("gradation", [&] { return morpho::gradation_report(table.particles, sieves); });
  Json rows = Json::array();
  for (const auto& r : grad.rows) rows.push_back({std::isinf(r.threshold) ? Json("inf") : Json(r.threshold), r.percent_finer});
  s["gradation"] = rows;
  run.stage("write_metrics", [&] {
    std::ofstream csv(run.out("metrics.csv")), gcsv(run.out("gradation.csv")), txt(run.out("metrics.txt"));
    if (!csv || !gcsv || !txt) throw IoError("cannot write metrics files in " + c.output_dir.string());
    morpho::write_metrics_csv(csv, table.particles);
    morpho::write_gradation_csv(gcsv, grad);
    morpho::write_metrics_table(txt, table.particles);
    txt << '\n';
    morpho::write_gradation_table(txt, grad);
  });
}

inline void bundle(Run& run) {
  const auto& path = run.config().input;
  const sfm::SceneFile file = run.stage("read", [&] { return sfm::read_scene(path); });
  auto [refined, report] = run.stage("bundle_adjust", [&] { return sfm::bundle_adjust(file.scene, file.observations); });
  for (const auto& w : report.warnings) run.warn("bundle_adjust", w);
  Json& s = run.summary()["bundle_adjust"];
  s["cameras"] = file.scene.cameras.size();
  s["points"] = file.scene.points.size();
  s["observations"] = file.observations.size();
  s["iterations"] = report.iterations;
  s["accepted_steps"] = report.accepted;
  s["initial_cost"] = report.initial_cost;
  s["final_cost"] = report.final_cost;
  s["final_rmse_px"] = std::sqrt(report.final_cost / static_cast<double>(std::max<std::size_t>(file.observations.size(), 1)));
  s["termination"] = sfm::to_string(report.termination);
  run.stage("write_scene", [&] { sfm::write_scene(run.out("refined.scene"), refined, file.observations); });
}

inline void write_balls(const std::filesystem::path& path, const std::vector<synth::Ball>& balls) {
  std::ofstream os(path);
  if (!os) throw IoError("cannot write " + path.string());
  os.precision(17);
  os << "# BALL id cx cy cz radius\n";
  for (std::size_t b = 0; b < balls.size(); ++b)
    os << "BALL " << b << ' ' << balls[b].center.x() << ' ' << balls[b].center.y() << ' ' << balls[b].center.z() << ' '
       << balls[b].radius << '\n';
}

inline void synthesize(Run& run) {
  const auto& c = run.config();
  Json& s = run.summary()["synth"];
  s["fixture"] = c.fixture;
  run.stage("synth", [&] {
    if (c.fixture == "sphere") {
      const PointCloud cloud = synth::sphere_cloud(2000, c.seed);
      io::write_ply(run.out("cloud.ply"), cloud);
      s["points"] = cloud.size();
    } else if (c.fixture == "icosphere" || c.fixture == "two-ball") {
      const TriMesh mesh = c.fixture == "icosphere" ? icosphere(3) : synth::two_ball_mesh(3);
      io::write_ply(run.out("mesh.ply"), mesh);
      seg::SegmentLabels truth;
      const std::size_t half = mesh.faces.size() / 2;
      for (std::size_t f = 0; f < mesh.faces.size(); ++f)
        truth.face_label.push_back(c.fixture == "icosphere" ? 0 : static_cast<std::int32_t>(f >= half));
      truth.segment_count = c.fixture == "icosphere" ? 1 : 2;
      seg::write_labels(run.out("truth.labels.txt"), truth);
      s["faces"] = mesh.faces.size();
    } else if (c.fixture == "stockpile") {
      synth::StockpileOptions opts;
      opts.seed = c.seed;
      const synth::Stockpile pile = synth::make_stockpile(opts);
      io::write_ply(run.out("cloud.ply"), pile.cloud);
      write_balls(run.out("balls.txt"), pile.balls);
      s["points"] = pile.cloud.size();
      s["balls"] = pile.balls.size();
    } else if (c.fixture == "scene") {
      sfm::SceneSpec spec;
      spec.seed = c.seed;
      const sfm::SyntheticScene scene = sfm::synth_scene(spec);
      sfm::write_scene(run.out("truth.scene"), scene.truth, scene.observations);
      sfm::write_scene(run.out("initial.scene"), sfm::perturb_scene(scene.truth, 1e-2, c.seed + 1), scene.observations);
      s["cameras"] = scene.truth.cameras.size();
      s["points"] = scene.truth.points.size();
    } else {
      throw ConfigError("unknown fixture '" + c.fixture + "' (sphere, icosphere, two-ball, stockpile, scene)");
    }
  });
}

}  // namespace detail

inline const std::vector<std::string>& commands() {
  static const std::vector<std::string> names = {"reconstruct", "segment", "metrics", "ba", "pipeline", "synth"};
  return names;
}

// Executes one subcommand. Returns the process exit code; messages go to `log`.
inline int run_command(const PipelineConfig& cfg, std::ostream& log = std::cerr) {
  try {
    if (std::find(commands().begin(), commands().end(), cfg.command) == commands().end())
      throw ConfigError("unknown command '" + cfg.command + "'");
    cfg.validate();
    if (cfg.command != "synth") {
      if (cfg.input.empty()) throw ConfigError("--input is required for '" + cfg.command + "'");
      if (!std::filesystem::exists(cfg.input)) throw ConfigError("input file not found: " + cfg.input.string());
    }
    if (cfg.command == "metrics") {
      if (cfg.labels.empty()) throw ConfigError("--labels is required for 'metrics'");
      if (!std::filesystem::exists(cfg.labels)) throw ConfigError("label file not found: " + cfg.labels.string());
    }
    if (cfg.command == "synth" && cfg.fixture != "sphere" && cfg.fixture != "icosphere" && cfg.fixture != "two-ball" &&
        cfg.fixture != "stockpile" && cfg.fixture != "scene")
      throw ConfigError("unknown fixture '" + cfg.fixture + "' (sphere, icosphere, two-ball, stockpile, scene)");
    std::error_code ec;
    std::filesystem::create_directories(cfg.output_dir, ec);
    if (ec) throw ConfigError("cannot create output directory " + cfg.output_dir.string() + ": " + ec.message());
  } catch (const ConfigError& e) {
    log << "granulite: config error: " << e.what() << '\n';
    return kExitConfig;
  }

  Run run(cfg, log);
  run.summary()["command"] = cfg.command;
  run.summary()["input"] = cfg.input.filename().string();
  run.summary()["parameters"] = detail::parameters_json(cfg);
  run.summary()["warnings"] = Json::array();
  try {
    if (cfg.command == "reconstruct") {
      const PointCloud cloud = run.stage("read", [&] { return detail::load_cloud(run); });
      detail::reconstruct(run, cloud);
    } else if (cfg.command == "segment") {
      const TriMesh mesh = run.stage("read", [&] { return detail::load_mesh(run); });
      detail::segment(run, mesh);
    } else if (cfg.command == "metrics") {
      const TriMesh mesh = run.stage("read", [&] { return detail::load_mesh(run); });
      const seg::SegmentLabels labels = run.stage("read_labels", [&] {
        auto l = seg::read_labels(cfg.labels);
        if (l.face_label.size() != mesh.faces.size())
          throw Error("label file covers " + std::to_string(l.face_label.size()) + " faces, mesh has " + std::to_string(mesh.faces.size()));
        return l;
      });
      detail::metrics(run, mesh, labels);
    } else if (cfg.command == "ba") {
      detail::bundle(run);
    } else if (cfg.command == "pipeline") {
      const PointCloud cloud = run.stage("read", [&] { return detail::load_cloud(run); });
      const TriMesh mesh = detail::reconstruct(run, cloud);
      const seg::SegmentLabels labels = detail::segment(run, mesh);
      detail::metrics(run, mesh, labels);
    } else if (cfg.command == "synth") {
      detail::synthesize(run);
    }
    run.write_summary();
  } catch (const StageFailure& e) {
    log << "granulite: stage failed: " << e.what() << '\n';
    return kExitStage;
  } catch (const std::exception& e) {
    log << "granulite: failed: " << e.what() << '\n';
    return kExitStage;
  }
  log << "summary: " << run.out("summary.json").string() << '\n';
  return kExitOk;
}

}  // namespace granulite::pipeline
