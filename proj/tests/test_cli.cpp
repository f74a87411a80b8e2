#include <gtest/gtest.h>

#include <array>
#include <cstdio>
#include <fstream>

#include "oracles.hpp"
#include "granulite/pipeline/runner.hpp"

using namespace granulite;
namespace fs = std::filesystem;
using pipeline::Json;

namespace {

struct Result {
  int code = -1;
  std::string output;
};

// Runs the CLI with stdout and stderr merged.
Result cli(const std::string& args) {
  const std::string cmd = std::string("\"") + GRANULITE_CLI + "\" " + args + " 2>&1";
  Result r;
  FILE* pipe = popen(cmd.c_str(), "r");
  if (!pipe) return r;
  std::array<char, 4096> buf;
  std::size_t n;
  while ((n = std::fread(buf.data(), 1, buf.size(), pipe)) > 0) r.output.append(buf.data(), n);
  const int status = pclose(pipe);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / "granulite_cli_tests" / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

std::string slurp(const fs::path& p) {
  std::ifstream is(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(is), std::istreambuf_iterator<char>()};
}

Json summary(const fs::path& dir) { return Json::parse(slurp(dir / "summary.json")); }

fs::path icosphere_mesh() {
  static const fs::path dir = [] {
    const fs::path d = scratch("ico_fixture");
    EXPECT_EQ(cli("synth --fixture icosphere --output-dir " + d.string()).code, 0);
    return d;
  }();
  return dir / "mesh.ply";
}

}  // namespace

TEST(Cli, HelpAndUsageErrors) {
  EXPECT_EQ(cli("--help").code, 0);
  EXPECT_EQ(cli("").code, pipeline::kExitConfig);
  EXPECT_EQ(cli("segment --no-such-flag 1").code, pipeline::kExitConfig);
  EXPECT_EQ(cli("frobnicate").code, pipeline::kExitConfig);
}

TEST(Cli, SynthWritesFixtures) {
  const fs::path d = scratch("synth");
  for (const char* fixture : {"sphere", "icosphere", "two-ball", "scene"})
    EXPECT_EQ(cli(std::string("synth --fixture ") + fixture + " --output-dir " + d.string()).code, 0) << fixture;
  for (const char* f : {"cloud.ply", "mesh.ply", "truth.labels.txt", "truth.scene", "initial.scene", "summary.json"})
    EXPECT_TRUE(fs::exists(d / f)) << f;
  EXPECT_EQ(cli("synth --fixture teapot --output-dir " + d.string()).code, pipeline::kExitConfig);
}

TEST(Cli, SegmentLowThresholdGivesOneSegment) {
  const fs::path d = scratch("segment_low");
  const Result r = cli("segment --input " + icosphere_mesh().string() + " --threshold=-2 --output-dir " + d.string());
  ASSERT_EQ(r.code, 0) << r.output;
  EXPECT_EQ(summary(d)["segment_count"], 1);
  const auto labels = seg::read_labels(d / "segments.labels.txt");
  EXPECT_EQ(labels.segment_count, 1u);
  EXPECT_TRUE(seg::boundary_faces(labels).empty());
  EXPECT_EQ(io::read_ply(d / "segments.ply").faces.size(), labels.face_label.size());
}

TEST(Cli, MissingInputIsConfigError) {
  const fs::path d = scratch("missing");
  const std::string path = (d / "nowhere.ply").string();
  const Result r = cli("segment --input " + path + " --output-dir " + d.string());
  EXPECT_EQ(r.code, pipeline::kExitConfig);
  EXPECT_NE(r.output.find(path), std::string::npos) << r.output;
  EXPECT_EQ(cli("segment --output-dir " + d.string()).code, pipeline::kExitConfig);
  EXPECT_EQ(cli("segment --input " + icosphere_mesh().string() + " --threshold 5 --output-dir " + d.string()).code,
            pipeline::kExitConfig);
  EXPECT_EQ(cli("segment --config " + (d / "none.cfg").string()).code, pipeline::kExitConfig);
}

TEST(Cli, FlagsOverrideConfigFile) {
  const fs::path d = scratch("override");
  {
    std::ofstream os(d / "run.cfg");
    os << "input = " << icosphere_mesh().string() << "\nthreshold = 2\nmin-faces = 3\noutput-dir = " << d.string() << "\n";
  }
  ASSERT_EQ(cli("segment --config " + (d / "run.cfg").string() + " --threshold 0.7").code, 0);
  const Json s = summary(d);
  EXPECT_EQ(s["parameters"]["threshold"], 0.7);
  EXPECT_EQ(s["parameters"]["min_faces"], 3);
  EXPECT_EQ(s["segment_count"], 1);
  // without the flag the file value applies: every face is cut off
  ASSERT_EQ(cli("segment --config " + (d / "run.cfg").string()).code, 0);
  EXPECT_EQ(summary(d)["segment_count"], 0);
}

TEST(Cli, SummaryIsByteStableWithoutTimings) {
  const fs::path a = scratch("stable_a"), b = scratch("stable_b");
  const std::string args = "segment --input " + icosphere_mesh().string() + " --timings false --output-dir ";
  ASSERT_EQ(cli(args + a.string()).code, 0);
  ASSERT_EQ(cli(args + b.string()).code, 0);
  EXPECT_EQ(slurp(a / "summary.json"), slurp(b / "summary.json"));
  EXPECT_FALSE(summary(a).contains("timings_seconds"));
  EXPECT_EQ(slurp(a / "segments.ply"), slurp(b / "segments.ply"));
}

TEST(Cli, SummaryWithTimingsDiffersOnlyInTimings) {
  const fs::path a = scratch("timed_a"), b = scratch("timed_b");
  const std::string args = "segment --input " + icosphere_mesh().string() + " --output-dir ";
  ASSERT_EQ(cli(args + a.string()).code, 0);
  ASSERT_EQ(cli(args + b.string()).code, 0);
  Json sa = summary(a), sb = summary(b);
  ASSERT_TRUE(sa.contains("timings_seconds"));
  sa.erase("timings_seconds");
  sb.erase("timings_seconds");
  EXPECT_EQ(sa.dump(), sb.dump());
}

TEST(Cli, SummaryKeyOrder) {
  const fs::path d = scratch("order");
  ASSERT_EQ(cli("segment --input " + icosphere_mesh().string() + " --output-dir " + d.string()).code, 0);
  const Json s = summary(d);
  std::vector<std::string> keys;
  for (auto it = s.begin(); it != s.end(); ++it) keys.push_back(it.key());
  EXPECT_EQ(keys, (std::vector<std::string>{"command", "input", "parameters", "warnings", "segment", "segment_count", "timings_seconds"}));
  EXPECT_EQ(s["input"], "mesh.ply");
}

TEST(Cli, StageFailureExitCode) {
  const fs::path d = scratch("stage_failure");
  io::write_ply(d / "tiny.ply", PointCloud{{Vec3(0, 0, 0), Vec3(1, 0, 0), Vec3(0, 1, 0)}, {}, {}});
  const Result r = cli("reconstruct --input " + (d / "tiny.ply").string() + " --output-dir " + d.string());
  EXPECT_EQ(r.code, pipeline::kExitStage) << r.output;
  EXPECT_NE(r.output.find("reconstruct"), std::string::npos) << r.output;
}

TEST(Cli, BundleAdjustScene) {
  const fs::path d = scratch("ba");
  ASSERT_EQ(cli("synth --fixture scene --output-dir " + d.string()).code, 0);
  const Result r = cli("ba --input " + (d / "initial.scene").string() + " --output-dir " + d.string());
  ASSERT_EQ(r.code, 0) << r.output;
  const Json s = summary(d)["bundle_adjust"];
  EXPECT_LT(s["final_rmse_px"].get<double>(), 1e-6);
  EXPECT_LT(s["iterations"].get<int>(), 100);
  const auto refined = sfm::read_scene(d / "refined.scene");
  EXPECT_LT(sfm::reprojection_rmse(refined.scene, refined.observations), 1e-6);
}

TEST(Cli, MetricsOnTwoBalls) {
  const fs::path d = scratch("metrics");
  ASSERT_EQ(cli("synth --fixture two-ball --output-dir " + d.string()).code, 0);
  const Result r = cli("metrics --input " + (d / "mesh.ply").string() + " --labels " + (d / "truth.labels.txt").string() +
                       " --true-length 2 --measured-length 1 --sieves 3,5 --output-dir " + d.string());
  ASSERT_EQ(r.code, 0) << r.output;
  const Json s = summary(d)["metrics"];
  EXPECT_EQ(s["particles"], 2);
  EXPECT_EQ(s["scale_factor"], 2.0);
  // two unit spheres scaled by 2 have d2 close to 4
  EXPECT_EQ(slurp(d / "gradation.csv"), "threshold,percent_finer\n3,0.0000\n5,100.0000\n");
  EXPECT_EQ(cli("metrics --input " + (d / "mesh.ply").string() + " --output-dir " + d.string()).code, pipeline::kExitConfig);
}

TEST(Cli, PipelineOnSphere) {
  const fs::path d = scratch("pipeline");
  ASSERT_EQ(cli("synth --fixture sphere --output-dir " + d.string()).code, 0);
  const Result r = cli("pipeline --input " + (d / "cloud.ply").string() + " --grid-res 32 --output-dir " + d.string());
  ASSERT_EQ(r.code, 0) << r.output;
  const Json s = summary(d);
  EXPECT_EQ(s["reconstruct"]["mesh_defects"], 0);
  EXPECT_EQ(s["segment_count"], 1);
  EXPECT_EQ(s["metrics"]["particles"], 1);
  for (const char* f : {"mesh.ply", "segments.ply", "segments.labels.txt", "metrics.csv", "gradation.csv", "metrics.txt"})
    EXPECT_TRUE(fs::exists(d / f)) << f;
}

TEST(Cli, InProcessRunCommand) {
  const fs::path d = scratch("in_process");
  pipeline::PipelineConfig cfg;
  cfg.command = "segment";
  cfg.input = icosphere_mesh();
  cfg.output_dir = d;
  cfg.timings = false;
  std::ostringstream log;
  EXPECT_EQ(pipeline::run_command(cfg, log), pipeline::kExitOk);
  cfg.command = "bogus";
  EXPECT_EQ(pipeline::run_command(cfg, log), pipeline::kExitConfig);
}
