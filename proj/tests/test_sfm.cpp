#include <gtest/gtest.h>

#include "oracles.hpp"

using namespace granulite;
using namespace granulite::sfm;

namespace {

CameraView canonical() {
  CameraView c;
  c.P.setZero();
  c.P.leftCols<3>().setIdentity();
  return c;
}

CameraView random_camera(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-1, 1);
  Mat3 K = Mat3::Identity();
  K(0, 0) = 500 + 100 * u(rng);
  K(1, 1) = 500 + 100 * u(rng);
  K(0, 1) = 2 * u(rng);
  K(0, 2) = 320 + 10 * u(rng);
  K(1, 2) = 240 + 10 * u(rng);
  return {compose(K, random_rotation(rng), Vec3(u(rng), u(rng), u(rng)) * 3)};
}

}  // namespace

TEST(Project, CanonicalCamera) {
  EXPECT_EQ(project(canonical(), Vec3(0, 0, 1)), Vec2(0, 0));
  EXPECT_EQ(project(canonical(), Vec3(2, 4, 2)), Vec2(1, 2));
}

TEST(Project, MatchesHomogeneousMultiply) {
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> u(-3, 3);
  for (int trial = 0; trial < 100; ++trial) {
    const CameraView cam = random_camera(rng);
    const Vec3 X(u(rng), u(rng), u(rng));
    Eigen::Vector4d Xh(X.x(), X.y(), X.z(), 1.0);
    const Vec3 h = cam.P * Xh;
    if (std::abs(h.z()) < 1e-3) continue;
    const Vec2 expected(h.x() / h.z(), h.y() / h.z());
    EXPECT_LT((project(cam, X) - expected).norm(), 1e-12 * std::max(1.0, expected.norm()));
  }
}

TEST(Project, PrincipalPlaneThrows) {
  EXPECT_THROW(project(canonical(), Vec3(1, 1, 0), 3, 4), PointAtInfinity);
  try {
    project(canonical(), Vec3(1, 1, 0), 3, 4);
  } catch (const PointAtInfinity& e) {
    EXPECT_EQ(e.camera_id, 3u);
    EXPECT_EQ(e.point_id, 4u);
  }
}

TEST(ReprojectionError, SelfConsistentIsZero) {
  const auto scene = synth_scene({});
  EXPECT_LT(reprojection_error(scene.truth, scene.observations), 1e-18);
}

TEST(ReprojectionError, ThreeFourFive) {
  SceneEstimate s{{canonical()}, {Vec3(0, 0, 1)}};
  EXPECT_DOUBLE_EQ(reprojection_error(s, {{0, 0, Vec2(3, 4)}}), 25.0);
}

TEST(ReprojectionError, MatchesNaiveSum) {
  SceneSpec spec;
  spec.noise_sigma = 2.0;
  const auto scene = synth_scene(spec);
  double naive = 0.0;
  for (const auto& o : scene.observations) {
    const Eigen::Vector4d X(scene.truth.points[o.point].x(), scene.truth.points[o.point].y(), scene.truth.points[o.point].z(), 1);
    const Vec3 h = scene.truth.cameras[o.camera].P * X;
    const double du = o.pixel.x() - h.x() / h.z(), dv = o.pixel.y() - h.y() / h.z();
    naive += du * du + dv * dv;
  }
  EXPECT_NEAR(reprojection_error(scene.truth, scene.observations), naive, 1e-12 * naive);
}

TEST(ReprojectionError, PointAtInfinityPropagates) {
  SceneEstimate s{{canonical()}, {Vec3(1, 0, 0)}};
  EXPECT_THROW(reprojection_error(s, {{0, 0, Vec2(0, 0)}}), PointAtInfinity);
}

TEST(ReprojectionError, InvariantUnderSimilarity) {
  const auto scene = synth_scene({.noise_sigma = 1.0, .seed = 9});
  const double base = reprojection_error(scene.truth, scene.observations);
  std::mt19937_64 rng(4);
  for (int trial = 0; trial < 10; ++trial) {
    const Mat3 R = random_rotation(rng);
    const double s = 0.5 + trial * 0.3;
    const Vec3 t(trial, -1.0, 2.0);
    // X' = s R X + t;  P' = P * inv(T)
    Eigen::Matrix4d T = Eigen::Matrix4d::Identity();
    T.topLeftCorner<3, 3>() = s * R;
    T.topRightCorner<3, 1>() = t;
    SceneEstimate moved = scene.truth;
    for (auto& c : moved.cameras) c.P = c.P * T.inverse();
    for (auto& p : moved.points) p = s * R * p + t;
    EXPECT_NEAR(reprojection_error(moved, scene.observations), base, 1e-10 * base);
  }
}

TEST(Triangulate, UnitBaselineRecoversPoint) {
  CameraView a = canonical(), b = canonical();
  b.P(0, 3) = -1.0;  // center at (1, 0, 0)
  const Vec3 X(0, 0, 5);
  EXPECT_LT((triangulate(a, b, project(a, X), project(b, X)) - X).norm(), 1e-9);
}

TEST(Triangulate, ReprojectsIntoBothViews) {
  const auto scene = synth_scene({});
  const auto& a = scene.truth.cameras[0];
  const auto& b = scene.truth.cameras[2];
  const Vec3 X(1, -2, 4);
  const Vec2 xa = project(a, X), xb = project(b, X);
  const Vec3 Y = triangulate(a, b, xa, xb);
  EXPECT_LT((project(a, Y) - xa).norm(), 1e-9);
  EXPECT_LT((project(b, Y) - xb).norm(), 1e-9);
}

TEST(Triangulate, InvertsProjectionOnSyntheticScenes) {
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    const auto scene = synth_scene({.seed = seed});
    for (std::size_t j = 0; j < scene.truth.points.size(); ++j) {
      const auto& a = scene.truth.cameras[0];
      const auto& b = scene.truth.cameras[1];
      const Vec3& X = scene.truth.points[j];
      EXPECT_LT((triangulate(a, b, project(a, X), project(b, X)) - X).norm(), 1e-9);
    }
  }
}

TEST(Triangulate, IdenticalCamerasAreDegenerate) {
  EXPECT_THROW(triangulate(canonical(), canonical(), Vec2(0, 0), Vec2(0, 0)), DegenerateBaseline);
}

TEST(Decompose, RecoversFactors) {
  std::mt19937_64 rng(8);
  for (int trial = 0; trial < 50; ++trial) {
    const CameraView cam = random_camera(rng);
    const CameraPose pose = decompose(cam);
    EXPECT_NEAR((pose.R * pose.R.transpose() - Mat3::Identity()).norm(), 0.0, 1e-12);
    EXPECT_NEAR(pose.R.determinant(), 1.0, 1e-12);
    EXPECT_GT(pose.K(0, 0), 0.0);
    EXPECT_GT(pose.K(1, 1), 0.0);
    EXPECT_NEAR(pose.K(1, 0), 0.0, 1e-12);
    const Mat34 again = compose(pose.K, pose.R, pose.C);
    EXPECT_LT((again - cam.P).norm(), 1e-9 * cam.P.norm());
    // a scaled, negated matrix is the same camera
    const CameraPose neg = decompose({-3.0 * cam.P});
    EXPECT_LT((neg.K - pose.K).norm(), 1e-9 * pose.K.norm());
    EXPECT_LT((neg.R - pose.R).norm(), 1e-9);
  }
}

TEST(BundleJacobian, MatchesCentralDifferences) {
  std::mt19937_64 rng(21);
  std::uniform_real_distribution<double> u(-1, 1);
  double worst = 0.0;
  for (int trial = 0; trial < 100; ++trial) {
    const CameraPose pose = decompose(random_camera(rng));
    Vec3 X = pose.C + pose.R.transpose() * Vec3(u(rng), u(rng), 4 + u(rng));
    const auto J = observation_jacobian(pose.K, pose.R, pose.C, X);
    auto pix = [&](const Mat3& R, const Vec3& C, const Vec3& P) { return Vec2((pose.K * (R * (P - C))).hnormalized()); };
    for (int a = 0; a < 3; ++a) {
      const Vec3 e = Vec3::Unit(a);
      const double hr = 1e-6;
      const Vec2 dr = (pix(rotate_left(hr * e, pose.R), pose.C, X) - pix(rotate_left(-hr * e, pose.R), pose.C, X)) / (2 * hr);
      const double hc = 1e-6 * std::max(1.0, pose.C.norm());
      const Vec2 dc = (pix(pose.R, pose.C + hc * e, X) - pix(pose.R, pose.C - hc * e, X)) / (2 * hc);
      const double hx = 1e-6 * std::max(1.0, X.norm());
      const Vec2 dx = (pix(pose.R, pose.C, X + hx * e) - pix(pose.R, pose.C, X - hx * e)) / (2 * hx);
      worst = std::max({worst, (dr - J.d_rotation.col(a)).cwiseAbs().maxCoeff(), (dc - J.d_center.col(a)).cwiseAbs().maxCoeff(),
                        (dx - J.d_point.col(a)).cwiseAbs().maxCoeff()});
    }
  }
  EXPECT_LT(worst, 1e-5);
}

TEST(BundleAdjust, GroundTruthStopsImmediately) {
  const auto scene = synth_scene({});
  const auto [est, report] = bundle_adjust(scene.truth, scene.observations);
  EXPECT_LE(report.iterations, 2u);
  EXPECT_LT(report.final_cost, 1e-18);
}

TEST(BundleAdjust, RecoversPerturbedScene) {
  const auto scene = synth_scene({});
  const SceneEstimate init = perturb_scene(scene.truth, 1e-2, 3);
  const auto [est, report] = bundle_adjust(init, scene.observations);
  EXPECT_LT(reprojection_rmse(est, scene.observations), 1e-8);
  EXPECT_LT(procrustes(est.points, scene.truth.points).max_relative_error, 1e-6);
  EXPECT_LT(report.iterations, 100u);
  EXPECT_LE(report.final_cost, report.initial_cost);
}

TEST(BundleAdjust, NoisyCostBelowGroundTruthCost) {
  for (std::uint64_t seed : {1, 2, 3}) {
    const auto scene = synth_scene({.noise_sigma = 0.5, .seed = seed});
    const auto [est, report] = bundle_adjust(perturb_scene(scene.truth, 1e-2, seed + 10), scene.observations);
    EXPECT_LE(report.final_cost, reprojection_error(scene.truth, scene.observations));
  }
}

TEST(BundleAdjust, CostNeverIncreases) {
  const auto scene = synth_scene({.noise_sigma = 0.3, .seed = 4});
  const SceneEstimate init = perturb_scene(scene.truth, 3e-2, 5);
  double previous = reprojection_error(init, scene.observations);
  for (std::size_t iters = 1; iters <= 12; ++iters) {
    BundleOptions opts;
    opts.max_iterations = iters;
    const auto [est, report] = bundle_adjust(init, scene.observations, opts);
    EXPECT_LE(report.final_cost, previous);
    EXPECT_NEAR(reprojection_error(est, scene.observations), report.final_cost, 1e-12 * report.final_cost);
    previous = report.final_cost;
  }
}

TEST(BundleAdjust, KeepsGauge) {
  const auto scene = synth_scene({});
  const SceneEstimate init = perturb_scene(scene.truth, 1e-2, 7);
  const auto [est, report] = bundle_adjust(init, scene.observations);
  EXPECT_LT((est.cameras[0].P - init.cameras[0].P).norm(), 1e-9 * init.cameras[0].P.norm());
  const double before = (camera_center(init.cameras[1]) - camera_center(init.cameras[0])).norm();
  const double after = (camera_center(est.cameras[1]) - camera_center(est.cameras[0])).norm();
  EXPECT_NEAR(after, before, 1e-9 * before);
}

TEST(BundleAdjust, InsufficientObservations) {
  const auto scene = synth_scene({});
  std::vector<Observation> few;
  for (const auto& o : scene.observations)
    if (o.point < 5) few.push_back(o);
  SceneEstimate small = scene.truth;
  small.points.resize(5);
  EXPECT_THROW(bundle_adjust(small, few), InsufficientObservations);

  std::vector<Observation> lonely;
  for (const auto& o : scene.observations)
    if (o.point != 3 || o.camera == 0) lonely.push_back(o);
  EXPECT_THROW(bundle_adjust(scene.truth, lonely), InsufficientObservations);
}

TEST(BundleAdjust, DuplicateObservationRejected) {
  auto scene = synth_scene({});
  scene.observations.push_back(scene.observations.front());
  EXPECT_THROW(bundle_adjust(scene.truth, scene.observations), Error);
}

TEST(SynthScene, Deterministic) {
  const auto a = synth_scene({.noise_sigma = 0.5, .seed = 17});
  const auto b = synth_scene({.noise_sigma = 0.5, .seed = 17});
  ASSERT_EQ(a.observations.size(), b.observations.size());
  for (std::size_t k = 0; k < a.observations.size(); ++k) EXPECT_EQ(a.observations[k].pixel, b.observations[k].pixel);
  for (std::size_t i = 0; i < a.truth.cameras.size(); ++i) EXPECT_EQ(a.truth.cameras[i].P, b.truth.cameras[i].P);
}

TEST(SynthScene, NoiselessIsConsistent) {
  const auto scene = synth_scene({.cameras = 8, .points = 100, .seed = 3});
  EXPECT_LT(reprojection_error(scene.truth, scene.observations), 1e-18);
}

TEST(SynthScene, FortySixViewsSeeEveryPointTwice) {
  const auto scene = synth_scene({.cameras = 46, .points = 500});
  std::vector<int> seen(500, 0);
  for (const auto& o : scene.observations) ++seen[o.point];
  EXPECT_GE(*std::min_element(seen.begin(), seen.end()), 2);
}

TEST(SceneIo, RoundTripIsExact) {
  const auto scene = synth_scene({.noise_sigma = 0.7, .seed = 12});
  std::stringstream ss;
  write_scene(ss, scene.truth, scene.observations);
  const SceneFile back = read_scene(ss);
  ASSERT_EQ(back.scene.cameras.size(), scene.truth.cameras.size());
  for (std::size_t i = 0; i < back.scene.cameras.size(); ++i) EXPECT_EQ(back.scene.cameras[i].P, scene.truth.cameras[i].P);
  EXPECT_EQ(back.scene.points, scene.truth.points);
  ASSERT_EQ(back.observations.size(), scene.observations.size());
  for (std::size_t k = 0; k < back.observations.size(); ++k) {
    EXPECT_EQ(back.observations[k].pixel, scene.observations[k].pixel);
    EXPECT_EQ(back.observations[k].camera, scene.observations[k].camera);
  }
}

TEST(SceneIo, ParseErrorsCarryLine) {
  std::stringstream ss("# header\nPT 0 1 2 3\nPT 1 1 2\n");
  try {
    read_scene(ss);
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_EQ(e.location, 3u);
  }
  std::stringstream bad_ref("PT 0 0 0 1\nOBS 2 0 1 1\n");
  EXPECT_THROW(read_scene(bad_ref), IndexOutOfRange);
}

TEST(Procrustes, RecoversSimilarity) {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(-1, 1);
  std::vector<Vec3> src, dst;
  const Mat3 R = random_rotation(rng);
  for (int i = 0; i < 30; ++i) {
    src.emplace_back(u(rng), u(rng), u(rng));
    dst.push_back(2.5 * R * src.back() + Vec3(1, 2, 3));
  }
  EXPECT_LT(procrustes(src, dst).max_relative_error, 1e-12);
}
