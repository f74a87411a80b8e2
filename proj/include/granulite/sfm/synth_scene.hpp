#pragma once

#include <numbers>
#include <random>

#include "granulite/sfm/camera.hpp"

namespace granulite::sfm {

struct SceneSpec {
  std::size_t cameras = 5;
  std::size_t points = 50;
  double extent = 1.0;  // points uniform in [-extent, extent]^3
  double ring_radius = 6.0;
  double height_min = 1.0;
  double height_max = 4.0;
  double focal = 800.0;
  Vec2 principal_point = Vec2(320.0, 240.0);
  double noise_sigma = 0.0;  // pixels
  std::uint64_t seed = 1;
};

struct SyntheticScene {
  SceneEstimate truth;
  std::vector<Observation> observations;
};

inline Mat3 look_at(const Vec3& eye, const Vec3& target) {
  const Vec3 forward = (target - eye).normalized();
  Vec3 right = forward.cross(Vec3::UnitZ());
  if (right.norm() < 1e-9) right = forward.cross(Vec3::UnitY());
  right.normalize();
  Mat3 R;
  R.row(0) = right;
  R.row(1) = forward.cross(right);
  R.row(2) = forward;
  return R;
}

// Cameras on a ring around the points at heights cycling through
// [height_min, height_max], all looking at the point centroid.
inline SyntheticScene synth_scene(const SceneSpec& spec) {
  if (spec.cameras < 2) throw Error("synthetic scene needs at least 2 cameras");
  if (spec.points < 6) throw Error("synthetic scene needs at least 6 points");
  std::mt19937_64 rng(spec.seed);
  std::uniform_real_distribution<double> u(-spec.extent, spec.extent);
  SyntheticScene out;
  Vec3 centroid = Vec3::Zero();
  for (std::size_t j = 0; j < spec.points; ++j) {
    const double x = u(rng), y = u(rng), z = u(rng);
    out.truth.points.emplace_back(x, y, z);
    centroid += out.truth.points.back();
  }
  centroid /= static_cast<double>(spec.points);

  Mat3 K = Mat3::Identity();
  K(0, 0) = K(1, 1) = spec.focal;
  K.block<2, 1>(0, 2) = spec.principal_point;
  const std::size_t levels = std::min<std::size_t>(spec.cameras, 3);
  for (std::size_t i = 0; i < spec.cameras; ++i) {
    const double az = 2.0 * std::numbers::pi * static_cast<double>(i) / static_cast<double>(spec.cameras);
    const double frac = levels > 1 ? static_cast<double>(i % levels) / static_cast<double>(levels - 1) : 0.0;
    const double height = spec.height_min + frac * (spec.height_max - spec.height_min);
    const Vec3 eye = centroid + Vec3(spec.ring_radius * std::cos(az), spec.ring_radius * std::sin(az), height);
    out.truth.cameras.push_back({compose(K, look_at(eye, centroid), eye)});
  }

  std::normal_distribution<double> noise(0.0, spec.noise_sigma > 0.0 ? spec.noise_sigma : 1.0);
  for (std::size_t i = 0; i < spec.cameras; ++i)
    for (std::size_t j = 0; j < spec.points; ++j) {
      const Vec3 h = out.truth.cameras[i].P * out.truth.points[j].homogeneous();
      if (!(h.z() > kMinDepth)) continue;
      Vec2 px = h.hnormalized();
      if (spec.noise_sigma > 0.0) {
        const double nx = noise(rng), ny = noise(rng);
        px += Vec2(nx, ny);
      }
      out.observations.push_back({i, j, px});
    }
  return out;
}

// Moves every free camera and point of a scene by a relative amount: rotations
// by `relative` radians, centers and points by `relative` times the scene size.
// Intrinsics and camera 0 are untouched, and camera 1 keeps its distance to camera 0.
inline SceneEstimate perturb_scene(const SceneEstimate& scene, double relative, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g(0.0, 1.0);
  auto gaussian3 = [&] {
    const double a = g(rng), b = g(rng), c = g(rng);
    return Vec3(a, b, c);
  };
  Vec3 lo = scene.points.front(), hi = lo;
  for (const Vec3& p : scene.points) {
    lo = lo.cwiseMin(p);
    hi = hi.cwiseMax(p);
  }
  const double size = (hi - lo).norm();
  SceneEstimate out = scene;
  const CameraPose base = decompose(scene.cameras[0]);
  for (std::size_t i = 1; i < scene.cameras.size(); ++i) {
    CameraPose pose = decompose(scene.cameras[i]);
    const Vec3 w = relative * gaussian3();
    pose.R = Eigen::AngleAxisd(w.norm(), w.normalized()).toRotationMatrix() * pose.R;
    Vec3 C = pose.C + relative * size * gaussian3();
    if (i == 1) C = base.C + (pose.C - base.C).norm() * (C - base.C).normalized();
    out.cameras[i].P = compose(pose.K, pose.R, C);
  }
  for (Vec3& p : out.points) p += relative * size * gaussian3();
  return out;
}

}  // namespace granulite::sfm
