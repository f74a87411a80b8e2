#pragma once

#include <cmath>
#include <numbers>
#include <random>

#include "granulite/geometry/face_ops.hpp"
#include "granulite/geometry/primitives.hpp"

namespace granulite::synth {

// Uniform samples on a sphere with exact outward normals.
inline PointCloud sphere_cloud(std::size_t count, std::uint64_t seed, double radius = 1.0, const Vec3& center = Vec3::Zero()) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> uz(-1.0, 1.0), uphi(0.0, 2.0 * std::numbers::pi);
  PointCloud cloud;
  cloud.positions.reserve(count);
  cloud.normals.reserve(count);
  for (std::size_t i = 0; i < count; ++i) {
    const double z = uz(rng), phi = uphi(rng), s = std::sqrt(std::max(0.0, 1.0 - z * z));
    const Vec3 n(s * std::cos(phi), s * std::sin(phi), z);
    cloud.normals.push_back(n);
    cloud.positions.push_back(center + radius * n);
  }
  return cloud;
}

struct Ball {
  Vec3 center;
  double radius;
};

struct Stockpile {
  std::vector<Ball> balls;
  PointCloud cloud;
  std::vector<std::int32_t> point_ball;  // which ball each sample lies on
};

struct StockpileOptions {
  std::vector<double> radii = {1.0, 0.9, 0.8, 0.7, 0.6, 0.55, 0.5, 0.4, 0.35, 0.3};
  // centers of touching balls sit at overlap * (r_a + r_b)
  double overlap = 0.99;
  double samples_per_area = 400.0;
  std::uint64_t seed = 7;
};

// Greedy gravity pile: every ball after the first is placed in contact with an
// existing ball, picking the lowest (then most central) candidate that does not
// overlap any other ball more than the contact overlap.
inline std::vector<Ball> pile_layout(const StockpileOptions& opts) {
  std::mt19937_64 rng(opts.seed);
  std::uniform_real_distribution<double> jitter(0.0, 2.0 * std::numbers::pi);
  std::vector<Ball> balls;
  for (double r : opts.radii) {
    if (balls.empty()) {
      balls.push_back({Vec3(0, 0, r), r});
      continue;
    }
    const double phase = jitter(rng);
    bool found = false;
    Ball best{};
    double best_score = 0.0;
    for (const Ball& anchor : balls) {
      const double d = opts.overlap * (r + anchor.radius);
      for (int elev = -4; elev <= 6; ++elev) {
        const double theta = elev * std::numbers::pi / 12.0;  // -60 .. 90 degrees about the horizontal
        for (int az = 0; az < 24; ++az) {
          const double phi = phase + az * 2.0 * std::numbers::pi / 24.0;
          const Vec3 dir(std::cos(theta) * std::cos(phi), std::cos(theta) * std::sin(phi), std::sin(theta));
          const Vec3 c = anchor.center + d * dir;
          if (c.z() < r - 1e-9) continue;  // stays above the ground
          bool ok = true;
          for (const Ball& other : balls)
            if ((other.center - c).norm() < opts.overlap * (r + other.radius) - 1e-9) ok = false;
          if (!ok) continue;
          const double score = c.z() + 0.35 * Vec2(c.x(), c.y()).norm();
          if (!found || score < best_score) {
            found = true;
            best_score = score;
            best = {c, r};
          }
        }
      }
    }
    if (!found) throw Error("could not place ball of radius " + std::to_string(r));
    balls.push_back(best);
  }
  return balls;
}

inline bool inside_other(const std::vector<Ball>& balls, std::size_t self, const Vec3& p) {
  for (std::size_t b = 0; b < balls.size(); ++b)
    if (b != self && (p - balls[b].center).norm() < balls[b].radius) return true;
  return false;
}

// Samples the outer surface of the union of balls with exact normals.
inline Stockpile sample_union(const std::vector<Ball>& balls, double samples_per_area, std::uint64_t seed) {
  Stockpile pile;
  pile.balls = balls;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> uz(-1.0, 1.0), uphi(0.0, 2.0 * std::numbers::pi);
  for (std::size_t b = 0; b < balls.size(); ++b) {
    const double area = 4.0 * std::numbers::pi * balls[b].radius * balls[b].radius;
    const auto count = static_cast<std::size_t>(std::ceil(area * samples_per_area));
    for (std::size_t i = 0; i < count; ++i) {
      const double z = uz(rng), phi = uphi(rng), s = std::sqrt(std::max(0.0, 1.0 - z * z));
      const Vec3 n(s * std::cos(phi), s * std::sin(phi), z);
      const Vec3 p = balls[b].center + balls[b].radius * n;
      if (inside_other(balls, b, p)) continue;
      pile.cloud.positions.push_back(p);
      pile.cloud.normals.push_back(n);
      pile.point_ball.push_back(static_cast<std::int32_t>(b));
    }
  }
  return pile;
}

inline Stockpile make_stockpile(const StockpileOptions& opts = {}) {
  return sample_union(pile_layout(opts), opts.samples_per_area, opts.seed + 1);
}

// Ground truth for a mesh of the union: each face belongs to the ball whose
// sphere passes closest to its centroid.
inline std::vector<std::int32_t> ground_truth_labels(const TriMesh& mesh, const std::vector<Ball>& balls) {
  std::vector<std::int32_t> out(mesh.faces.size(), -1);
  for (FaceId f = 0; f < mesh.faces.size(); ++f) {
    const Vec3 c = face_centroid(mesh, f);
    double best = 1e300;
    for (std::size_t b = 0; b < balls.size(); ++b) {
      const double d = std::abs((c - balls[b].center).norm() - balls[b].radius);
      if (d < best) {
        best = d;
        out[f] = static_cast<std::int32_t>(b);
      }
    }
  }
  return out;
}

// Two unit icospheres three radii apart.
inline TriMesh two_ball_mesh(int level = 1) {
  const TriMesh a = icosphere(level);
  const TriMesh b = transform_vertices(a, [](const Vec3& p) { return Vec3(p + Vec3(3.0, 0.0, 0.0)); });
  return merge(a, b);
}

// Icosphere with random radial bumps; produces concave creases for exercising the BFS.
inline TriMesh bumpy_sphere(int level, double amplitude, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-amplitude, amplitude);
  TriMesh m = icosphere(level);
  for (Vec3& v : m.vertices) v *= 1.0 + u(rng);
  return m;
}

}  // namespace granulite::synth
