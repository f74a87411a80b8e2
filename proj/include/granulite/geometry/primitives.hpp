#pragma once

#include <Eigen/Geometry>
#include <map>
#include <random>

#include "granulite/geometry/types.hpp"

namespace granulite {

inline TriMesh tetrahedron() {
  TriMesh m;
  m.vertices = {Vec3(1, 1, 1), Vec3(1, -1, -1), Vec3(-1, 1, -1), Vec3(-1, -1, 1)};
  m.faces = {{0, 1, 2}, {0, 3, 1}, {0, 2, 3}, {1, 3, 2}};
  return m;
}

// Unit-radius icosphere; level 0 is the icosahedron (20 faces), each level quadruples.
inline TriMesh icosphere(int level) {
  const double t = (1.0 + std::sqrt(5.0)) / 2.0;
  TriMesh m;
  m.vertices = {Vec3(-1, t, 0), Vec3(1, t, 0),  Vec3(-1, -t, 0), Vec3(1, -t, 0),
                Vec3(0, -1, t), Vec3(0, 1, t),  Vec3(0, -1, -t), Vec3(0, 1, -t),
                Vec3(t, 0, -1), Vec3(t, 0, 1),  Vec3(-t, 0, -1), Vec3(-t, 0, 1)};
  for (Vec3& v : m.vertices) v.normalize();
  m.faces = {{0, 11, 5}, {0, 5, 1},  {0, 1, 7},   {0, 7, 10}, {0, 10, 11}, {1, 5, 9}, {5, 11, 4},
             {11, 10, 2}, {10, 7, 6}, {7, 1, 8},  {3, 9, 4},  {3, 4, 2},   {3, 2, 6}, {3, 6, 8},
             {3, 8, 9},  {4, 9, 5},  {2, 4, 11}, {6, 2, 10}, {8, 6, 7},   {9, 8, 1}};
  for (int l = 0; l < level; ++l) {
    std::map<std::pair<std::uint32_t, std::uint32_t>, std::uint32_t> midpoints;
    auto midpoint = [&](std::uint32_t a, std::uint32_t b) {
      auto key = std::minmax(a, b);
      auto it = midpoints.find(key);
      if (it != midpoints.end()) return it->second;
      const auto id = static_cast<std::uint32_t>(m.vertices.size());
      m.vertices.push_back((m.vertices[a] + m.vertices[b]).normalized());
      midpoints.emplace(key, id);
      return id;
    };
    std::vector<Face> next;
    next.reserve(m.faces.size() * 4);
    for (const Face& f : m.faces) {
      auto ab = midpoint(f[0], f[1]), bc = midpoint(f[1], f[2]), ca = midpoint(f[2], f[0]);
      next.push_back({f[0], ab, ca});
      next.push_back({f[1], bc, ab});
      next.push_back({f[2], ca, bc});
      next.push_back({ab, bc, ca});
    }
    m.faces = std::move(next);
  }
  return m;
}

// Axis-aligned cube [-s/2, s/2]^3 with a center vertex on every side (24 faces),
// so the face set has the full symmetry of the cube.
inline TriMesh cube(double side = 1.0) {
  TriMesh m;
  const double h = side / 2.0;
  for (int axis = 0; axis < 3; ++axis) {
    for (int sign : {-1, 1}) {
      const int u = (axis + 1) % 3, v = (axis + 2) % 3;
      auto base = static_cast<std::uint32_t>(m.vertices.size());
      Vec3 center = Vec3::Zero();
      center[axis] = sign * h;
      const double corners[4][2] = {{-h, -h}, {h, -h}, {h, h}, {-h, h}};
      for (const auto& c : corners) {
        Vec3 p = center;
        p[u] = c[0];
        p[v] = c[1];
        m.vertices.push_back(p);
      }
      m.vertices.push_back(center);
      const std::uint32_t ctr = base + 4;
      for (std::uint32_t k = 0; k < 4; ++k) {
        std::uint32_t a = base + k, b = base + (k + 1) % 4;
        // u x v = axis, so (a, b) counter-clockwise about +axis.
        if (sign > 0)
          m.faces.push_back({ctr, a, b});
        else
          m.faces.push_back({ctr, b, a});
      }
    }
  }
  // Weld duplicated corners so the cube is a closed manifold.
  std::vector<Vec3> unique;
  std::vector<std::uint32_t> remap(m.vertices.size());
  for (std::size_t i = 0; i < m.vertices.size(); ++i) {
    std::uint32_t id = static_cast<std::uint32_t>(unique.size());
    for (std::size_t j = 0; j < unique.size(); ++j)
      if ((unique[j] - m.vertices[i]).norm() < 1e-12 * side) {
        id = static_cast<std::uint32_t>(j);
        break;
      }
    if (id == unique.size()) unique.push_back(m.vertices[i]);
    remap[i] = id;
  }
  for (Face& f : m.faces)
    for (auto& v : f) v = remap[v];
  m.vertices = std::move(unique);
  return m;
}

inline TriMesh ellipsoid(double a, double b, double c, int level = 4) {
  return transform_vertices(icosphere(level), [&](const Vec3& p) { return Vec3(a * p.x(), b * p.y(), c * p.z()); });
}

inline Mat3 random_rotation(std::mt19937_64& rng) {
  std::normal_distribution<double> n(0.0, 1.0);
  Eigen::Quaterniond q(n(rng), n(rng), n(rng), n(rng));
  q.normalize();
  return q.toRotationMatrix();
}

}  // namespace granulite
