#pragma once

#include <Eigen/Core>
#include <array>
#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "granulite/error.hpp"

namespace granulite {

using Vec2 = Eigen::Vector2d;
using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;

using FaceId = std::size_t;
using Face = std::array<std::uint32_t, 3>;

struct Rgb {
  std::uint8_t r = 0, g = 0, b = 0;
  friend bool operator==(const Rgb&, const Rgb&) = default;
};

inline constexpr double kUnitNormTolerance = 1e-6;

// Oriented/colored point samples. Optional arrays are either empty or the same
// length as positions.
struct PointCloud {
  std::vector<Vec3> positions;
  std::vector<Vec3> normals;
  std::vector<Rgb> colors;

  std::size_t size() const { return positions.size(); }
  bool has_normals() const { return !normals.empty(); }
  bool has_colors() const { return !colors.empty(); }

  void check() const {
    if (!normals.empty() && normals.size() != positions.size())
      throw Error("point cloud normals length does not match positions");
    if (!colors.empty() && colors.size() != positions.size())
      throw Error("point cloud colors length does not match positions");
    for (std::size_t i = 0; i < normals.size(); ++i)
      if (std::abs(normals[i].norm() - 1.0) > kUnitNormTolerance)
        throw Error("point cloud normal " + std::to_string(i) + " is not unit length");
  }
};

// Indexed triangle mesh. Counter-clockwise vertex order defines the outward side.
struct TriMesh {
  std::vector<Vec3> vertices;
  std::vector<Face> faces;

  std::size_t num_faces() const { return faces.size(); }
  std::size_t num_vertices() const { return vertices.size(); }

  const Vec3& corner(FaceId f, int k) const { return vertices[faces[f][k]]; }
};

// Appends `b` to `a`, shifting b's face indices.
inline TriMesh merge(TriMesh a, const TriMesh& b) {
  const auto offset = static_cast<std::uint32_t>(a.vertices.size());
  a.vertices.insert(a.vertices.end(), b.vertices.begin(), b.vertices.end());
  a.faces.reserve(a.faces.size() + b.faces.size());
  for (const Face& f : b.faces) a.faces.push_back({f[0] + offset, f[1] + offset, f[2] + offset});
  return a;
}

template <typename Fn>
TriMesh transform_vertices(TriMesh mesh, Fn&& fn) {
  for (Vec3& v : mesh.vertices) v = fn(v);
  return mesh;
}

}  // namespace granulite
