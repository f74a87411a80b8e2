#pragma once

#include <algorithm>

#include "granulite/geometry/types.hpp"

namespace granulite {

// Cross-product norm below this fraction of the squared longest edge counts as zero area.
inline constexpr double kDegenerateRelTol = 1e-12;
inline constexpr double kCoincidentTol = 1e-12;

namespace detail {

inline void check_face_id(const TriMesh& mesh, FaceId f) {
  if (f >= mesh.faces.size())
    throw IndexOutOfRange("face id " + std::to_string(f) + " out of range (" +
                          std::to_string(mesh.faces.size()) + " faces)");
}

inline Vec3 raw_cross(const TriMesh& mesh, FaceId f) {
  const Vec3& a = mesh.corner(f, 0);
  return (mesh.corner(f, 1) - a).cross(mesh.corner(f, 2) - a);
}

inline double longest_edge_sq(const TriMesh& mesh, FaceId f) {
  const Vec3& a = mesh.corner(f, 0);
  const Vec3& b = mesh.corner(f, 1);
  const Vec3& c = mesh.corner(f, 2);
  return std::max({(b - a).squaredNorm(), (c - b).squaredNorm(), (a - c).squaredNorm()});
}

}  // namespace detail

inline bool is_degenerate(const TriMesh& mesh, FaceId f) {
  const double scale = detail::longest_edge_sq(mesh, f);
  return !(detail::raw_cross(mesh, f).norm() > kDegenerateRelTol * scale);
}

inline Vec3 face_normal(const TriMesh& mesh, FaceId f) {
  detail::check_face_id(mesh, f);
  if (is_degenerate(mesh, f)) throw DegenerateFace(f);
  return detail::raw_cross(mesh, f).normalized();
}

inline Vec3 face_centroid(const TriMesh& mesh, FaceId f) {
  detail::check_face_id(mesh, f);
  return (mesh.corner(f, 0) + mesh.corner(f, 1) + mesh.corner(f, 2)) / 3.0;
}

inline double face_area(const TriMesh& mesh, FaceId f) {
  detail::check_face_id(mesh, f);
  return 0.5 * detail::raw_cross(mesh, f).norm();
}

// Unit vector from the centroid of `from` to the centroid of `to`.
inline Vec3 center_difference(const TriMesh& mesh, FaceId from, FaceId to) {
  const Vec3 d = face_centroid(mesh, to) - face_centroid(mesh, from);
  const double len = d.norm();
  if (len < kCoincidentTol) throw CoincidentCentroids(from, to);
  return d / len;
}

// Normals of every face; degenerate faces get std::nullopt.
inline std::vector<std::optional<Vec3>> all_face_normals(const TriMesh& mesh) {
  std::vector<std::optional<Vec3>> out(mesh.faces.size());
  for (FaceId f = 0; f < mesh.faces.size(); ++f)
    if (!is_degenerate(mesh, f)) out[f] = detail::raw_cross(mesh, f).normalized();
  return out;
}

}  // namespace granulite
