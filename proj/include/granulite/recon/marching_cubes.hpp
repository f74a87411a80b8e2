#pragma once

#include <algorithm>
#include <array>

#include "granulite/recon/grid.hpp"

namespace granulite::recon {

// Marching cubes without a lookup table. On every cube face the iso-crossings are
// paired into oriented segments (ambiguous faces resolved by the asymptotic
// decider, which both cubes sharing the face agree on), segments are chained
// into closed loops, and each loop is triangulated. Loops are oriented so that
// triangle normals point toward decreasing field values.
namespace detail {

struct CubeTopology {
  // corner c has offset (c & 1, (c >> 1) & 1, (c >> 2) & 1)
  std::array<std::array<int, 2>, 12> edge_corners{};
  std::array<std::array<int, 8>, 8> edge_of{};  // corner pair -> local edge, -1 if none
  // corners of each face, counter-clockwise about the outward face normal
  std::array<std::array<int, 4>, 6> face_corners{};
  std::array<std::array<int, 2>, 12> edge_faces{};

  bool share_face(int e0, int e1) const {
    for (int a : edge_faces[e0])
      for (int b : edge_faces[e1])
        if (a == b) return true;
    return false;
  }

  CubeTopology() {
    for (auto& row : edge_of) row.fill(-1);
    int e = 0;
    for (int c = 0; c < 8; ++c)
      for (int axis = 0; axis < 3; ++axis)
        if (!(c & (1 << axis))) {
          const int d = c | (1 << axis);
          edge_corners[e] = {c, d};
          edge_of[c][d] = edge_of[d][c] = e;
          ++e;
        }
    int f = 0;
    for (int axis = 0; axis < 3; ++axis)
      for (int side = 0; side < 2; ++side) {
        const int u = (axis + 1) % 3, v = (axis + 2) % 3;  // e_u x e_v = e_axis
        const int base = side << axis;
        const int cu = 1 << u, cv = 1 << v;
        // counter-clockwise about +axis in the (u, v) plane
        std::array<int, 4> ccw = {base, base | cu, base | cu | cv, base | cv};
        if (side == 0) std::reverse(ccw.begin(), ccw.end());  // outward normal is -axis
        face_corners[f++] = ccw;
      }
    std::array<int, 12> seen{};
    for (int face = 0; face < 6; ++face)
      for (int q = 0; q < 4; ++q) {
        const int e2 = edge_of[face_corners[face][q]][face_corners[face][(q + 1) & 3]];
        edge_faces[e2][seen[e2]++] = face;
      }
  }
};

inline const CubeTopology& cube_topology() {
  static const CubeTopology t;
  return t;
}

inline double triangle_quality(const Vec3& a, const Vec3& b, const Vec3& c) {
  const double area2 = (b - a).cross(c - a).norm();
  const double l2 = (b - a).squaredNorm() + (c - b).squaredNorm() + (a - c).squaredNorm();
  return l2 > 0.0 ? area2 / l2 : 0.0;
}

}  // namespace detail

struct IsosurfaceOptions {
  // Interpolation parameter kept inside [eps, 1 - eps] so vertices on distinct grid
  // edges never coincide.
  double edge_epsilon = 1e-6;
};

inline TriMesh extract_isosurface(const ScalarGrid& grid, double iso, const IsosurfaceOptions& opts = {}) {
  const auto& l = grid.lattice;
  l.check();
  const auto& topo = detail::cube_topology();
  TriMesh mesh;
  std::vector<std::int64_t> vertex_of_edge(l.node_count() * 3, -1);

  auto global_vertex = [&](std::size_t i, std::size_t j, std::size_t k, int local_edge) -> std::uint32_t {
    const auto [ca, cb] = topo.edge_corners[local_edge];
    const int axis = (ca ^ cb) == 1 ? 0 : ((ca ^ cb) == 2 ? 1 : 2);
    const std::size_t ni = i + (ca & 1), nj = j + ((ca >> 1) & 1), nk = k + ((ca >> 2) & 1);
    const std::size_t node = l.index(ni, nj, nk);
    auto& slot = vertex_of_edge[node * 3 + static_cast<std::size_t>(axis)];
    if (slot < 0) {
      std::size_t oi = ni, oj = nj, ok = nk;
      (axis == 0 ? oi : axis == 1 ? oj : ok) += 1;
      const double f0 = grid.at(ni, nj, nk), f1 = grid.at(oi, oj, ok);
      const double t = std::clamp((iso - f0) / (f1 - f0), opts.edge_epsilon, 1.0 - opts.edge_epsilon);
      const Vec3 p0 = l.node_position(ni, nj, nk), p1 = l.node_position(oi, oj, ok);
      slot = static_cast<std::int64_t>(mesh.vertices.size());
      mesh.vertices.push_back(p0 + t * (p1 - p0));
    }
    return static_cast<std::uint32_t>(slot);
  };

  std::array<double, 8> f{};
  std::array<bool, 8> inside{};
  std::array<int, 12> next{};
  std::vector<int> loop;
  std::vector<Vec3> pos;
  for (std::size_t k = 0; k < static_cast<std::size_t>(l.nz); ++k)
    for (std::size_t j = 0; j < static_cast<std::size_t>(l.ny); ++j)
      for (std::size_t i = 0; i < static_cast<std::size_t>(l.nx); ++i) {
        int count_inside = 0;
        for (int c = 0; c < 8; ++c) {
          f[c] = grid.at(i + (c & 1), j + ((c >> 1) & 1), k + ((c >> 2) & 1)) - iso;
          inside[c] = f[c] > 0.0;
          count_inside += inside[c];
        }
        if (count_inside == 0 || count_inside == 8) continue;

        next.fill(-1);
        for (const auto& fc : topo.face_corners) {
          auto edge = [&](int q) { return topo.edge_of[fc[q & 3]][fc[(q + 1) & 3]]; };
          int crossings = 0;
          for (int q = 0; q < 4; ++q) crossings += inside[fc[q]] != inside[fc[(q + 1) & 3]];
          if (crossings == 2) {
            int enter = -1, exit = -1;
            for (int q = 0; q < 4; ++q) {
              const bool a = inside[fc[q]], b = inside[fc[(q + 1) & 3]];
              if (!a && b) enter = edge(q);
              if (a && !b) exit = edge(q);
            }
            next[enter] = exit;
          } else if (crossings == 4) {
            const double fa = f[fc[0]], fb = f[fc[1]], fcv = f[fc[2]], fd = f[fc[3]];
            const double saddle = (fa * fcv - fb * fd) / (fa + fcv - fb - fd);
            const bool connect_inside = saddle > 0.0;
            for (int q = 0; q < 4; ++q) {
              if (inside[fc[q]] && !connect_inside) next[edge(q + 3)] = edge(q);   // cut off inside corner
              if (!inside[fc[q]] && connect_inside) next[edge(q)] = edge(q + 3);   // cut off outside corner
            }
          }
        }

        std::array<bool, 12> used{};
        for (int start = 0; start < 12; ++start) {
          if (next[start] < 0 || used[start]) continue;
          loop.clear();
          for (int e = start; !used[e]; e = next[e]) {
            used[e] = true;
            loop.push_back(e);
          }
          const std::size_t n = loop.size();
          pos.clear();
          std::vector<std::uint32_t> ids(n);
          for (std::size_t q = 0; q < n; ++q) {
            ids[q] = global_vertex(i, j, k, loop[q]);
            pos.push_back(mesh.vertices[ids[q]]);
          }
          // Fan from the apex whose worst triangle is best. A diagonal between two
          // vertices on the same cube face could also appear in the neighboring
          // cube, so such apexes are skipped; if none is left, fan from the loop center.
          std::size_t apex = n;
          double best = -1.0;
          for (std::size_t a = 0; a < n && n > 3; ++a) {
            bool safe = true;
            for (std::size_t q = 2; q + 1 < n && safe; ++q) safe = !topo.share_face(loop[a], loop[(a + q) % n]);
            if (!safe) continue;
            double worst = 1e300;
            for (std::size_t q = 1; q + 1 < n; ++q)
              worst = std::min(worst, detail::triangle_quality(pos[a], pos[(a + q) % n], pos[(a + q + 1) % n]));
            if (worst > best) {
              best = worst;
              apex = a;
            }
          }
          if (n == 3) apex = 0;
          if (apex < n) {
            for (std::size_t q = 1; q + 1 < n; ++q)
              mesh.faces.push_back({ids[apex], ids[(apex + q) % n], ids[(apex + q + 1) % n]});
          } else {
            Vec3 center = Vec3::Zero();
            for (const Vec3& p : pos) center += p;
            const auto c = static_cast<std::uint32_t>(mesh.vertices.size());
            mesh.vertices.push_back(center / static_cast<double>(n));
            for (std::size_t q = 0; q < n; ++q) mesh.faces.push_back({c, ids[q], ids[(q + 1) % n]});
          }
        }
      }
  if (mesh.faces.empty()) throw EmptySurface();
  return mesh;
}

}  // namespace granulite::recon
