#pragma once

// Slow, straightforward reference implementations used as test oracles.

#include <algorithm>
#include <random>
#include <vector>

#include "granulite/granulite.hpp"

namespace oracle {

using namespace granulite;

inline bool share_edge(const Face& a, const Face& b) {
  int common = 0;
  for (auto x : a)
    for (auto y : b) common += x == y;
  return common == 2;
}

// All-pairs edge matching.
inline std::vector<std::vector<FaceId>> brute_adjacency(const TriMesh& m) {
  std::vector<std::vector<FaceId>> out(m.faces.size());
  for (FaceId i = 0; i < m.faces.size(); ++i)
    for (FaceId j = 0; j < m.faces.size(); ++j)
      if (i != j && share_edge(m.faces[i], m.faces[j])) out[i].push_back(j);
  return out;
}

inline Vec3 normal(const TriMesh& m, FaceId f) {
  const Vec3 a = m.vertices[m.faces[f][0]], b = m.vertices[m.faces[f][1]], c = m.vertices[m.faces[f][2]];
  return (b - a).cross(c - a).normalized();
}

inline Vec3 centroid(const TriMesh& m, FaceId f) {
  return (m.vertices[m.faces[f][0]] + m.vertices[m.faces[f][1]] + m.vertices[m.faces[f][2]]) / 3.0;
}

// Region growing written directly from the rules: lowest unassigned seed, FIFO
// queue, neighbors in ascending id, admitted iff (c + n_next) . n_cur > t with c
// the unit vector from the neighbor's centroid to the current one, rejected
// neighbors boundary for good. Labels: -1 boundary, else segment id.
inline std::vector<int> naive_segmentation(const TriMesh& m, double t) {
  const auto adj = brute_adjacency(m);
  std::vector<int> label(m.faces.size(), -2);
  int next = 0;
  for (FaceId seed = 0; seed < m.faces.size(); ++seed) {
    if (label[seed] != -2) continue;
    std::vector<FaceId> queue{seed};
    label[seed] = next;
    for (std::size_t head = 0; head < queue.size(); ++head) {
      const FaceId cur = queue[head];
      for (FaceId nb : adj[cur]) {
        if (label[nb] != -2) continue;
        const Vec3 c = (centroid(m, cur) - centroid(m, nb)).normalized();
        if ((c + normal(m, nb)).dot(normal(m, cur)) > t) {
          label[nb] = next;
          queue.push_back(nb);
        } else {
          label[nb] = -1;
        }
      }
    }
    ++next;
  }
  return label;
}

inline std::vector<std::size_t> brute_knn(const std::vector<Vec3>& pts, const Vec3& q, std::size_t k, std::size_t exclude) {
  std::vector<std::pair<double, std::size_t>> d;
  for (std::size_t i = 0; i < pts.size(); ++i)
    if (i != exclude) d.emplace_back((pts[i] - q).squaredNorm(), i);
  std::sort(d.begin(), d.end());
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < std::min(k, d.size()); ++i) out.push_back(d[i].second);
  return out;
}

inline double percent_finer(const std::vector<double>& sizes, double threshold) {
  std::size_t count = 0;
  for (double s : sizes)
    if (s < threshold) ++count;
  return 100.0 * static_cast<double>(count) / static_cast<double>(sizes.size());
}

inline TriMesh rigid(const TriMesh& m, const Mat3& R, const Vec3& t) {
  return transform_vertices(m, [&](const Vec3& p) { return Vec3(R * p + t); });
}

inline TriMesh scaled(const TriMesh& m, double s) {
  return transform_vertices(m, [&](const Vec3& p) { return Vec3(s * p); });
}

}  // namespace oracle
