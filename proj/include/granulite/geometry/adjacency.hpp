#pragma once

#include <algorithm>
#include <span>
#include <tuple>

#include "granulite/geometry/types.hpp"

namespace granulite {

// Edge-shared face neighbors; at most one neighbor per edge, sorted ascending.
class FaceAdjacency {
 public:
  FaceAdjacency() = default;
  explicit FaceAdjacency(std::size_t num_faces) : ids_(num_faces), count_(num_faces, 0) {}

  std::size_t num_faces() const { return ids_.size(); }

  std::span<const FaceId> neighbors(FaceId f) const { return {ids_[f].data(), count_[f]}; }

  std::size_t total_entries() const {
    std::size_t n = 0;
    for (auto c : count_) n += c;
    return n;
  }

  void add(FaceId f, FaceId neighbor) {
    if (count_[f] == 3) throw Error("face " + std::to_string(f) + " has more than 3 neighbors");
    ids_[f][count_[f]++] = neighbor;
  }

  void sort_lists() {
    for (std::size_t f = 0; f < ids_.size(); ++f) std::sort(ids_[f].begin(), ids_[f].begin() + count_[f]);
  }

  friend bool operator==(const FaceAdjacency& a, const FaceAdjacency& b) {
    if (a.num_faces() != b.num_faces()) return false;
    for (FaceId f = 0; f < a.num_faces(); ++f) {
      auto x = a.neighbors(f), y = b.neighbors(f);
      if (!std::equal(x.begin(), x.end(), y.begin(), y.end())) return false;
    }
    return true;
  }

 private:
  std::vector<std::array<FaceId, 3>> ids_;
  std::vector<std::uint8_t> count_;
};

inline void check_face_indices(const TriMesh& mesh) {
  const std::size_t nv = mesh.vertices.size();
  for (FaceId f = 0; f < mesh.faces.size(); ++f)
    for (auto v : mesh.faces[f])
      if (v >= nv)
        throw IndexOutOfRange("face " + std::to_string(f) + " references vertex " + std::to_string(v) +
                              " but mesh has " + std::to_string(nv) + " vertices");
}

namespace detail {

struct EdgeRecord {
  std::uint32_t lo, hi;
  FaceId face;
  bool operator<(const EdgeRecord& o) const { return std::tie(lo, hi, face) < std::tie(o.lo, o.hi, o.face); }
};

inline std::vector<EdgeRecord> sorted_edges(const TriMesh& mesh) {
  std::vector<EdgeRecord> edges;
  edges.reserve(mesh.faces.size() * 3);
  for (FaceId f = 0; f < mesh.faces.size(); ++f)
    for (int k = 0; k < 3; ++k) {
      auto a = mesh.faces[f][k], b = mesh.faces[f][(k + 1) % 3];
      edges.push_back({std::min(a, b), std::max(a, b), f});
    }
  std::sort(edges.begin(), edges.end());
  return edges;
}

}  // namespace detail

inline FaceAdjacency build_adjacency(const TriMesh& mesh) {
  check_face_indices(mesh);
  const auto edges = detail::sorted_edges(mesh);
  FaceAdjacency adj(mesh.faces.size());
  for (std::size_t i = 0; i < edges.size();) {
    std::size_t j = i + 1;
    while (j < edges.size() && edges[j].lo == edges[i].lo && edges[j].hi == edges[i].hi) ++j;
    if (j - i > 2) throw NonManifoldEdge(edges[i].lo, edges[i].hi, j - i);
    if (j - i == 2) {
      adj.add(edges[i].face, edges[i + 1].face);
      adj.add(edges[i + 1].face, edges[i].face);
    }
    i = j;
  }
  adj.sort_lists();
  return adj;
}

}  // namespace granulite
