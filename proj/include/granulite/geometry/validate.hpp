#pragma once

#include <sstream>
#include <utility>

#include "granulite/geometry/adjacency.hpp"
#include "granulite/geometry/face_ops.hpp"

namespace granulite {

struct EdgeIssue {
  std::uint32_t v0, v1;
  std::size_t face_count;
  friend bool operator==(const EdgeIssue&, const EdgeIssue&) = default;
};

// Empty report == valid mesh.
struct MeshReport {
  std::vector<FaceId> index_out_of_range;
  std::vector<FaceId> repeated_vertex;
  std::vector<FaceId> degenerate;
  std::vector<EdgeIssue> non_manifold_edges;
  // Edges whose two faces traverse them in the same direction.
  std::vector<EdgeIssue> orientation_conflicts;

  bool empty() const {
    return index_out_of_range.empty() && repeated_vertex.empty() && degenerate.empty() &&
           non_manifold_edges.empty() && orientation_conflicts.empty();
  }

  std::size_t defect_count() const {
    return index_out_of_range.size() + repeated_vertex.size() + degenerate.size() +
           non_manifold_edges.size() + orientation_conflicts.size();
  }

  std::string summary() const {
    std::ostringstream os;
    os << "index_out_of_range=" << index_out_of_range.size() << " repeated_vertex=" << repeated_vertex.size()
       << " degenerate=" << degenerate.size() << " non_manifold_edges=" << non_manifold_edges.size()
       << " orientation_conflicts=" << orientation_conflicts.size();
    return os.str();
  }
};

inline MeshReport validate_mesh(const TriMesh& mesh) {
  MeshReport report;
  const std::size_t nv = mesh.vertices.size();
  std::vector<bool> usable(mesh.faces.size(), true);
  for (FaceId f = 0; f < mesh.faces.size(); ++f) {
    const Face& t = mesh.faces[f];
    if (t[0] >= nv || t[1] >= nv || t[2] >= nv) {
      report.index_out_of_range.push_back(f);
      usable[f] = false;
      continue;
    }
    if (t[0] == t[1] || t[1] == t[2] || t[0] == t[2]) {
      report.repeated_vertex.push_back(f);
      usable[f] = false;
      continue;
    }
    if (is_degenerate(mesh, f)) report.degenerate.push_back(f);
  }

  struct Directed {
    std::uint32_t lo, hi;
    bool forward;  // traversed lo -> hi
    bool operator<(const Directed& o) const { return std::tie(lo, hi, forward) < std::tie(o.lo, o.hi, o.forward); }
  };
  std::vector<Directed> edges;
  edges.reserve(mesh.faces.size() * 3);
  for (FaceId f = 0; f < mesh.faces.size(); ++f) {
    if (!usable[f]) continue;
    for (int k = 0; k < 3; ++k) {
      auto a = mesh.faces[f][k], b = mesh.faces[f][(k + 1) % 3];
      edges.push_back({std::min(a, b), std::max(a, b), a < b});
    }
  }
  std::sort(edges.begin(), edges.end());
  for (std::size_t i = 0; i < edges.size();) {
    std::size_t j = i + 1;
    while (j < edges.size() && edges[j].lo == edges[i].lo && edges[j].hi == edges[i].hi) ++j;
    const std::size_t n = j - i;
    if (n > 2) report.non_manifold_edges.push_back({edges[i].lo, edges[i].hi, n});
    if (n == 2 && edges[i].forward == edges[i + 1].forward)
      report.orientation_conflicts.push_back({edges[i].lo, edges[i].hi, n});
    i = j;
  }
  return report;
}

// True when every edge is shared by exactly two faces.
inline bool is_closed(const TriMesh& mesh) {
  const auto edges = detail::sorted_edges(mesh);
  for (std::size_t i = 0; i < edges.size();) {
    std::size_t j = i + 1;
    while (j < edges.size() && edges[j].lo == edges[i].lo && edges[j].hi == edges[i].hi) ++j;
    if (j - i != 2) return false;
    i = j;
  }
  return true;
}

}  // namespace granulite
