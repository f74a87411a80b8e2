#pragma once

#include <deque>
#include <string>
#include <vector>

#include "granulite/geometry/adjacency.hpp"
#include "granulite/geometry/face_ops.hpp"
#include "granulite/seg/criterion.hpp"

namespace granulite::seg {

inline constexpr std::int32_t kBoundary = -1;

// Per-face segment id in [0, segment_count) or kBoundary.
struct SegmentLabels {
  std::vector<std::int32_t> face_label;
  std::size_t segment_count = 0;

  std::size_t num_faces() const { return face_label.size(); }
  bool is_boundary(FaceId f) const { return face_label[f] == kBoundary; }

  std::vector<std::size_t> segment_sizes() const {
    std::vector<std::size_t> sizes(segment_count, 0);
    for (auto l : face_label)
      if (l != kBoundary) ++sizes[static_cast<std::size_t>(l)];
    return sizes;
  }

  std::vector<FaceId> faces_of(std::int32_t segment) const {
    std::vector<FaceId> out;
    for (FaceId f = 0; f < face_label.size(); ++f)
      if (face_label[f] == segment) out.push_back(f);
    return out;
  }

  friend bool operator==(const SegmentLabels&, const SegmentLabels&) = default;
};

// Curvature-constrained BFS with automatic restart.
//
// Seeds are taken in ascending face id among faces that are neither in a segment
// nor marked boundary. From the current face, each unassigned neighbor is tested with
// the curvature criterion: accepted neighbors join the segment and are queued,
// rejected ones become boundary faces for good. When the queue empties the visited
// faces form one segment.
//
// The center-difference vector for a candidate neighbor points from the neighbor's
// centroid back to the current face's centroid. With outward-facing normals this
// makes convex bends pass and sharply concave creases fail.
inline SegmentLabels segment_mesh(const TriMesh& mesh, const FaceAdjacency& adjacency, const CriterionParams& params,
                                  std::vector<std::string>* warnings = nullptr) {
  params.check();
  const std::size_t nf = mesh.faces.size();
  if (adjacency.num_faces() != nf) throw Error("adjacency does not match mesh face count");

  constexpr std::int32_t kUnassigned = -2;
  SegmentLabels labels;
  labels.face_label.assign(nf, kUnassigned);

  const auto normals = all_face_normals(mesh);
  std::vector<Vec3> centroids(nf);
  for (FaceId f = 0; f < nf; ++f) {
    centroids[f] = face_centroid(mesh, f);
    if (!normals[f]) {
      labels.face_label[f] = kBoundary;
      if (warnings) warnings->push_back("degenerate face " + std::to_string(f) + " marked as boundary");
    }
  }

  std::deque<FaceId> queue;
  std::int32_t next_id = 0;
  for (FaceId seed = 0; seed < nf; ++seed) {
    if (labels.face_label[seed] != kUnassigned) continue;
    const std::int32_t id = next_id++;
    labels.face_label[seed] = id;
    queue.push_back(seed);
    while (!queue.empty()) {
      const FaceId cur = queue.front();
      queue.pop_front();
      for (FaceId nb : adjacency.neighbors(cur)) {
        if (labels.face_label[nb] != kUnassigned) continue;
        const Vec3 d = centroids[cur] - centroids[nb];
        const double len = d.norm();
        if (len < kCoincidentTol) throw CoincidentCentroids(nb, cur);
        if (curvature_criterion(d / len, *normals[nb], *normals[cur], params)) {
          labels.face_label[nb] = id;
          queue.push_back(nb);
        } else {
          labels.face_label[nb] = kBoundary;
        }
      }
    }
  }
  labels.segment_count = static_cast<std::size_t>(next_id);
  return labels;
}

inline SegmentLabels segment_mesh(const TriMesh& mesh, const CriterionParams& params,
                                  std::vector<std::string>* warnings = nullptr) {
  return segment_mesh(mesh, build_adjacency(mesh), params, warnings);
}

inline std::vector<FaceId> boundary_faces(const SegmentLabels& labels) {
  std::vector<FaceId> out;
  for (FaceId f = 0; f < labels.face_label.size(); ++f)
    if (labels.face_label[f] == kBoundary) out.push_back(f);
  return out;
}

// Segments smaller than min_faces become boundary; survivors are renumbered in order.
inline SegmentLabels filter_segments(const SegmentLabels& labels, std::size_t min_faces) {
  if (min_faces < 1) throw Error("min_faces must be at least 1");
  const auto sizes = labels.segment_sizes();
  std::vector<std::int32_t> remap(sizes.size(), kBoundary);
  std::int32_t next = 0;
  for (std::size_t s = 0; s < sizes.size(); ++s)
    if (sizes[s] >= min_faces) remap[s] = next++;
  SegmentLabels out;
  out.segment_count = static_cast<std::size_t>(next);
  out.face_label.reserve(labels.face_label.size());
  for (auto l : labels.face_label) out.face_label.push_back(l == kBoundary ? kBoundary : remap[static_cast<std::size_t>(l)]);
  return out;
}

}  // namespace granulite::seg
