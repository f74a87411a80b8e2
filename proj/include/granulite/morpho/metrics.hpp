#pragma once

#include <Eigen/Eigenvalues>
#include <limits>

#include "granulite/seg/segment.hpp"

namespace granulite::morpho {

struct ParticleMetrics {
  std::int32_t segment_id = 0;
  std::size_t face_count = 0;
  double surface_area = 0.0;
  Vec3 dimensions = Vec3::Zero();  // d1 >= d2 >= d3
  double elongation = 0.0;         // d2 / d1
  double flatness = 0.0;           // d3 / d2

  double d1() const { return dimensions[0]; }
  double d2() const { return dimensions[1]; }
  double d3() const { return dimensions[2]; }
};

// Extents of a segment along the principal axes of its area-weighted face centroids.
inline ParticleMetrics segment_metrics(const TriMesh& mesh, const seg::SegmentLabels& labels, std::int32_t segment_id) {
  if (labels.face_label.size() != mesh.faces.size()) throw Error("labels do not cover the mesh");
  if (segment_id < 0 || static_cast<std::size_t>(segment_id) >= labels.segment_count)
    throw IndexOutOfRange("segment " + std::to_string(segment_id) + " does not exist");
  const auto faces = labels.faces_of(segment_id);
  if (faces.size() < 4)
    throw DegenerateSegment("segment " + std::to_string(segment_id) + " has " + std::to_string(faces.size()) + " faces, needs 4");

  ParticleMetrics m;
  m.segment_id = segment_id;
  m.face_count = faces.size();
  Vec3 mean = Vec3::Zero();
  for (FaceId f : faces) {
    const double a = face_area(mesh, f);
    m.surface_area += a;
    mean += a * face_centroid(mesh, f);
  }
  if (!(m.surface_area > 0.0)) throw DegenerateSegment("segment " + std::to_string(segment_id) + " has zero area");
  mean /= m.surface_area;
  Mat3 cov = Mat3::Zero();
  for (FaceId f : faces) {
    const Vec3 d = face_centroid(mesh, f) - mean;
    cov += face_area(mesh, f) * d * d.transpose();
  }
  cov /= m.surface_area;
  // round-off-level couplings would otherwise tilt the axes of symmetric shapes
  const double scale = cov.trace();
  for (int i = 0; i < 3; ++i)
    for (int j = 0; j < 3; ++j)
      if (i != j && std::abs(cov(i, j)) <= 1e-14 * scale) cov(i, j) = 0.0;

  Eigen::SelfAdjointEigenSolver<Mat3> eig(cov);
  const Vec3 ev = eig.eigenvalues();
  if (!(ev[2] > 0.0) || !(ev[1] > 1e-12 * ev[2]))
    throw DegenerateSegment("segment " + std::to_string(segment_id) + " has collinear face centroids");

  std::vector<std::uint32_t> verts;
  for (FaceId f : faces) verts.insert(verts.end(), mesh.faces[f].begin(), mesh.faces[f].end());
  std::sort(verts.begin(), verts.end());
  verts.erase(std::unique(verts.begin(), verts.end()), verts.end());
  for (int axis = 0; axis < 3; ++axis) {
    const Vec3 dir = eig.eigenvectors().col(2 - axis);
    double lo = std::numeric_limits<double>::infinity(), hi = -lo;
    for (auto v : verts) {
      const double t = dir.dot(mesh.vertices[v]);
      lo = std::min(lo, t);
      hi = std::max(hi, t);
    }
    m.dimensions[axis] = hi - lo;
  }
  std::sort(m.dimensions.data(), m.dimensions.data() + 3, std::greater<>());
  m.elongation = m.dimensions[1] / m.dimensions[0];
  m.flatness = m.dimensions[1] > 0.0 ? m.dimensions[2] / m.dimensions[1] : 0.0;
  return m;
}

struct MetricsTable {
  std::vector<ParticleMetrics> particles;
  std::vector<std::string> skipped;  // segments without a measurable extent
};

inline MetricsTable all_segment_metrics(const TriMesh& mesh, const seg::SegmentLabels& labels) {
  MetricsTable out;
  for (std::size_t s = 0; s < labels.segment_count; ++s) {
    try {
      out.particles.push_back(segment_metrics(mesh, labels, static_cast<std::int32_t>(s)));
    } catch (const DegenerateSegment& e) {
      out.skipped.push_back(e.what());
    }
  }
  return out;
}

// Calibration: multiplies every vertex by true_length / measured_length.
inline TriMesh apply_scale(TriMesh mesh, double reference_true_length, double reference_measured_length) {
  if (!(reference_true_length > 0.0) || !(reference_measured_length > 0.0))
    throw NonPositiveLength("calibration lengths must be positive");
  const double factor = reference_true_length / reference_measured_length;
  for (Vec3& v : mesh.vertices) v *= factor;
  return mesh;
}

}  // namespace granulite::morpho
