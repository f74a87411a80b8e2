#include <gtest/gtest.h>

#include "oracles.hpp"

using namespace granulite;
using namespace granulite::morpho;

namespace {

seg::SegmentLabels one_segment(const TriMesh& m) {
  seg::SegmentLabels l;
  l.face_label.assign(m.faces.size(), 0);
  l.segment_count = 1;
  return l;
}

ParticleMetrics particle(double d2) {
  ParticleMetrics p;
  p.dimensions = Vec3(2 * d2, d2, 0.5 * d2);
  return p;
}

std::vector<ParticleMetrics> particles(const std::vector<double>& d2) {
  std::vector<ParticleMetrics> out;
  for (double d : d2) out.push_back(particle(d));
  return out;
}

}  // namespace

TEST(Metrics, UnitCube) {
  const TriMesh m = cube(1.0);
  const ParticleMetrics p = segment_metrics(m, one_segment(m), 0);
  EXPECT_NEAR(p.d1(), 1.0, 1e-12);
  EXPECT_NEAR(p.d2(), 1.0, 1e-12);
  EXPECT_NEAR(p.d3(), 1.0, 1e-12);
  EXPECT_NEAR(p.surface_area, 6.0, 1e-12);
  EXPECT_EQ(p.face_count, m.faces.size());
  EXPECT_NEAR(p.elongation, 1.0, 1e-12);
  EXPECT_NEAR(p.flatness, 1.0, 1e-12);
}

TEST(Metrics, EllipsoidAxes) {
  const TriMesh m = ellipsoid(4, 2, 1);
  const ParticleMetrics p = segment_metrics(m, one_segment(m), 0);
  EXPECT_NEAR(p.d1() / 8.0, 1.0, 0.05);
  EXPECT_NEAR(p.d2() / 4.0, 1.0, 0.05);
  EXPECT_NEAR(p.d3() / 2.0, 1.0, 0.05);
  EXPECT_NEAR(p.elongation, 0.5, 0.025);
  EXPECT_NEAR(p.flatness, 0.5, 0.025);
}

TEST(Metrics, RotationInvariant) {
  const TriMesh m = ellipsoid(4, 2, 1);
  const ParticleMetrics ref = segment_metrics(m, one_segment(m), 0);
  std::mt19937_64 rng(5);
  for (int trial = 0; trial < 10; ++trial) {
    const TriMesh r = oracle::rigid(m, random_rotation(rng), Vec3(trial, -2.0 * trial, 7.0));
    const ParticleMetrics p = segment_metrics(r, one_segment(r), 0);
    for (int k = 0; k < 3; ++k) EXPECT_NEAR(p.dimensions[k], ref.dimensions[k], 1e-6) << "trial " << trial;
    EXPECT_NEAR(p.surface_area, ref.surface_area, 1e-9);
  }
}

TEST(Metrics, OnlyRequestedSegment) {
  const std::size_t small = cube(1.0).faces.size();
  TriMesh m = merge(cube(1.0), transform_vertices(cube(2.0), [](const Vec3& p) { return Vec3(p + Vec3(10, 0, 0)); }));
  seg::SegmentLabels l;
  for (std::size_t f = 0; f < m.faces.size(); ++f) l.face_label.push_back(f < small ? 0 : 1);
  l.segment_count = 2;
  EXPECT_NEAR(segment_metrics(m, l, 0).d1(), 1.0, 1e-12);
  EXPECT_NEAR(segment_metrics(m, l, 1).d1(), 2.0, 1e-12);
  const MetricsTable t = all_segment_metrics(m, l);
  EXPECT_EQ(t.particles.size(), 2u);
  EXPECT_TRUE(t.skipped.empty());
}

TEST(Metrics, Errors) {
  const TriMesh m = tetrahedron();
  seg::SegmentLabels l = one_segment(m);
  l.face_label[0] = seg::kBoundary;
  EXPECT_THROW(segment_metrics(m, l, 0), DegenerateSegment);
  EXPECT_THROW(segment_metrics(m, l, 1), IndexOutOfRange);
  EXPECT_THROW(segment_metrics(m, l, -1), IndexOutOfRange);
  // four coplanar faces: no extent off the plane but still a rank-2 spread
  TriMesh flat{{Vec3(0, 0, 0), Vec3(1, 0, 0), Vec3(1, 1, 0), Vec3(0, 1, 0), Vec3(0.5, 0.5, 0)},
               {{0, 1, 4}, {1, 2, 4}, {2, 3, 4}, {3, 0, 4}}};
  const ParticleMetrics p = segment_metrics(flat, one_segment(flat), 0);
  EXPECT_NEAR(p.d3(), 0.0, 1e-12);
  // collinear centroids
  TriMesh strip;
  for (int i = 0; i < 6; ++i) {
    strip.vertices.push_back(Vec3(i, 0, 0));
    strip.vertices.push_back(Vec3(i, 1e-20, 0));
  }
  for (std::uint32_t i = 0; i < 4; ++i) strip.faces.push_back({2 * i, 2 * i + 2, 2 * i + 1});
  EXPECT_THROW(segment_metrics(strip, one_segment(strip), 0), DegenerateSegment);
  EXPECT_EQ(all_segment_metrics(strip, one_segment(strip)).skipped.size(), 1u);
}

TEST(Scale, Examples) {
  const TriMesh m = cube(1.0);
  const TriMesh s = apply_scale(m, 2.0, 1.0);
  const ParticleMetrics p = segment_metrics(s, one_segment(s), 0);
  EXPECT_NEAR(p.d1(), 2.0, 1e-12);
  EXPECT_NEAR(p.surface_area, 24.0, 1e-12);
  EXPECT_EQ(apply_scale(m, 3.0, 3.0).vertices, m.vertices);
  EXPECT_THROW(apply_scale(m, 0.0, 1.0), NonPositiveLength);
  EXPECT_THROW(apply_scale(m, 1.0, -1.0), NonPositiveLength);
  EXPECT_THROW(apply_scale(m, std::nan(""), 1.0), NonPositiveLength);
}

TEST(Scale, DimensionsHomogeneous) {
  const TriMesh m = ellipsoid(3, 1.5, 1, 3);
  const ParticleMetrics ref = segment_metrics(m, one_segment(m), 0);
  for (double s : {1e-3, 0.37, 2.5, 1e3}) {
    const TriMesh scaled = apply_scale(m, s, 1.0);
    const ParticleMetrics p = segment_metrics(scaled, one_segment(scaled), 0);
    for (int k = 0; k < 3; ++k) EXPECT_NEAR(p.dimensions[k] / (s * ref.dimensions[k]), 1.0, 1e-9);
    EXPECT_NEAR(p.surface_area / (s * s * ref.surface_area), 1.0, 1e-9);
    EXPECT_NEAR(p.elongation, ref.elongation, 1e-9);
    EXPECT_NEAR(p.flatness, ref.flatness, 1e-9);
  }
}

TEST(Gradation, WorkedExample) {
  const GradationReport r = gradation_report(particles({3, 5, 7, 9, 10}), {4, 8, 12});
  ASSERT_EQ(r.rows.size(), 3u);
  EXPECT_DOUBLE_EQ(r.rows[0].percent_finer, 20.0);
  EXPECT_DOUBLE_EQ(r.rows[1].percent_finer, 60.0);
  EXPECT_DOUBLE_EQ(r.rows[2].percent_finer, 100.0);
  EXPECT_EQ(r.particle_count, 5u);
}

TEST(Gradation, SingleParticle) {
  const GradationReport r = gradation_report(particles({5}), {5, 6});
  ASSERT_EQ(r.rows.size(), 2u);
  EXPECT_DOUBLE_EQ(r.rows[0].percent_finer, 0.0);
  EXPECT_DOUBLE_EQ(r.rows[1].percent_finer, 100.0);
}

TEST(Gradation, OpenEndedRow) {
  const GradationReport r = gradation_report(particles({1, 2, 50}), {3});
  ASSERT_EQ(r.rows.size(), 2u);
  EXPECT_TRUE(std::isinf(r.rows[1].threshold));
  EXPECT_DOUBLE_EQ(r.rows[1].percent_finer, 100.0);
  const GradationReport none = gradation_report(particles({1}), {});
  ASSERT_EQ(none.rows.size(), 1u);
  EXPECT_TRUE(std::isinf(none.rows[0].threshold));
}

TEST(Gradation, MatchesCountingOracle) {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> size(0.1, 10.0);
  std::uniform_int_distribution<int> count(1, 40);
  for (int trial = 0; trial < 100; ++trial) {
    std::vector<double> d2(static_cast<std::size_t>(count(rng)));
    for (double& d : d2) d = size(rng);
    // some thresholds land exactly on particle sizes
    std::vector<double> thresholds = {d2[0], 2.5, 5.0, 7.5};
    std::sort(thresholds.begin(), thresholds.end());
    thresholds.erase(std::unique(thresholds.begin(), thresholds.end()), thresholds.end());
    const GradationReport r = gradation_report(particles(d2), thresholds);
    for (std::size_t i = 0; i < thresholds.size(); ++i)
      EXPECT_DOUBLE_EQ(r.rows[i].percent_finer, oracle::percent_finer(d2, thresholds[i]));
    for (std::size_t i = 1; i < r.rows.size(); ++i) EXPECT_GE(r.rows[i].percent_finer, r.rows[i - 1].percent_finer);
    EXPECT_DOUBLE_EQ(r.rows.back().percent_finer, 100.0);
  }
}

TEST(Gradation, Errors) {
  EXPECT_THROW(gradation_report({}, {1, 2}), EmptyInput);
  EXPECT_THROW(gradation_report(particles({1}), {2, 1}), Error);
  EXPECT_THROW(gradation_report(particles({1}), {2, 2}), Error);
}

TEST(Gradation, CsvOutput) {
  std::ostringstream os;
  write_gradation_csv(os, gradation_report(particles({1, 2, 50}), {3}));
  EXPECT_EQ(os.str(), "threshold,percent_finer\n3,66.6667\ninf,100.0000\n");
}

TEST(Metrics, CsvOutput) {
  const TriMesh m = cube(1.0);
  std::ostringstream os;
  write_metrics_csv(os, {segment_metrics(m, one_segment(m), 0)});
  EXPECT_EQ(os.str(), "segment_id,face_count,surface_area,d1,d2,d3,elongation,flatness\n0,24,6,1,1,1,1.000000,1.000000\n");
}
