#pragma once

#include <Eigen/Eigenvalues>

#include "granulite/recon/knn.hpp"

namespace granulite::recon {

// PCA normal of each point's neighborhood (the point plus its k nearest
// neighbors), flipped to face away from the cloud centroid.
inline PointCloud estimate_normals(const PointCloud& cloud, std::size_t k) {
  if (k < 3) throw Error("normal estimation needs k >= 3");
  if (cloud.size() < k + 1)
    throw Error("normal estimation with k=" + std::to_string(k) + " needs at least " + std::to_string(k + 1) + " points");
  PointCloud out = cloud;
  out.normals.resize(cloud.size());

  Vec3 centroid = Vec3::Zero();
  for (const Vec3& p : cloud.positions) centroid += p;
  centroid /= static_cast<double>(cloud.size());

  SpatialHash hash(cloud.positions);
  Eigen::SelfAdjointEigenSolver<Mat3> eig;
  for (std::size_t i = 0; i < cloud.size(); ++i) {
    const auto nbrs = hash.nearest(i, k);
    Vec3 mean = cloud.positions[i];
    for (const auto& n : nbrs) mean += cloud.positions[n.index];
    mean /= static_cast<double>(nbrs.size() + 1);
    Mat3 cov = Mat3::Zero();
    auto acc = [&](const Vec3& p) {
      const Vec3 d = p - mean;
      cov += d * d.transpose();
    };
    acc(cloud.positions[i]);
    for (const auto& n : nbrs) acc(cloud.positions[n.index]);
    eig.compute(cov);
    const Vec3 ev = eig.eigenvalues();
    // a planar (or better) neighborhood needs two significant spreads
    if (!(ev[1] > 1e-12 * ev[2]) || !(ev[2] > 0.0)) throw DegenerateNeighborhood(i);
    Vec3 n = eig.eigenvectors().col(0).normalized();
    const double side = n.dot(cloud.positions[i] - centroid);
    if (side < 0.0) {
      n = -n;
    } else if (side == 0.0) {
      Eigen::Index axis;
      n.cwiseAbs().maxCoeff(&axis);
      if (n[axis] < 0.0) n = -n;
    }
    out.normals[i] = n;
  }
  return out;
}

}  // namespace granulite::recon
