#pragma once

#include <Eigen/Geometry>
#include <Eigen/QR>
#include <Eigen/SVD>
#include <set>
#include <utility>

#include "granulite/geometry/types.hpp"

namespace granulite::sfm {

using Mat34 = Eigen::Matrix<double, 3, 4>;

inline constexpr double kMinDepth = 1e-12;

struct CameraView {
  Mat34 P = Mat34::Zero();

  void check() const {
    if (!(std::abs(P.leftCols<3>().determinant()) > 1e-12)) throw Error("camera is not finite: singular left 3x3 block");
  }
};

struct Observation {
  std::size_t camera = 0;
  std::size_t point = 0;
  Vec2 pixel = Vec2::Zero();
};

struct SceneEstimate {
  std::vector<CameraView> cameras;
  std::vector<Vec3> points;
};

inline void check_observations(const SceneEstimate& scene, const std::vector<Observation>& obs) {
  std::set<std::pair<std::size_t, std::size_t>> seen;
  for (std::size_t k = 0; k < obs.size(); ++k) {
    const auto& o = obs[k];
    if (o.camera >= scene.cameras.size() || o.point >= scene.points.size())
      throw IndexOutOfRange("observation " + std::to_string(k) + " references camera " + std::to_string(o.camera) +
                            " / point " + std::to_string(o.point) + " outside the scene");
    if (!seen.emplace(o.camera, o.point).second)
      throw Error("duplicate observation of point " + std::to_string(o.point) + " in camera " + std::to_string(o.camera));
  }
}

inline Vec2 project(const CameraView& camera, const Vec3& X, std::size_t camera_id = 0, std::size_t point_id = 0) {
  const Vec3 h = camera.P * X.homogeneous();
  if (std::abs(h.z()) <= kMinDepth) throw PointAtInfinity(camera_id, point_id);
  return h.hnormalized();
}

// Sum over observations of squared pixel distances.
inline double reprojection_error(const SceneEstimate& scene, const std::vector<Observation>& obs) {
  double total = 0.0;
  for (const auto& o : obs) {
    if (o.camera >= scene.cameras.size() || o.point >= scene.points.size())
      throw IndexOutOfRange("observation references a missing camera or point");
    total += (o.pixel - project(scene.cameras[o.camera], scene.points[o.point], o.camera, o.point)).squaredNorm();
  }
  return total;
}

inline double reprojection_rmse(const SceneEstimate& scene, const std::vector<Observation>& obs) {
  if (obs.empty()) return 0.0;
  return std::sqrt(reprojection_error(scene, obs) / static_cast<double>(obs.size()));
}

// P = K [R | -R C]
struct CameraPose {
  Mat3 K = Mat3::Identity();
  Mat3 R = Mat3::Identity();
  Vec3 C = Vec3::Zero();
};

inline Vec3 camera_center(const CameraView& camera) {
  return -camera.P.leftCols<3>().partialPivLu().solve(camera.P.col(3));
}

inline Mat34 compose(const Mat3& K, const Mat3& R, const Vec3& C) {
  Mat34 P;
  P.leftCols<3>() = K * R;
  P.col(3) = -K * R * C;
  return P;
}

// RQ decomposition of the left block: K upper triangular with positive diagonal
// and K(2,2) = 1, R a proper rotation.
inline CameraPose decompose(const CameraView& camera) {
  camera.check();
  Mat3 M = camera.P.leftCols<3>();
  if (M.determinant() < 0.0) M = -M;  // P and -P are the same camera
  Mat3 flip;
  flip << 0, 0, 1, 0, 1, 0, 1, 0, 0;
  Eigen::HouseholderQR<Mat3> qr((flip * M).transpose());
  const Mat3 upper = qr.matrixQR().triangularView<Eigen::Upper>();
  const Mat3 Q = qr.householderQ();
  Mat3 K = flip * upper.transpose() * flip;
  Mat3 R = flip * Q.transpose();
  for (int i = 0; i < 3; ++i)
    if (K(i, i) < 0.0) {
      K.col(i) = -K.col(i);
      R.row(i) = -R.row(i);
    }
  CameraPose pose;
  pose.K = K / K(2, 2);
  pose.R = R;
  pose.C = camera_center(camera);
  return pose;
}

// Linear triangulation from two views (homogeneous DLT, smallest singular vector).
inline Vec3 triangulate(const CameraView& a, const CameraView& b, const Vec2& xa, const Vec2& xb) {
  if ((camera_center(a) - camera_center(b)).norm() <= 1e-9) throw DegenerateBaseline("cameras share the same center");
  Eigen::Matrix4d A;
  A.row(0) = xa.x() * a.P.row(2) - a.P.row(0);
  A.row(1) = xa.y() * a.P.row(2) - a.P.row(1);
  A.row(2) = xb.x() * b.P.row(2) - b.P.row(0);
  A.row(3) = xb.y() * b.P.row(2) - b.P.row(1);
  // row scaling keeps pixel magnitudes from dominating the conditioning
  for (int r = 0; r < 4; ++r) A.row(r) /= A.row(r).norm();
  Eigen::JacobiSVD<Eigen::Matrix4d> svd(A, Eigen::ComputeFullV);
  const Eigen::Vector4d X = svd.matrixV().col(3);
  if (std::abs(X.w()) < 1e-300) throw Error("triangulated point is at infinity");
  return X.hnormalized();
}

// Least-squares similarity (s, R, t) mapping src onto dst, and the residual
// RMS after alignment divided by the RMS spread of dst.
struct Alignment {
  Eigen::Matrix4d transform = Eigen::Matrix4d::Identity();
  double relative_error = 0.0;
  double max_relative_error = 0.0;
};

inline Alignment procrustes(const std::vector<Vec3>& src, const std::vector<Vec3>& dst) {
  if (src.size() != dst.size() || src.size() < 3) throw Error("procrustes needs two equal point lists of at least 3 points");
  const auto n = static_cast<Eigen::Index>(src.size());
  Eigen::Matrix3Xd S(3, n), D(3, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    S.col(i) = src[static_cast<std::size_t>(i)];
    D.col(i) = dst[static_cast<std::size_t>(i)];
  }
  Alignment out;
  out.transform = Eigen::umeyama(S, D, true);
  const Eigen::Matrix3Xd mapped = (out.transform * S.colwise().homogeneous()).colwise().hnormalized();
  const Eigen::Matrix3Xd centered = D.colwise() - D.rowwise().mean();
  const double spread = std::sqrt(centered.squaredNorm() / static_cast<double>(n));
  const Eigen::Matrix3Xd diff = mapped - D;
  out.relative_error = std::sqrt(diff.squaredNorm() / static_cast<double>(n)) / spread;
  out.max_relative_error = diff.colwise().norm().maxCoeff() / spread;
  return out;
}

}  // namespace granulite::sfm
