#pragma once

#include <Eigen/Cholesky>
#include <Eigen/LU>

#include "granulite/sfm/camera.hpp"

namespace granulite::sfm {

enum class Termination { GradientTolerance, CostTolerance, StepTolerance, MaxIterations };

inline const char* to_string(Termination t) {
  switch (t) {
    case Termination::GradientTolerance: return "gradient_tolerance";
    case Termination::CostTolerance: return "cost_tolerance";
    case Termination::StepTolerance: return "step_tolerance";
    case Termination::MaxIterations: return "max_iterations";
  }
  return "unknown";
}

struct BundleOptions {
  double gtol = 1e-10;  // max-norm of the gradient
  double ftol = 1e-12;  // relative cost decrease of an accepted step
  double xtol = 1e-12;  // relative step length
  std::size_t max_iterations = 100;
  double lambda_init = 1e-3;
  double lambda_factor = 10.0;
  double lambda_max = 1e16;
};

struct BundleReport {
  std::size_t iterations = 0;  // linear solves, accepted or not
  std::size_t accepted = 0;
  double initial_cost = 0.0;
  double final_cost = 0.0;
  double final_lambda = 0.0;
  Termination termination = Termination::MaxIterations;
  std::vector<std::string> warnings;
};

namespace detail {

// Rotation R and center C per camera with one shared K; camera 0 fixed, camera 1
// kept at its initial distance from camera 0.
struct BundleState {
  Mat3 K;
  std::vector<Mat3> R;
  std::vector<Vec3> C;
  std::vector<Vec3> X;
  double baseline = 0.0;

  std::size_t cameras() const { return R.size(); }

  SceneEstimate scene() const {
    SceneEstimate s;
    for (std::size_t i = 0; i < R.size(); ++i) s.cameras.push_back({compose(K, R[i], C[i])});
    s.points = X;
    return s;
  }
};

inline Mat3 skew(const Vec3& v) {
  Mat3 m;
  m << 0, -v.z(), v.y(), v.z(), 0, -v.x(), -v.y(), v.x(), 0;
  return m;
}

// Orthonormal basis of the plane perpendicular to u.
inline Eigen::Matrix<double, 3, 2> tangent_basis(const Vec3& u) {
  Eigen::Index axis;
  u.cwiseAbs().minCoeff(&axis);
  const Vec3 a = u.cross(Vec3::Unit(axis)).normalized();
  Eigen::Matrix<double, 3, 2> B;
  B.col(0) = a;
  B.col(1) = u.cross(a);
  return B;
}

inline Vec2 project_pose(const Mat3& K, const Mat3& R, const Vec3& C, const Vec3& X, std::size_t ci, std::size_t pj) {
  const Vec3 z = K * (R * (X - C));
  if (std::abs(z.z()) <= kMinDepth) throw PointAtInfinity(ci, pj);
  return z.hnormalized();
}

// d(pixel)/d(camera-frame point y), for pixel = pi(K y)
inline Eigen::Matrix<double, 2, 3> projection_jacobian(const Mat3& K, const Vec3& y) {
  const Vec3 z = K * y;
  Eigen::Matrix<double, 2, 3> dz;
  dz << 1.0 / z.z(), 0.0, -z.x() / (z.z() * z.z()), 0.0, 1.0 / z.z(), -z.y() / (z.z() * z.z());
  return dz * K;
}

}  // namespace detail

// Per-observation Jacobian blocks, exposed for testing. Camera block columns are
// (rotation increment, center) for a free camera: 6 columns.
struct ResidualJacobian {
  Vec2 predicted;
  Eigen::Matrix<double, 2, 3> d_rotation;
  Eigen::Matrix<double, 2, 3> d_center;
  Eigen::Matrix<double, 2, 3> d_point;
};

inline ResidualJacobian observation_jacobian(const Mat3& K, const Mat3& R, const Vec3& C, const Vec3& X) {
  const Vec3 y = R * (X - C);
  const auto dpi = detail::projection_jacobian(K, y);
  ResidualJacobian j;
  j.predicted = detail::project_pose(K, R, C, X, 0, 0);
  j.d_rotation = -dpi * detail::skew(y);
  j.d_center = -dpi * R;
  j.d_point = dpi * R;
  return j;
}

// Rotation updated on the left: R' = exp([w]x) R
inline Mat3 rotate_left(const Vec3& w, const Mat3& R) {
  const double angle = w.norm();
  if (angle == 0.0) return R;
  return Eigen::AngleAxisd(angle, w / angle).toRotationMatrix() * R;
}

// Levenberg-Marquardt on the reprojection cost with point blocks eliminated by
// the Schur complement.
inline std::pair<SceneEstimate, BundleReport> bundle_adjust(const SceneEstimate& initial, const std::vector<Observation>& obs,
                                                            const BundleOptions& opts = {}) {
  const std::size_t m = initial.cameras.size(), n = initial.points.size();
  if (m < 2) throw InsufficientObservations("bundle adjustment needs at least 2 cameras");
  check_observations(initial, obs);
  {
    std::vector<std::size_t> per_cam(m, 0), per_pt(n, 0);
    for (const auto& o : obs) ++per_cam[o.camera], ++per_pt[o.point];
    for (std::size_t i = 0; i < m; ++i)
      if (per_cam[i] < 6) throw InsufficientObservations("camera " + std::to_string(i) + " sees " + std::to_string(per_cam[i]) + " points, needs 6");
    for (std::size_t j = 0; j < n; ++j)
      if (per_pt[j] < 2) throw InsufficientObservations("point " + std::to_string(j) + " is seen by " + std::to_string(per_pt[j]) + " cameras, needs 2");
  }

  BundleReport report;
  detail::BundleState state;
  for (std::size_t i = 0; i < m; ++i) {
    const CameraPose pose = decompose(initial.cameras[i]);
    if (i == 0) state.K = pose.K;
    else if ((pose.K - state.K).norm() > 1e-6 * state.K.norm())
      report.warnings.push_back("camera " + std::to_string(i) + " intrinsics differ from camera 0; camera 0 intrinsics are used");
    state.R.push_back(pose.R);
    state.C.push_back(pose.C);
  }
  state.X = initial.points;
  state.baseline = (state.C[1] - state.C[0]).norm();
  if (state.baseline <= 1e-9) throw DegenerateBaseline("cameras 0 and 1 share the same center");

  // parameter layout: camera 1 has 5 (rotation 3, tangent 2), cameras 2.. have 6
  std::vector<std::size_t> cam_offset(m, 0), cam_dim(m, 0);
  std::size_t nc = 0;
  for (std::size_t i = 1; i < m; ++i) {
    cam_offset[i] = nc;
    cam_dim[i] = i == 1 ? 5 : 6;
    nc += cam_dim[i];
  }
  const double baseline = state.baseline;

  auto cost_of = [&](const detail::BundleState& s) {
    double total = 0.0;
    for (const auto& o : obs)
      total += (o.pixel - detail::project_pose(s.K, s.R[o.camera], s.C[o.camera], s.X[o.point], o.camera, o.point)).squaredNorm();
    return total;
  };

  double cost = cost_of(state);
  report.initial_cost = cost;
  double lambda = opts.lambda_init;

  Eigen::MatrixXd U(nc, nc);
  Eigen::MatrixXd W(nc, 3 * n);
  std::vector<Mat3> V(n);
  Eigen::VectorXd gc(nc), gp(3 * n);
  Eigen::Matrix<double, 3, 2> B1;

  auto linearize = [&]() {
    U.setZero();
    W.setZero();
    gc.setZero();
    gp.setZero();
    for (auto& v : V) v.setZero();
    B1 = detail::tangent_basis((state.C[1] - state.C[0]) / baseline);
    for (const auto& o : obs) {
      const std::size_t i = o.camera, j = o.point;
      const ResidualJacobian J = observation_jacobian(state.K, state.R[i], state.C[i], state.X[j]);
      const Vec2 r = o.pixel - J.predicted;
      const Eigen::Matrix<double, 2, 3>& Jp = J.d_point;
      V[j] += Jp.transpose() * Jp;
      gp.segment<3>(3 * j) += Jp.transpose() * r;
      if (i == 0) continue;
      Eigen::Matrix<double, 2, 6> Jc;
      Jc.leftCols<3>() = J.d_rotation;
      if (i == 1) Jc.block<2, 2>(0, 3) = J.d_center * (baseline * B1);
      else Jc.rightCols<3>() = J.d_center;
      const auto d = static_cast<Eigen::Index>(cam_dim[i]);
      const auto off = static_cast<Eigen::Index>(cam_offset[i]);
      const auto Jci = Jc.leftCols(d);
      U.block(off, off, d, d) += Jci.transpose() * Jci;
      W.block(off, static_cast<Eigen::Index>(3 * j), d, 3) += Jci.transpose() * Jp;
      gc.segment(off, d) += Jci.transpose() * r;
    }
  };

  auto apply_step = [&](const Eigen::VectorXd& dc, const Eigen::VectorXd& dp) {
    detail::BundleState next = state;
    for (std::size_t i = 1; i < m; ++i) {
      const auto off = static_cast<Eigen::Index>(cam_offset[i]);
      next.R[i] = rotate_left(dc.segment<3>(off), state.R[i]);
      if (i == 1) {
        const Vec3 u = (state.C[1] - state.C[0]) / baseline + B1 * dc.segment<2>(off + 3);
        next.C[1] = state.C[0] + baseline * u.normalized();
      } else {
        next.C[i] = state.C[i] + dc.segment<3>(off + 3);
      }
    }
    for (std::size_t j = 0; j < n; ++j) next.X[j] = state.X[j] + dp.segment<3>(static_cast<Eigen::Index>(3 * j));
    return next;
  };

  double param_norm = 0.0;
  auto parameter_norm = [&]() {
    double s = 0.0;
    for (std::size_t i = 1; i < m; ++i) s += state.C[i].squaredNorm();
    for (const Vec3& x : state.X) s += x.squaredNorm();
    return std::sqrt(s);
  };

  bool relinearize = true;
  bool done = false;
  while (!done) {
    if (relinearize) {
      linearize();
      const double gmax = std::max(gc.size() ? gc.cwiseAbs().maxCoeff() : 0.0, gp.cwiseAbs().maxCoeff());
      if (gmax < opts.gtol) {
        report.termination = Termination::GradientTolerance;
        break;
      }
      param_norm = parameter_norm();
      relinearize = false;
    }
    if (report.iterations >= opts.max_iterations) {
      report.termination = Termination::MaxIterations;
      break;
    }
    ++report.iterations;

    // damped point blocks and their inverses
    bool singular = false;
    std::vector<Mat3> Vinv(n);
    for (std::size_t j = 0; j < n && !singular; ++j) {
      Mat3 Vd = V[j];
      Vd.diagonal() *= 1.0 + lambda;
      Eigen::FullPivLU<Mat3> lu(Vd);
      if (!lu.isInvertible()) singular = true;
      else Vinv[j] = lu.inverse();
    }
    Eigen::VectorXd dc = Eigen::VectorXd::Zero(nc), dp(3 * n);
    if (!singular) {
      Eigen::MatrixXd S = U;
      S.diagonal() *= 1.0 + lambda;
      Eigen::VectorXd rhs = gc;
      for (std::size_t j = 0; j < n; ++j) {
        const auto col = static_cast<Eigen::Index>(3 * j);
        const Eigen::MatrixXd WV = W.middleCols(col, 3) * Vinv[j];
        S.noalias() -= WV * W.middleCols(col, 3).transpose();
        rhs.noalias() -= WV * gp.segment<3>(col);
      }
      if (nc > 0) {
        Eigen::LDLT<Eigen::MatrixXd> ldlt(S);
        if (ldlt.info() != Eigen::Success || !ldlt.isPositive()) singular = true;
        else dc = ldlt.solve(rhs);
      }
      if (!dc.allFinite()) singular = true;
      for (std::size_t j = 0; j < n && !singular; ++j) {
        const auto col = static_cast<Eigen::Index>(3 * j);
        dp.segment<3>(col) = Vinv[j] * (gp.segment<3>(col) - W.middleCols(col, 3).transpose() * dc);
      }
    }
    if (singular) {
      lambda *= opts.lambda_factor;
      if (lambda > opts.lambda_max) throw SingularNormalEquations("damped normal equations are singular at the largest damping");
      continue;
    }

    const double step = std::sqrt(dc.squaredNorm() + dp.squaredNorm());
    const detail::BundleState next = apply_step(dc, dp);
    double next_cost = 0.0;
    bool valid = true;
    try {
      next_cost = cost_of(next);
    } catch (const PointAtInfinity&) {
      valid = false;
    }
    if (valid && next_cost < cost) {
      const double decrease = cost - next_cost;
      state = next;
      cost = next_cost;
      ++report.accepted;
      lambda = std::max(lambda / opts.lambda_factor, 1e-15);
      relinearize = true;
      if (decrease < opts.ftol * (cost + decrease)) {
        report.termination = Termination::CostTolerance;
        done = true;
      } else if (step < opts.xtol * (param_norm + opts.xtol)) {
        report.termination = Termination::StepTolerance;
        done = true;
      }
    } else if (valid && step < opts.xtol * (param_norm + opts.xtol)) {
      report.termination = Termination::StepTolerance;
      done = true;
    } else {
      lambda *= opts.lambda_factor;
      if (lambda > opts.lambda_max) {
        // no representable improvement is left
        report.termination = Termination::CostTolerance;
        done = true;
      }
    }
  }
  report.final_cost = cost;
  report.final_lambda = lambda;
  return {state.scene(), report};
}

}  // namespace granulite::sfm
