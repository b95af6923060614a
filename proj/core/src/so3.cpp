#include "fsyn/so3.hpp"

#include "fsyn/errors.hpp"

#include <Eigen/Dense>
#include <Eigen/Eigenvalues>

#include <algorithm>
#include <cassert>
#include <cmath>
#include <numbers>

namespace fsyn {

namespace {

Eigen::Matrix3d hat(const Eigen::Vector3d& v) {
  Eigen::Matrix3d k;
  // clang-format off
  k <<   0.0, -v.z(),  v.y(),
       v.z(),    0.0, -v.x(),
      -v.y(),  v.x(),    0.0;
  // clang-format on
  return k;
}

Eigen::Vector3d vee_antisymmetric(const Eigen::Matrix3d& m) {
  return 0.5 * Eigen::Vector3d(m(2, 1) - m(1, 2), m(0, 2) - m(2, 0), m(1, 0) - m(0, 1));
}

}  // namespace

Eigen::Matrix3d generator_matrix(Generator g) {
  switch (g) {
    case Generator::X: return hat(Eigen::Vector3d::UnitX());
    case Generator::Y: return hat(Eigen::Vector3d::UnitY());
    case Generator::Z: return hat(Eigen::Vector3d::UnitZ());
  }
  throw InvalidArgument("unknown generator");
}

Rotation Rotation::from_matrix(const Eigen::Matrix3d& m, double tol) {
  if (!m.allFinite()) throw InvalidArgument("rotation matrix has non-finite entries");
  const double defect = (m.transpose() * m - Eigen::Matrix3d::Identity()).cwiseAbs().maxCoeff();
  if (defect > tol) throw InvalidArgument("matrix is not orthogonal");
  if (std::abs(m.determinant() - 1.0) > tol) throw InvalidArgument("matrix determinant is not +1");
  return Rotation(m, Unchecked{});
}

double Rotation::orthogonality_defect() const {
  return (m_.transpose() * m_ - Eigen::Matrix3d::Identity()).cwiseAbs().maxCoeff();
}

SpinState::SpinState(const Eigen::Vector3d& m, double tol) : m_(m) {
  if (!m.allFinite()) throw InvalidArgument("spin state has non-finite components");
  if (std::abs(m.norm() - 1.0) > tol) throw InvalidArgument("spin state must have unit norm");
}

SpinState SpinState::normalized(const Eigen::Vector3d& v) {
  const double n = v.norm();
  if (!std::isfinite(n) || n == 0.0) throw InvalidArgument("cannot normalize a zero or non-finite vector");
  return SpinState(v / n, Unchecked{});
}

Rotation rot_exp(double ax, double ay, double az) {
  if (!std::isfinite(ax) || !std::isfinite(ay) || !std::isfinite(az)) {
    throw InvalidArgument("rot_exp: non-finite generator coefficient");
  }
  const Eigen::Vector3d v(ax, ay, az);
  const double theta = v.norm();
  if (theta == 0.0) return Rotation::identity();

  const Eigen::Matrix3d k = hat(v);
  // sin(t)/t and (1 - cos t)/t^2 written to stay accurate as t -> 0.
  const double half = 0.5 * theta;
  const double sinc = std::sin(theta) / theta;
  const double s_half = std::sin(half) / half;
  const double versc = 0.5 * s_half * s_half;
  Eigen::Matrix3d r = Eigen::Matrix3d::Identity() + sinc * k + versc * (k * k);
  return Rotation(r, Rotation::Unchecked{});
}

Rotation rot_about(Generator g, double angle) {
  switch (g) {
    case Generator::X: return rot_exp(angle, 0.0, 0.0);
    case Generator::Y: return rot_exp(0.0, angle, 0.0);
    case Generator::Z: return rot_exp(0.0, 0.0, angle);
  }
  throw InvalidArgument("unknown generator");
}

Rotation conjugated_rotation(double alpha, double beta) {
  if (!std::isfinite(alpha) || !std::isfinite(beta)) {
    throw InvalidArgument("conjugated_rotation: non-finite angle");
  }
  Rotation rhs = rot_exp(0.0, beta * std::cos(alpha), beta * std::sin(alpha));
#ifndef NDEBUG
  const Rotation lhs = rot_exp(alpha, 0.0, 0.0) * rot_exp(0.0, beta, 0.0) * rot_exp(-alpha, 0.0, 0.0);
  assert((lhs.matrix() - rhs.matrix()).cwiseAbs().maxCoeff() <= 1e-12);
#endif
  return rhs;
}

SpinState apply(const Rotation& r, const SpinState& m) {
  return SpinState(r.matrix() * m.vector(), SpinState::Unchecked{});
}

double operator_error(const Rotation& z, const Rotation& v) {
  const Eigen::Matrix3d d = z.matrix() - v.matrix();
  const Eigen::Matrix3d gram = d.transpose() * d;
  Eigen::SelfAdjointEigenSolver<Eigen::Matrix3d> solver(gram, Eigen::EigenvaluesOnly);
  const double lambda_max = std::max(0.0, solver.eigenvalues().maxCoeff());
  return std::min(2.0, std::sqrt(lambda_max));
}

AxisAngle axis_angle_of(const Rotation& r) {
  const Eigen::Matrix3d& m = r.matrix();
  const Eigen::Vector3d w = vee_antisymmetric(m);  // sin(angle) * axis
  const double cos_angle = std::clamp(0.5 * (m.trace() - 1.0), -1.0, 1.0);
  const double sin_angle = w.norm();
  const double angle = std::atan2(sin_angle, cos_angle);

  AxisAngle out;
  out.angle = angle;
  if (sin_angle == 0.0 && cos_angle > 0.0) return out;  // identity: axis (1,0,0)

  if (cos_angle >= 0.0) {
    out.axis = w / sin_angle;
    return out;
  }

  // Obtuse angles: the symmetric part (1 - cos) n n^T is better conditioned than w.
  const Eigen::Matrix3d outer =
      (0.5 * (m + m.transpose()) - cos_angle * Eigen::Matrix3d::Identity()) / (1.0 - cos_angle);
  Eigen::Index col = 0;
  outer.diagonal().maxCoeff(&col);
  Eigen::Vector3d n = outer.col(col) / std::sqrt(std::max(outer(col, col), 0.0));
  n.normalize();

  constexpr double kSinResolution = 1e-12;
  if (sin_angle > kSinResolution) {
    if (n.dot(w) < 0.0) n = -n;
  } else {
    Eigen::Index big = 0;
    n.cwiseAbs().maxCoeff(&big);
    if (n(big) < 0.0) n = -n;
  }
  out.axis = n;
  return out;
}

EulerYXY euler_yxy(const Rotation& r) {
  const Eigen::Matrix3d& m = r.matrix();
  constexpr double kGimbal = 1e-9;
  EulerYXY e;
  e.b = std::atan2(std::hypot(m(1, 0), m(1, 2)), m(1, 1));
  if (e.b < kGimbal) {
    // Ry(a) Rx(b) with b ~ 0: the y angles merge.
    e.a = std::atan2(m(0, 2), m(0, 0));
    e.c = 0.0;
  } else if (std::numbers::pi - e.b < kGimbal) {
    // Ry(a) Rx(pi) Ry(c) = Ry(a - c) Rx(pi).
    e.a = std::atan2(-m(2, 0), m(0, 0));
    e.c = 0.0;
  } else {
    e.a = std::atan2(m(0, 1), m(2, 1));
    e.c = std::atan2(m(1, 0), -m(1, 2));
  }
  return e;
}

}  // namespace fsyn
