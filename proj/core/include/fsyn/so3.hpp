#pragma once

// Rotation-group kernels for the Bloch sphere.
//
// Generator convention (fixed, checked entrywise in tests):
//
//   Omega_x = [0 0 0; 0 0 -1; 0 1 0]
//   Omega_y = [0 0 1; 0 0 0; -1 0 0]
//   Omega_z = [0 -1 0; 1 0 0; 0 0 0]
//
// so that Omega_y * e_z = e_x and a positive rf flip about y tips +z toward +x.

#include <Eigen/Core>
#include <Eigen/Geometry>

#include <tuple>

namespace fsyn {

enum class Generator { X, Y, Z };

/// The antisymmetric generator matrix for `g`.
Eigen::Matrix3d generator_matrix(Generator g);

/// A proper rotation (3x3 special orthogonal matrix).
class Rotation {
 public:
  Rotation() : m_(Eigen::Matrix3d::Identity()) {}

  static Rotation identity() { return Rotation(); }

  /// Wraps `m` after checking orthogonality and det = +1 to `tol`.
  /// Throws InvalidArgument otherwise.
  static Rotation from_matrix(const Eigen::Matrix3d& m, double tol = 1e-9);

  const Eigen::Matrix3d& matrix() const { return m_; }
  double operator()(int r, int c) const { return m_(r, c); }

  Rotation inverse() const { return Rotation(m_.transpose(), Unchecked{}); }

  /// Matrix product: (a * b) applies b first, then a.
  friend Rotation operator*(const Rotation& a, const Rotation& b) {
    return Rotation(a.m_ * b.m_, Unchecked{});
  }

  /// max |R^T R - I| entry.
  double orthogonality_defect() const;
  double determinant() const { return m_.determinant(); }

 private:
  struct Unchecked {};
  Rotation(const Eigen::Matrix3d& m, Unchecked) : m_(m) {}

  friend Rotation rot_exp(double ax, double ay, double az);

  Eigen::Matrix3d m_;
};

/// Unit magnetization vector (Mx, My, Mz).
class SpinState {
 public:
  /// Requires a unit-norm vector (within `tol`); throws InvalidArgument otherwise.
  explicit SpinState(const Eigen::Vector3d& m, double tol = 1e-10);
  SpinState(double x, double y, double z) : SpinState(Eigen::Vector3d(x, y, z)) {}

  /// Normalizes `v`; throws InvalidArgument if `v` is zero or non-finite.
  static SpinState normalized(const Eigen::Vector3d& v);

  static SpinState ex() { return SpinState(1.0, 0.0, 0.0); }
  static SpinState ey() { return SpinState(0.0, 1.0, 0.0); }
  static SpinState ez() { return SpinState(0.0, 0.0, 1.0); }

  const Eigen::Vector3d& vector() const { return m_; }
  double x() const { return m_.x(); }
  double y() const { return m_.y(); }
  double z() const { return m_.z(); }

 private:
  struct Unchecked {};
  SpinState(const Eigen::Vector3d& m, Unchecked) : m_(m) {}
  friend SpinState apply(const Rotation& r, const SpinState& m);

  Eigen::Vector3d m_;
};

struct AxisAngle {
  Eigen::Vector3d axis{1.0, 0.0, 0.0};
  double angle = 0.0;  // radians, [0, pi]
};

struct EulerYXY {
  double a = 0.0;  // first factor (leftmost), about y
  double b = 0.0;  // about x, in [0, pi]
  double c = 0.0;  // rightmost, about y
};

/// exp(ax*Omega_x + ay*Omega_y + az*Omega_z), closed form (Rodrigues).
/// Throws InvalidArgument on non-finite input.
Rotation rot_exp(double ax, double ay, double az);

/// exp(angle * Omega_g).
Rotation rot_about(Generator g, double angle);

/// exp(alpha Omega_x) exp(beta Omega_y) exp(-alpha Omega_x)
///   = exp(beta (cos(alpha) Omega_y + sin(alpha) Omega_z)).
/// Returns the right-hand side.
Rotation conjugated_rotation(double alpha, double beta);

SpinState apply(const Rotation& r, const SpinState& m);

/// max over unit x of |(z - v) x|: the spectral norm of z - v, in [0, 2].
double operator_error(const Rotation& z, const Rotation& v);

/// Log map. Angle 0 reports axis (1,0,0); an exact half turn reports the axis
/// with its largest-magnitude component positive.
AxisAngle axis_angle_of(const Rotation& r);

/// r = exp(a Omega_y) exp(b Omega_x) exp(c Omega_y). When b is within 1e-9
/// of 0 or pi, c is set to 0 and the free angle goes into a.
EulerYXY euler_yxy(const Rotation& r);

}  // namespace fsyn
