#pragma once

#include <array>
#include <cstdint>
#include <random>
#include <vector>

#include "pickless/common/types.hpp"

namespace pickless::basis {

/// Element of SO(3) kept both as a unit quaternion (w, x, y, z) and as the
/// matching active rotation matrix.
class Rotation {
 public:
  Rotation();  // identity
  static Rotation from_quaternion(double w, double x, double y, double z);
  static Rotation from_matrix(const Mat3& m);
  /// R = Rz(alpha) Ry(beta) Rz(gamma).
  static Rotation from_euler_zyz(double alpha, double beta, double gamma);
  /// Haar-uniform sample (Shoemake's subgroup algorithm).
  static Rotation random(std::mt19937_64& rng);

  const Mat3& matrix() const { return m_; }
  const std::array<double, 4>& quaternion() const { return q_; }

  /// ZYZ Euler angles (alpha, beta, gamma) with beta in [0, pi].
  std::array<double, 3> euler_zyz() const;

  Rotation operator*(const Rotation& rhs) const;
  Rotation inverse() const;

 private:
  std::array<double, 4> q_;
  Mat3 m_;
};

/// Rotations about z by gamma (in-plane rotation of a projection).
Rotation rotation_z(double gamma);

}  // namespace pickless::basis
