#include "pickless/basis/rotation.hpp"

#include <cmath>

#include "pickless/common/errors.hpp"

namespace pickless::basis {

namespace {

Mat3 quat_to_matrix(const std::array<double, 4>& q) {
  const double w = q[0], x = q[1], y = q[2], z = q[3];
  Mat3 m;
  m << 1 - 2 * (y * y + z * z), 2 * (x * y - w * z), 2 * (x * z + w * y),
      2 * (x * y + w * z), 1 - 2 * (x * x + z * z), 2 * (y * z - w * x),
      2 * (x * z - w * y), 2 * (y * z + w * x), 1 - 2 * (x * x + y * y);
  return m;
}

}  // namespace

Rotation::Rotation() : q_{1.0, 0.0, 0.0, 0.0}, m_(Mat3::Identity()) {}

Rotation Rotation::from_quaternion(double w, double x, double y, double z) {
  const double n = std::sqrt(w * w + x * x + y * y + z * z);
  require(n > 0.0 && std::isfinite(n), "Rotation: degenerate quaternion");
  Rotation r;
  r.q_ = {w / n, x / n, y / n, z / n};
  // Canonical hemisphere keeps serialized grids reproducible.
  if (r.q_[0] < 0) {
    for (auto& c : r.q_) c = -c;
  }
  r.m_ = quat_to_matrix(r.q_);
  return r;
}

Rotation Rotation::from_matrix(const Mat3& m) {
  require((m * m.transpose() - Mat3::Identity()).norm() < 1e-8 && m.determinant() > 0,
          "Rotation: matrix is not in SO(3)");
  Eigen::Quaterniond q(m);
  return from_quaternion(q.w(), q.x(), q.y(), q.z());
}

Rotation Rotation::from_euler_zyz(double alpha, double beta, double gamma) {
  Eigen::Quaterniond q = Eigen::AngleAxisd(alpha, Vec3::UnitZ()) *
                         Eigen::AngleAxisd(beta, Vec3::UnitY()) *
                         Eigen::AngleAxisd(gamma, Vec3::UnitZ());
  return from_quaternion(q.w(), q.x(), q.y(), q.z());
}

Rotation Rotation::random(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  const double u1 = u(rng), u2 = u(rng), u3 = u(rng);
  const double a = std::sqrt(1.0 - u1), b = std::sqrt(u1);
  return from_quaternion(b * std::cos(2 * kPi * u3), a * std::sin(2 * kPi * u2),
                         a * std::cos(2 * kPi * u2), b * std::sin(2 * kPi * u3));
}

std::array<double, 3> Rotation::euler_zyz() const {
  const Mat3& r = m_;
  const double sb = std::hypot(r(0, 2), r(1, 2));
  const double beta = std::atan2(sb, r(2, 2));
  double alpha, gamma;
  if (sb > 1e-12) {
    alpha = std::atan2(r(1, 2), r(0, 2));
    gamma = std::atan2(r(2, 1), -r(2, 0));
  } else if (r(2, 2) > 0) {
    // beta = 0: only alpha + gamma is defined.
    alpha = std::atan2(r(1, 0), r(0, 0));
    gamma = 0.0;
  } else {
    alpha = std::atan2(-r(1, 0), -r(0, 0));
    gamma = 0.0;
  }
  return {alpha, beta, gamma};
}

Rotation Rotation::operator*(const Rotation& rhs) const {
  const auto& a = q_;
  const auto& b = rhs.q_;
  return from_quaternion(a[0] * b[0] - a[1] * b[1] - a[2] * b[2] - a[3] * b[3],
                         a[0] * b[1] + a[1] * b[0] + a[2] * b[3] - a[3] * b[2],
                         a[0] * b[2] - a[1] * b[3] + a[2] * b[0] + a[3] * b[1],
                         a[0] * b[3] + a[1] * b[2] - a[2] * b[1] + a[3] * b[0]);
}

Rotation Rotation::inverse() const { return from_quaternion(q_[0], -q_[1], -q_[2], -q_[3]); }

Rotation rotation_z(double gamma) { return Rotation::from_euler_zyz(gamma, 0.0, 0.0); }

}  // namespace pickless::basis
