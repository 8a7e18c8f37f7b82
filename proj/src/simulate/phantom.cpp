#include "pickless/simulate/phantom.hpp"

#include <array>
#include <cmath>
#include <random>

#include "pickless/common/errors.hpp"

namespace pickless::simulate {

namespace {

double trilinear(const Volume& v, double x, double y, double z) {
  const int n = v.n;
  const double fx = x + 0.5 * (n - 1), fy = y + 0.5 * (n - 1), fz = z + 0.5 * (n - 1);
  const int i0 = static_cast<int>(std::floor(fx)), j0 = static_cast<int>(std::floor(fy)),
            k0 = static_cast<int>(std::floor(fz));
  const double tx = fx - i0, ty = fy - j0, tz = fz - k0;
  double s = 0.0;
  for (int a = 0; a < 2; ++a) {
    const int i = i0 + a;
    if (i < 0 || i >= n) continue;
    const double wa = a ? tx : 1.0 - tx;
    for (int b = 0; b < 2; ++b) {
      const int j = j0 + b;
      if (j < 0 || j >= n) continue;
      const double wb = b ? ty : 1.0 - ty;
      for (int c = 0; c < 2; ++c) {
        const int k = k0 + c;
        if (k < 0 || k >= n) continue;
        s += wa * wb * (c ? tz : 1.0 - tz) * v(i, j, k);
      }
    }
  }
  return s;
}

}  // namespace

Volume shepp_logan(int n) {
  require(n >= 3, "shepp_logan: n must be >= 3");
  // amplitude, semi-axes (a, b, c), center (x, y, z), rotation about z in degrees
  static const std::array<std::array<double, 8>, 10> table = {{
      {1.0, 0.6900, 0.920, 0.810, 0.0, 0.0, 0.0, 0.0},
      {-0.8, 0.6624, 0.874, 0.780, 0.0, -0.0184, 0.0, 0.0},
      {-0.2, 0.1100, 0.310, 0.220, 0.22, 0.0, 0.0, -18.0},
      {-0.2, 0.1600, 0.410, 0.280, -0.22, 0.0, 0.0, 18.0},
      {0.1, 0.2100, 0.250, 0.410, 0.0, 0.35, -0.15, 0.0},
      {0.1, 0.0460, 0.046, 0.050, 0.0, 0.1, 0.25, 0.0},
      {0.1, 0.0460, 0.046, 0.050, 0.0, -0.1, 0.25, 0.0},
      {0.1, 0.0460, 0.023, 0.050, -0.08, -0.605, 0.0, 0.0},
      {0.1, 0.0230, 0.023, 0.020, 0.0, -0.606, 0.0, 0.0},
      {0.1, 0.0230, 0.046, 0.020, 0.06, -0.605, 0.0, 0.0},
  }};
  Volume v(n);
  const double R = 0.5 * n;
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      for (int k = 0; k < n; ++k) {
        const double x = centered(i, n) / R, y = centered(j, n) / R, z = centered(k, n) / R;
        double val = 0.0;
        for (const auto& e : table) {
          const double th = e[7] * kPi / 180.0;
          const double dx = x - e[4], dy = y - e[5], dz = z - e[6];
          const double u = std::cos(th) * dx + std::sin(th) * dy;
          const double w = -std::sin(th) * dx + std::cos(th) * dy;
          if ((u / e[1]) * (u / e[1]) + (w / e[2]) * (w / e[2]) + (dz / e[3]) * (dz / e[3]) <= 1.0) val += e[0];
        }
        v(i, j, k) = val;
      }
    }
  }
  return v;
}

Volume random_blobs(int n, uint64_t seed, int count) {
  require(n >= 3 && count >= 1, "random_blobs: invalid size or count");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Volume v(n);
  const double R = 0.5 * n;
  for (int b = 0; b < count; ++b) {
    Vec3 c;
    do {
      c = Vec3(u(rng), u(rng), u(rng));
    } while (c.norm() > 1.0);
    c *= 0.6 * R;
    const double width = (0.08 + 0.06 * (u(rng) + 1.0)) * n;
    const double amp = 0.4 + 0.3 * (u(rng) + 1.0);
    for (int i = 0; i < n; ++i) {
      for (int j = 0; j < n; ++j) {
        for (int k = 0; k < n; ++k) {
          const Vec3 p(centered(i, n), centered(j, n), centered(k, n));
          v(i, j, k) += amp * std::exp(-(p - c).squaredNorm() / (2.0 * width * width));
        }
      }
    }
  }
  return v;
}

RealImage project_volume(const Volume& vol, const Mat3& R) {
  const int n = vol.n;
  const Mat3 Rt = R.transpose();
  RealImage img = RealImage::Zero(n, n);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      double s = 0.0;
      for (int k = 0; k < n; ++k) {
        const Vec3 q = Rt * Vec3(centered(i, n), centered(j, n), centered(k, n));
        s += trilinear(vol, q.x(), q.y(), q.z());
      }
      img(i, j) = s;
    }
  }
  return img;
}

}  // namespace pickless::simulate
