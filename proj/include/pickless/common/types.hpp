#pragma once

#include <complex>
#include <cstddef>
#include <vector>

#include <Eigen/Dense>

namespace pickless {

using cdouble = std::complex<double>;

// Images are indexed [i, j] with i along x and j along y.
using RealImage = Eigen::Matrix<double, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;
using ComplexImage = Eigen::Matrix<cdouble, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

using RealMatrix = Eigen::MatrixXd;
using ComplexMatrix = Eigen::MatrixXcd;
using RealVector = Eigen::VectorXd;
using ComplexVector = Eigen::VectorXcd;
using Mat3 = Eigen::Matrix3d;
using Vec3 = Eigen::Vector3d;

/// Cubic voxel grid stored [i][j][k] (x, y, z) with k contiguous.
struct Volume {
  int n = 0;
  std::vector<double> data;

  Volume() = default;
  explicit Volume(int side) : n(side), data(static_cast<size_t>(side) * side * side, 0.0) {}

  double& operator()(int i, int j, int k) { return data[(static_cast<size_t>(i) * n + j) * n + k]; }
  double operator()(int i, int j, int k) const {
    return data[(static_cast<size_t>(i) * n + j) * n + k];
  }
  size_t size() const { return data.size(); }
};

constexpr double kPi = 3.141592653589793238462643383279502884;

// Centered coordinate of pixel/voxel index idx in a grid of side n.
inline double centered(int idx, int n) { return idx - 0.5 * (n - 1); }

}  // namespace pickless
