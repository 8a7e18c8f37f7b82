#pragma once

#include <cstdint>

#include "pickless/common/types.hpp"

namespace pickless::simulate {

/// Modified 3-D Shepp-Logan ellipsoids scaled to the ball inscribed in n^3.
Volume shepp_logan(int n);

/// Sum of `count` isotropic Gaussian blobs placed inside 0.6 of the inscribed radius.
Volume random_blobs(int n, uint64_t seed, int count = 6);

/// Tri-linear rotation followed by summation along z:
///   I(i, j) = sum_k f(R^-1 p_{ijk}), p centered voxel coordinates.
RealImage project_volume(const Volume& vol, const Mat3& R);

}  // namespace pickless::simulate
