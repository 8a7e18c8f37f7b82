#pragma once

#include <vector>

#include "pickless/basis/rotation.hpp"
#include "pickless/common/types.hpp"

namespace pickless::basis {

/// Wigner-D matrix of degree ell for rotation omega, indexed
/// D(m' + ell, m + ell). Convention: Y_ell^m(R^-1 u) = sum_m' D_{m'm}(R) Y_ell^m'(u),
/// so D(R1 R2) = D(R1) D(R2).
ComplexMatrix wigner_d(int ell, const Rotation& omega);

/// Small-d matrix d^ell(beta) = exp(-i beta J_y), real.
RealMatrix wigner_small_d(int ell, double beta);

/// Wigner-D matrices for every degree 0..ell_max of one rotation.
class WignerSet {
 public:
  WignerSet() = default;
  WignerSet(int ell_max, const Rotation& omega);

  int ell_max() const { return static_cast<int>(blocks_.size()) - 1; }
  const ComplexMatrix& operator[](int ell) const { return blocks_[ell]; }
  cdouble at(int ell, int mp, int m) const { return blocks_[ell](mp + ell, m + ell); }

 private:
  std::vector<ComplexMatrix> blocks_;
};

/// K rotations with their Wigner-D tables.
struct RotationGrid {
  std::vector<Rotation> rotations;
  std::vector<WignerSet> wigner;
  int ell_max = 0;

  int size() const { return static_cast<int>(rotations.size()); }
};

/// K Haar-uniform rotations drawn from a fixed seed. With include_identity the
/// first element is replaced by the identity.
RotationGrid build_rotation_grid(int K, uint64_t seed, int ell_max, bool include_identity = false);

RotationGrid make_rotation_grid(std::vector<Rotation> rotations, int ell_max);

}  // namespace pickless::basis
