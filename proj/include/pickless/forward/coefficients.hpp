#pragma once

#include <vector>

#include "pickless/basis/params.hpp"
#include "pickless/common/types.hpp"

namespace pickless::forward {

/// Flat index of x_{ell,m,s}: ell-major, then m = -ell..ell, then s = 1..S(ell).
class CoeffLayout {
 public:
  CoeffLayout() = default;
  CoeffLayout(int ell_max, std::vector<int> S_of_ell);
  explicit CoeffLayout(const basis::BandlimitParams& p) : CoeffLayout(p.ell_max, p.S_of_ell) {}

  int ell_max() const { return ell_max_; }
  int S(int ell) const { return S_[ell]; }
  const std::vector<int>& S_of_ell() const { return S_; }
  int size() const { return size_; }
  /// s is 1-based.
  int index(int ell, int m, int s) const { return offset_[ell] + (m + ell) * S_[ell] + (s - 1); }
  int offset(int ell) const { return offset_[ell]; }

  bool operator==(const CoeffLayout& o) const { return ell_max_ == o.ell_max_ && S_ == o.S_; }

 private:
  int ell_max_ = -1;
  std::vector<int> S_;
  std::vector<int> offset_;
  int size_ = 0;
};

/// Expansion coefficients x_{ell,m,s} of the volume's Fourier transform:
///   fhat(W k, theta, phi) = sum x_{ell,m,s} Y_ell^m(theta, phi) j_{ell,s}(k).
struct VolumeCoefficients {
  CoeffLayout layout;
  ComplexVector x;

  VolumeCoefficients() = default;
  explicit VolumeCoefficients(CoeffLayout lay) : layout(std::move(lay)), x(ComplexVector::Zero(layout.size())) {}

  cdouble& at(int ell, int m, int s) { return x[layout.index(ell, m, s)]; }
  cdouble at(int ell, int m, int s) const { return x[layout.index(ell, m, s)]; }

  /// Max |x_{l,-m,s} - (-1)^{l+m} conj(x_{l,m,s})|.
  double symmetry_defect() const;
  /// Project onto the conjugate-symmetric subspace (average of the pair).
  void enforce_symmetry();
};

/// Real parameterization x = P theta of the conjugate-symmetric subspace.
/// theta shares the flat index of x: m = 0 slots hold the single real
/// parameter, (m > 0, -m) slots hold (Re, Im) of x_{l,m,s}.
ComplexMatrix real_parameterization(const CoeffLayout& layout);
ComplexVector from_real(const CoeffLayout& layout, const RealVector& theta);
RealVector to_real(const CoeffLayout& layout, const ComplexVector& x);

/// Zero-pad coefficients into a larger layout; entries missing from `to` are dropped.
VolumeCoefficients embed(const VolumeCoefficients& from, const CoeffLayout& to);

/// Gaussian random coefficients projected onto the symmetric subspace.
VolumeCoefficients random_coefficients(const CoeffLayout& layout, uint64_t seed);

}  // namespace pickless::forward
