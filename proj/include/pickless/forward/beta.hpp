#pragma once

#include <vector>

#include "pickless/basis/pswf.hpp"
#include "pickless/forward/coefficients.hpp"

namespace pickless::forward {

/// beta_hat_{ell,s;N,n} = c^2 alpha_{N,n} beta_{ell,s;N,n}, with
///   beta_{ell,s;N,n} = sqrt(2 pi) Y_ell^N(pi/2, 0) int_0^1 j_{ell,s}(k) Phi_{|N|,n}(k) k dk.
/// Zero unless ell >= |N| and ell + N is even.
class BetaTable {
 public:
  BetaTable() = default;
  BetaTable(CoeffLayout layout, std::vector<ComplexMatrix> by_ell)
      : layout_(std::move(layout)), by_ell_(std::move(by_ell)) {}

  const CoeffLayout& layout() const { return layout_; }
  /// P x S(ell) block for degree ell; row = PSWF entry, column = s - 1.
  const ComplexMatrix& block(int ell) const { return by_ell_[ell]; }
  cdouble operator()(int ell, int s, int entry) const { return by_ell_[ell](entry, s - 1); }

 private:
  CoeffLayout layout_;
  std::vector<ComplexMatrix> by_ell_;
};

/// Radial integrals use the basis' Gauss-Legendre nodes on [0, 1].
BetaTable compute_beta_table(const basis::PswfBasis& basis, const basis::BandlimitParams& params);

}  // namespace pickless::forward
