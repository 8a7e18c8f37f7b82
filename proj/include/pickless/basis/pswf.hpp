#pragma once

#include <vector>

#include "pickless/basis/params.hpp"
#include "pickless/common/types.hpp"

namespace pickless::basis {

struct PswfIndex {
  int N = 0;
  int n = 0;
};

/// 2-D prolate spheroidal wave functions on the unit disk.
///
///   psi_{N,n}(r, phi) = Phi_{|N|,n}(r) e^{i N phi} / sqrt(2 pi),  r <= 1,
///
/// with Phi real, int_0^1 Phi^2 r dr = 1, and the eigen-relation
///   alpha_{N,n} psi_{N,n}(k) = int_{|r|<=1} psi_{N,n}(r) e^{i c' r.k} dr,
/// where c' = params.disk_bandlimit(). alpha_{N,n} = 2 pi i^{|N|} lambda_{|N|,n}.
class PswfBasis {
 public:
  PswfBasis() = default;

  const BandlimitParams& params() const { return params_; }
  int L() const { return params_.L; }
  int N_max() const { return static_cast<int>(n_count_.size()) - 1; }
  /// Number of retained radial indices for angular index N (either sign).
  int n_count(int N) const;
  int size() const { return static_cast<int>(entries_.size()); }
  const std::vector<PswfIndex>& entries() const { return entries_; }
  /// Column of (N, n) in psi(); -1 when not retained.
  int index(int N, int n) const;

  cdouble alpha(int idx) const { return alpha_[idx]; }
  double lambda(int N, int n) const;

  /// L^2 x P sampled functions; row i * L + j is pixel (i, j).
  const ComplexMatrix& psi() const { return psi_; }

  /// Radial function Phi_{|N|,n}(r) for r in [0, 1].
  double radial(int N, int n, double r) const;
  /// psi_{N,n}(r, phi), zero for r > 1.
  cdouble evaluate(int N, int n, double r, double phi) const;

  /// Gauss-Legendre nodes/weights on [0, 1] and Phi sampled there
  /// (column per entry, same order as entries()).
  const std::vector<double>& radial_nodes() const { return rnodes_; }
  const std::vector<double>& radial_weights() const { return rweights_; }
  const RealMatrix& radial_samples() const { return rsamples_; }

  /// Zernike-basis coefficients of Phi_{N,n}, N >= 0.
  const RealVector& radial_coefficients(int N, int n) const { return coeffs_[N][n]; }

  friend PswfBasis build_pswf_basis(const BandlimitParams& params, int radial_nodes);
  friend class PswfSerializer;

 private:
  BandlimitParams params_;
  std::vector<int> n_count_;
  std::vector<std::vector<RealVector>> coeffs_;
  std::vector<std::vector<double>> lambda_;
  std::vector<PswfIndex> entries_;
  std::vector<cdouble> alpha_;
  ComplexMatrix psi_;
  std::vector<double> rnodes_, rweights_;
  RealMatrix rsamples_;
};

/// Normalized Zernike radial functions
///   T_{N,j}(r) = sqrt(2(2j+N+1)) r^N P_j^{(N,0)}(1 - 2 r^2),  j = 0..jmax.
std::vector<double> zernike_radial(int N, int jmax, double r);

PswfBasis build_pswf_basis(const BandlimitParams& params, int radial_nodes = 128);

/// Map pixel (i, j) of an L x L grid to disk polar coordinates (r, phi).
void pixel_to_disk(int i, int j, int L, double& r, double& phi);

}  // namespace pickless::basis
