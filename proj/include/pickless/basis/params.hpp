#pragma once

#include <vector>

namespace pickless::basis {

/// Bandlimit and truncation of the volume and projection expansions.
///
/// `c` is the bandlimit in cycles per pixel (1/2 is Nyquist). The PSWF
/// eigenproblem lives on the unit disk inscribed in the L x L patch, where the
/// same bandlimit reads `disk_bandlimit() = pi * c * L`.
struct BandlimitParams {
  double c = 0.5;
  int L = 11;
  int ell_max = 6;
  /// Radial count S(ell), ell = 0..ell_max.
  std::vector<int> S_of_ell;
  /// Zeros u_{ell,s} backing S_of_ell; zeros[ell][s-1].
  std::vector<std::vector<double>> zeros;
  /// Relative eigenvalue-power cut |alpha_{N,n}|^2 / |alpha_{0,0}|^2 for PSWF retention.
  double pswf_threshold = 1e-6;

  double disk_bandlimit() const;
  /// Angular bandlimit in radians per pixel.
  double angular_bandlimit() const;
  int coefficient_count() const;
  int S_max() const;
  void validate() const;
};

/// Default Nyquist-counting rule: keep s while u_{ell,s} <= pi c L; at least one
/// radial function per degree is always kept.
BandlimitParams make_bandlimit_params(double c, int L, int ell_max, double pswf_threshold = 1e-6);

/// Same, with an injected S(ell) table.
BandlimitParams make_bandlimit_params(double c, int L, int ell_max, std::vector<int> S_of_ell,
                                      double pswf_threshold = 1e-6);

}  // namespace pickless::basis
