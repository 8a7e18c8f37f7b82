#pragma once

#include <vector>

#include "pickless/common/types.hpp"

namespace pickless::basis {

/// Spherical Bessel function of the first kind j_ell(x).
double spherical_bessel(int ell, double x);

/// s-th positive zero u_{ell,s} of j_ell (s >= 1).
double spherical_bessel_zero(int ell, int s);

/// All positive zeros of j_ell that are <= limit, in increasing order.
std::vector<double> spherical_bessel_zeros_below(int ell, double limit);

/// (4 / |j_{ell+1}(u_{ell,s})|) * j_ell(u_{ell,s} k) for k in [0, 1].
double normalized_spherical_bessel(int ell, int s, double k);

/// Same as above with a precomputed zero; skips the root find.
double normalized_spherical_bessel_at(int ell, double zero, double k);

/// Fully normalized associated Legendre values
///   sqrt((2l+1)/(4pi) (l-m)!/(l+m)!) P_l^m(x),  Condon-Shortley phase included,
/// for 0 <= m <= l <= ell_max. Index with legendre_index(l, m).
std::vector<double> normalized_legendre(int ell_max, double x);

inline int legendre_index(int ell, int m) { return ell * (ell + 1) / 2 + m; }

/// Complex spherical harmonic Y_ell^m(theta, phi).
cdouble spherical_harmonic(int ell, int m, double theta, double phi);

/// All Y_l^m(theta, phi) for l <= ell_max, indexed by sh_index(l, m) = l^2 + l + m.
std::vector<cdouble> spherical_harmonics(int ell_max, double theta, double phi);

inline int sh_index(int ell, int m) { return ell * ell + ell + m; }

/// Gauss-Legendre nodes and weights on [a, b].
struct Quadrature {
  std::vector<double> nodes;
  std::vector<double> weights;
};
Quadrature gauss_legendre(int n, double a = -1.0, double b = 1.0);

/// Jacobi polynomials P_j^{(a,0)}(x) for j = 0..jmax.
std::vector<double> jacobi_a0(int jmax, double a, double x);

}  // namespace pickless::basis
