#pragma once

#include <array>
#include <vector>

#include "pickless/basis/params.hpp"
#include "pickless/forward/coefficients.hpp"

namespace pickless::forward {

/// fhat(w) = int f(p) e^{-i w.p} dp at a frequency w in radians per pixel;
/// zero outside the bandlimit ball |w| <= 2 pi c.
cdouble evaluate_fourier(const VolumeCoefficients& x, const basis::BandlimitParams& params, const Vec3& w);

/// Basis rows of the expansion at the integer DFT frequencies q (signed,
/// w = 2 pi q / n) of an n^3 grid that fall inside the bandlimit ball.
struct BallSampling {
  int n = 0;
  std::vector<std::array<int, 3>> q;
  ComplexMatrix basis;  // rows: frequencies, cols: coefficients
};

BallSampling ball_sampling(const basis::BandlimitParams& params, const CoeffLayout& layout, int n);

/// Voxel rendering on an n^3 grid: fhat sampled on the DFT grid inside the
/// bandlimit ball, inverse transformed. Throws NumericalError if the
/// imaginary residue exceeds 1e-6 relative.
Volume render_volume(const VolumeCoefficients& x, const basis::BandlimitParams& params, int n);

/// Least-squares fit of the expansion to the DFT of `vol` over the in-ball grid
/// points, constrained to conjugate-symmetric coefficients.
VolumeCoefficients fit_coefficients(const Volume& vol, const basis::BandlimitParams& params);

}  // namespace pickless::forward
