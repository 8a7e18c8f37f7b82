#pragma once

#include "pickless/basis/pswf.hpp"
#include "pickless/forward/beta.hpp"
#include "pickless/forward/coefficients.hpp"
#include "pickless/simulate/micrograph.hpp"

namespace pickless::simulate {

/// Expanded-volume generation: every projection comes from forward::project,
/// so the data follow the reconstruction model exactly. Uses L = basis.L().
Micrograph generate_method_two(const forward::VolumeCoefficients& x_true, const basis::PswfBasis& basis,
                               const forward::BetaTable& beta, const SimConfig& config);

/// True-volume generation: tri-linear rotation and z-summation of an
/// L_tilde^3 grid, noise at L_tilde, then Fourier downsampling when
/// config.downsample_to is set.
Micrograph generate_method_one(const Volume& volume, const SimConfig& config);

/// Adds each placement's image into the micrograph (boxes may touch the border).
void stamp(RealImage& mg, const RealImage& proj, int x, int y);

}  // namespace pickless::simulate
