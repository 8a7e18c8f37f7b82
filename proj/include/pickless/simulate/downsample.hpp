#pragma once

#include "pickless/simulate/micrograph.hpp"

namespace pickless::simulate {

/// Centered Fourier crop of an n x n image to m x m (m <= n). For even m the
/// output Nyquist row/column averages the two input bins at +-m/2. Scaled so
/// the mean (DC) is preserved.
RealImage fourier_crop(const RealImage& img, int m);

/// Downsample by target_L / L_proj. The output side is round(N target_L / L_proj);
/// placements are rescaled about pixel centers and sigma^2 is rescaled by the
/// pixel-variance factor (m/n)^2.
Micrograph downsample(const Micrograph& mg, int target_L);

}  // namespace pickless::simulate
