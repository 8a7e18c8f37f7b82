#pragma once

#include <vector>

#include "pickless/basis/params.hpp"
#include "pickless/basis/rotation.hpp"
#include "pickless/forward/coefficients.hpp"

namespace pickless::eval {

struct AlignOptions {
  int rotations = 3000;    // coarse quasi-uniform grid
  int refine_steps = 20;   // golden-section steps per coordinate
  int refine_sweeps = 40;
};

struct AlignResult {
  basis::Rotation rotation;
  bool reflected = false;
  Vec3 translation = Vec3::Zero();  // voxels
  double correlation = 0.0;         // normalized, in the bandlimited Fourier domain
  forward::VolumeCoefficients coefficients;  // est after reflection and rotation (no translation)
  Volume volume;                             // fully aligned estimate on the output grid
};

/// Super-Fibonacci quasi-uniform rotations.
std::vector<basis::Rotation> quasi_uniform_rotations(int count);

/// x' for f'(p) = f(R^-1 p).
forward::VolumeCoefficients rotate_coefficients(const forward::VolumeCoefficients& x, const basis::Rotation& R);
/// x' for f'(p) = f(-p).
forward::VolumeCoefficients reflect_coefficients(const forward::VolumeCoefficients& x);

/// Best rotation, reflection and translation of `est` onto `truth`; both are
/// sampled on the n^3 DFT grid inside the bandlimit ball.
AlignResult align_coefficients(const forward::VolumeCoefficients& est, const forward::VolumeCoefficients& truth,
                               const basis::BandlimitParams& params, int n, const AlignOptions& opt = {});

/// Voxel-grid front end: `est` is fitted to the expansion of `params` so
/// rotations are applied exactly rather than by interpolation; `truth` is used
/// through its DFT inside the bandlimit ball.
AlignResult align(const Volume& est, const Volume& truth, const basis::BandlimitParams& params,
                  const AlignOptions& opt = {});

/// Renders coefficients translated by t voxels (Fourier phase, exact for the
/// bandlimited field).
Volume render_translated(const forward::VolumeCoefficients& x, const basis::BandlimitParams& params, int n,
                         const Vec3& t);

}  // namespace pickless::eval
