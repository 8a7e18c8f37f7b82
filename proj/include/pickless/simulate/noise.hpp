#pragma once

#include <cstdint>
#include <limits>

#include "pickless/simulate/micrograph.hpp"

namespace pickless::simulate {

/// sigma^2 = mean_t ||I_t||_F^2 / (L^2 snr) over the placed projections.
double noise_variance(const Micrograph& mg, double snr);

/// Adds i.i.d. N(0, sigma^2) noise with sigma^2 from noise_variance and records it.
/// snr = +inf leaves the pixels untouched with sigma^2 = 0.
void add_noise(Micrograph& mg, double snr, uint64_t seed);

/// Adds white Gaussian noise of a given variance.
void add_white_noise(RealImage& img, double sigma2, uint64_t seed);

}  // namespace pickless::simulate
