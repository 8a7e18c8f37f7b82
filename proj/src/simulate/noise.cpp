#include "pickless/simulate/noise.hpp"

#include <cmath>
#include <random>

#include "pickless/common/errors.hpp"

namespace pickless::simulate {

double noise_variance(const Micrograph& mg, double snr) {
  require(!mg.placements.empty(), "add_noise: micrograph has no projections");
  require(snr > 0.0, "add_noise: snr must be > 0");
  if (std::isinf(snr)) return 0.0;
  double mean = 0.0;
  for (const auto& p : mg.placements) mean += p.energy;
  mean /= static_cast<double>(mg.placements.size());
  if (!(mean > 0.0)) throw ValidationError("add_noise: projections have zero energy");
  return mean / (static_cast<double>(mg.L_proj) * mg.L_proj * snr);
}

void add_white_noise(RealImage& img, double sigma2, uint64_t seed) {
  require(sigma2 >= 0.0, "noise variance must be >= 0");
  if (sigma2 == 0.0) return;
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g(0.0, std::sqrt(sigma2));
  for (Eigen::Index i = 0; i < img.size(); ++i) img.data()[i] += g(rng);
}

void add_noise(Micrograph& mg, double snr, uint64_t seed) {
  mg.sigma2 = noise_variance(mg, snr);
  add_white_noise(mg.pixels, mg.sigma2, seed);
}

}  // namespace pickless::simulate
