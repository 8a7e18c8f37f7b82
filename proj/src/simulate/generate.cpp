#include "pickless/simulate/generate.hpp"

#include "pickless/common/errors.hpp"
#include "pickless/common/hash.hpp"
#include "pickless/forward/projector.hpp"
#include "pickless/simulate/downsample.hpp"
#include "pickless/simulate/noise.hpp"
#include "pickless/simulate/phantom.hpp"
#include "pickless/simulate/placement.hpp"

namespace pickless::simulate {

namespace {

constexpr uint64_t kNoiseStream = 1;

template <class Render>
Micrograph assemble(const SimConfig& config, int L, Render render) {
  Micrograph mg;
  mg.L_proj = L;
  mg.pixels = RealImage::Zero(config.N, config.N);
  mg.placements = place_projections(config, L);
  const int T = static_cast<int>(mg.placements.size());
  std::vector<RealImage> images(T);
#pragma omp parallel for schedule(static)
  for (int t = 0; t < T; ++t) images[t] = render(mg.placements[t].rotation);
  for (int t = 0; t < T; ++t) {
    mg.placements[t].energy = images[t].squaredNorm();
    stamp(mg.pixels, images[t], mg.placements[t].x, mg.placements[t].y);
  }
  if (T > 0) add_noise(mg, config.snr, derive_seed(config.seed, kNoiseStream));
  return mg;
}

}  // namespace

void stamp(RealImage& mg, const RealImage& proj, int x, int y) {
  const int L = static_cast<int>(proj.rows());
  require(x >= 0 && y >= 0 && x + L <= mg.rows() && y + L <= mg.cols(), "stamp: box outside micrograph");
  mg.block(x, y, L, L) += proj;
}

Micrograph generate_method_two(const forward::VolumeCoefficients& x_true, const basis::PswfBasis& basis,
                               const forward::BetaTable& beta, const SimConfig& config) {
  config.validate();
  require(x_true.layout == beta.layout(), "generate_method_two: coefficients do not match the beta table");
  return assemble(config, basis.L(), [&](const basis::Rotation& r) {
    return forward::project(x_true, r, basis, beta).image;
  });
}

Micrograph generate_method_one(const Volume& volume, const SimConfig& config) {
  config.validate();
  require(volume.n == config.L_tilde, "generate_method_one: volume side must equal L_tilde");
  Micrograph mg = assemble(config, config.L_tilde, [&](const basis::Rotation& r) {
    return project_volume(volume, r.matrix());
  });
  if (config.downsample_to && *config.downsample_to != config.L_tilde) mg = downsample(mg, *config.downsample_to);
  return mg;
}

}  // namespace pickless::simulate
