#include "pickless/em/patchset.hpp"

#include <cmath>

#include "pickless/common/errors.hpp"

namespace pickless::em {

RealImage PatchSet::patch(int p) const {
  RealImage img(L, L);
  for (int q = 0; q < L * L; ++q) img.data()[q] = pixels(q, p);
  return img;
}

PatchSet partition(const std::vector<const RealImage*>& micrographs, int L, double sigma2, EdgePolicy policy) {
  require(L >= 3, "partition: L must be >= 3");
  require(sigma2 > 0.0, "partition: noise variance must be > 0");
  PatchSet ps;
  ps.L = L;
  ps.sigma2 = sigma2;
  std::vector<std::vector<double>> cols;
  for (size_t m = 0; m < micrographs.size(); ++m) {
    const RealImage& img = *micrographs[m];
    require(img.allFinite(), "partition: micrograph has non-finite pixels");
    const int nx = policy == EdgePolicy::Crop ? static_cast<int>(img.rows()) / L
                                              : static_cast<int>((img.rows() + L - 1) / L);
    const int ny = policy == EdgePolicy::Crop ? static_cast<int>(img.cols()) / L
                                              : static_cast<int>((img.cols() + L - 1) / L);
    for (int a = 0; a < nx; ++a) {
      for (int b = 0; b < ny; ++b) {
        std::vector<double> col(static_cast<size_t>(L) * L, 0.0);
        for (int i = 0; i < L; ++i) {
          for (int j = 0; j < L; ++j) {
            const int u = a * L + i, v = b * L + j;
            if (u < img.rows() && v < img.cols()) col[static_cast<size_t>(i) * L + j] = img(u, v);
          }
        }
        cols.push_back(std::move(col));
        ps.origins.push_back({static_cast<int>(m), a * L, b * L});
      }
    }
  }
  ps.pixels.resize(L * L, static_cast<int>(cols.size()));
  for (size_t p = 0; p < cols.size(); ++p) {
    for (int q = 0; q < L * L; ++q) ps.pixels(q, static_cast<int>(p)) = cols[p][q];
  }
  return ps;
}

PatchSet from_patches(const std::vector<RealImage>& patches, double sigma2) {
  require(!patches.empty(), "from_patches: no patches");
  require(sigma2 > 0.0, "from_patches: noise variance must be > 0");
  PatchSet ps;
  ps.L = static_cast<int>(patches[0].rows());
  ps.sigma2 = sigma2;
  ps.pixels.resize(ps.L * ps.L, static_cast<int>(patches.size()));
  for (size_t p = 0; p < patches.size(); ++p) {
    require(patches[p].rows() == ps.L && patches[p].cols() == ps.L, "from_patches: inconsistent patch sizes");
    for (int q = 0; q < ps.L * ps.L; ++q) ps.pixels(q, static_cast<int>(p)) = patches[p].data()[q];
    ps.origins.push_back({0, 0, 0});
  }
  return ps;
}

}  // namespace pickless::em
