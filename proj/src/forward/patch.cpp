#include "pickless/forward/patch.hpp"

#include <random>

#include "pickless/common/errors.hpp"

namespace pickless::forward {

Window window(int ell, int L) {
  if (ell < L) return {ell, L, 0};
  if (ell == L) return {0, 0, 0};
  return {0, ell - L, 2 * L - ell};
}

RealImage zero_pad(const RealImage& img) {
  const int L = static_cast<int>(img.rows());
  RealImage out = RealImage::Zero(2 * L, 2 * L);
  out.topLeftCorner(L, L) = img;
  return out;
}

RealImage circular_shift(const RealImage& padded, Shift s) {
  const int n = static_cast<int>(padded.rows());
  RealImage out(n, n);
  for (int u = 0; u < n; ++u) {
    for (int v = 0; v < n; ++v) out(u, v) = padded((u + s.x) % n, (v + s.y) % n);
  }
  return out;
}

RealImage crop(const RealImage& padded, int L) { return padded.topLeftCorner(L, L); }

RealImage shift_window(const RealImage& proj, Shift s) {
  const int L = static_cast<int>(proj.rows());
  require(proj.cols() == L, "shift_window: projection must be square");
  require(s.x >= 0 && s.x < 2 * L && s.y >= 0 && s.y < 2 * L, "shift outside {0..2L-1}^2");
  RealImage out = RealImage::Zero(L, L);
  const Window wx = window(s.x, L), wy = window(s.y, L);
  if (wx.size() > 0 && wy.size() > 0) {
    out.block(wx.patch_offset, wy.patch_offset, wx.size(), wy.size()) =
        proj.block(wx.begin, wy.begin, wx.size(), wy.size());
  }
  return out;
}

RealImage make_patch(const RealImage& proj, Shift s, double sigma2, uint64_t seed) {
  require(sigma2 >= 0.0, "make_patch: sigma2 must be >= 0");
  RealImage out = shift_window(proj, s);
  if (sigma2 > 0.0) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> g(0.0, std::sqrt(sigma2));
    for (int i = 0; i < out.size(); ++i) out.data()[i] += g(rng);
  }
  return out;
}

}  // namespace pickless::forward
