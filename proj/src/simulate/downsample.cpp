#include "pickless/simulate/downsample.hpp"

#include <cmath>
#include <iostream>
#include <vector>

#include <fftw3.h>

#include "pickless/common/errors.hpp"

namespace pickless::simulate {

namespace {

// Input bins (with weights) feeding output bin k of an m-point crop from n points.
std::vector<std::pair<int, double>> sources(int kout, int m, int n) {
  const int f = kout <= (m - 1) / 2 ? kout : kout - m;  // signed frequency
  const auto wrap = [n](int q) { return q < 0 ? q + n : q; };
  if (m < n && m % 2 == 0 && f == -m / 2) return {{wrap(-m / 2), 0.5}, {wrap(m / 2), 0.5}};
  return {{wrap(f), 1.0}};
}

}  // namespace

RealImage fourier_crop(const RealImage& img, int m) {
  const int n = static_cast<int>(img.rows());
  require(img.cols() == n, "fourier_crop: image must be square");
  require(m >= 1 && m <= n, "fourier_crop: target size must lie in [1, n]");
  if (m == n) return img;
  std::vector<fftw_complex> in(static_cast<size_t>(n) * n), out(static_cast<size_t>(m) * m);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      in[static_cast<size_t>(i) * n + j][0] = img(i, j);
      in[static_cast<size_t>(i) * n + j][1] = 0.0;
    }
  }
  fftw_plan fwd = fftw_plan_dft_2d(n, n, in.data(), in.data(), FFTW_FORWARD, FFTW_ESTIMATE);
  fftw_execute(fwd);
  fftw_destroy_plan(fwd);
  const double scale = 1.0 / (static_cast<double>(n) * n);  // DC preserved: mean stays mean
  for (int a = 0; a < m; ++a) {
    const auto sa = sources(a, m, n);
    for (int b = 0; b < m; ++b) {
      const auto sb = sources(b, m, n);
      double re = 0.0, im = 0.0;
      for (auto [ia, wa] : sa) {
        for (auto [ib, wb] : sb) {
          re += wa * wb * in[static_cast<size_t>(ia) * n + ib][0];
          im += wa * wb * in[static_cast<size_t>(ia) * n + ib][1];
        }
      }
      out[static_cast<size_t>(a) * m + b][0] = re * scale;
      out[static_cast<size_t>(a) * m + b][1] = im * scale;
    }
  }
  fftw_plan inv = fftw_plan_dft_2d(m, m, out.data(), out.data(), FFTW_BACKWARD, FFTW_ESTIMATE);
  fftw_execute(inv);
  fftw_destroy_plan(inv);
  RealImage res(m, m);
  for (int a = 0; a < m; ++a) {
    for (int b = 0; b < m; ++b) res(a, b) = out[static_cast<size_t>(a) * m + b][0];
  }
  return res;
}

Micrograph downsample(const Micrograph& mg, int target_L) {
  require(target_L >= 1 && target_L <= mg.L_proj, "downsample: target_L must lie in [1, L_proj]");
  if (target_L == mg.L_proj) return mg;
  const double f = static_cast<double>(target_L) / mg.L_proj;
  const int n = mg.N();
  const int m = static_cast<int>(std::lround(n * f));
  if (std::abs(n * f - m) > 1e-9) {
    std::cerr << "warning: downsampled size " << n * f << " is not an integer; using " << m << "\n";
  }
  Micrograph out;
  out.pixels = fourier_crop(mg.pixels, m);
  out.L_proj = target_L;
  const double g = static_cast<double>(m) / n;
  out.sigma2 = mg.sigma2 * g * g;
  for (auto p : mg.placements) {
    const double cx = (p.x + 0.5 * (mg.L_proj - 1) + 0.5) * g - 0.5;
    const double cy = (p.y + 0.5 * (mg.L_proj - 1) + 0.5) * g - 0.5;
    p.x = std::clamp(static_cast<int>(std::lround(cx - 0.5 * (target_L - 1))), 0, m - target_L);
    p.y = std::clamp(static_cast<int>(std::lround(cy - 0.5 * (target_L - 1))), 0, m - target_L);
    p.energy *= g * g;
    out.placements.push_back(p);
  }
  return out;
}

}  // namespace pickless::simulate
