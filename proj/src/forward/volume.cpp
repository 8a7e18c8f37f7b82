#include "pickless/forward/volume.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <sstream>

#include "pickless/basis/special.hpp"
#include "pickless/common/errors.hpp"

namespace pickless::forward {

namespace {

int freq_of(int idx, int n) { return idx <= (n - 1) / 2 ? idx : idx - n; }

std::vector<cdouble> basis_row(const basis::BandlimitParams& p, const CoeffLayout& lay, const Vec3& w) {
  std::vector<cdouble> row(lay.size(), 0.0);
  const double W = p.angular_bandlimit();
  const double k = w.norm() / W;
  if (k > 1.0) return row;
  const double theta = k > 0 ? std::acos(std::clamp(w.z() / w.norm(), -1.0, 1.0)) : 0.0;
  const double phi = std::atan2(w.y(), w.x());
  const auto Y = basis::spherical_harmonics(lay.ell_max(), theta, phi);
  for (int l = 0; l <= lay.ell_max(); ++l) {
    for (int s = 1; s <= lay.S(l); ++s) {
      const double j = basis::normalized_spherical_bessel_at(l, p.zeros[l][s - 1], k);
      for (int m = -l; m <= l; ++m) row[lay.index(l, m, s)] = Y[basis::sh_index(l, m)] * j;
    }
  }
  return row;
}

}  // namespace

BallSampling ball_sampling(const basis::BandlimitParams& p, const CoeffLayout& lay, int n) {
  BallSampling g;
  g.n = n;
  const double W = p.angular_bandlimit();
  std::vector<std::vector<cdouble>> rows;
  for (int a = 0; a < n; ++a) {
    for (int b = 0; b < n; ++b) {
      for (int c = 0; c < n; ++c) {
        const std::array<int, 3> q{freq_of(a, n), freq_of(b, n), freq_of(c, n)};
        const Vec3 w = (2.0 * kPi / n) * Vec3(q[0], q[1], q[2]);
        if (w.norm() > W * (1.0 + 1e-12)) continue;
        g.q.push_back(q);
        rows.push_back(basis_row(p, lay, w));
      }
    }
  }
  g.basis.resize(static_cast<int>(rows.size()), lay.size());
  for (int r = 0; r < g.basis.rows(); ++r) {
    for (int c = 0; c < lay.size(); ++c) g.basis(r, c) = rows[r][c];
  }
  return g;
}

namespace {

// e^{sign i 2 pi q p / n} for centered coordinates p.
ComplexMatrix phase_matrix(int n, double sign) {
  ComplexMatrix E(n, n);  // E(pidx, qidx)
  for (int a = 0; a < n; ++a) {
    for (int b = 0; b < n; ++b) E(a, b) = std::polar(1.0, sign * 2.0 * kPi * freq_of(b, n) * centered(a, n) / n);
  }
  return E;
}

}  // namespace

cdouble evaluate_fourier(const VolumeCoefficients& x, const basis::BandlimitParams& p, const Vec3& w) {
  const auto row = basis_row(p, x.layout, w);
  cdouble s = 0.0;
  for (int i = 0; i < x.layout.size(); ++i) s += row[i] * x.x[i];
  return s;
}

Volume render_volume(const VolumeCoefficients& x, const basis::BandlimitParams& p, int n) {
  require(n >= 2, "render_volume: grid side must be >= 2");
  const auto g = ball_sampling(p, x.layout, n);
  const ComplexVector F = g.basis * x.x;
  // Dense spectrum on the DFT grid, then three separable inverse transforms.
  std::vector<cdouble> spec(static_cast<size_t>(n) * n * n, 0.0);
  auto idx = [n](int a, int b, int c) { return (static_cast<size_t>(a) * n + b) * n + c; };
  auto wrap = [n](int q) { return q < 0 ? q + n : q; };
  for (size_t r = 0; r < g.q.size(); ++r) spec[idx(wrap(g.q[r][0]), wrap(g.q[r][1]), wrap(g.q[r][2]))] = F[r];
  const ComplexMatrix E = phase_matrix(n, +1.0);
  std::vector<cdouble> tmp(spec.size());
  for (int axis = 0; axis < 3; ++axis) {
    std::fill(tmp.begin(), tmp.end(), 0.0);
    for (int a = 0; a < n; ++a) {
      for (int b = 0; b < n; ++b) {
        for (int c = 0; c < n; ++c) {
          const cdouble v = spec[idx(a, b, c)];
          if (v == 0.0) continue;
          for (int pp = 0; pp < n; ++pp) {
            if (axis == 0) tmp[idx(pp, b, c)] += E(pp, a) * v;
            if (axis == 1) tmp[idx(a, pp, c)] += E(pp, b) * v;
            if (axis == 2) tmp[idx(a, b, pp)] += E(pp, c) * v;
          }
        }
      }
    }
    spec.swap(tmp);
  }
  Volume vol(n);
  double re = 0.0, im = 0.0;
  const double scale = 1.0 / (static_cast<double>(n) * n * n);
  for (size_t i = 0; i < spec.size(); ++i) {
    vol.data[i] = spec[i].real() * scale;
    re += spec[i].real() * spec[i].real();
    im += spec[i].imag() * spec[i].imag();
  }
  if (std::sqrt(im) > 1e-6 * std::sqrt(re) && im > 0) {
    std::ostringstream os;
    os << "render_volume: imaginary residue " << std::sqrt(im / re) << " exceeds 1e-6 relative";
    throw NumericalError(os.str());
  }
  return vol;
}

VolumeCoefficients fit_coefficients(const Volume& vol, const basis::BandlimitParams& p) {
  const CoeffLayout lay(p);
  const int n = vol.n;
  const auto g = ball_sampling(p, lay, n);
  require(g.basis.rows() >= lay.size(), "fit_coefficients: fewer in-ball grid points than coefficients");
  const ComplexMatrix E = phase_matrix(n, -1.0);
  ComplexVector F(static_cast<int>(g.q.size()));
  auto wrap = [n](int q) { return q < 0 ? q + n : q; };
  for (size_t r = 0; r < g.q.size(); ++r) {
    const int qa = wrap(g.q[r][0]), qb = wrap(g.q[r][1]), qc = wrap(g.q[r][2]);
    cdouble s = 0.0;
    for (int a = 0; a < n; ++a) {
      for (int b = 0; b < n; ++b) {
        const cdouble eab = E(a, qa) * E(b, qb);
        cdouble t = 0.0;
        for (int c = 0; c < n; ++c) t += vol(a, b, c) * E(c, qc);
        s += eab * t;
      }
    }
    F[static_cast<int>(r)] = s;
  }
  const ComplexMatrix BP = g.basis * real_parameterization(lay);
  RealMatrix A(2 * BP.rows(), BP.cols());
  A << BP.real(), BP.imag();
  RealVector rhs(2 * F.size());
  rhs << F.real(), F.imag();
  const RealVector theta = A.colPivHouseholderQr().solve(rhs);
  VolumeCoefficients x(lay);
  x.x = from_real(lay, theta);
  return x;
}

}  // namespace pickless::forward
