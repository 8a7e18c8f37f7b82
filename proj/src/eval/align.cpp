#include "pickless/eval/align.hpp"

#include <cmath>
#include <functional>
#include <limits>

#include <fftw3.h>

#include "pickless/basis/wigner.hpp"
#include "pickless/common/errors.hpp"
#include "pickless/eval/fsc.hpp"
#include "pickless/forward/volume.hpp"

namespace pickless::eval {

using basis::Rotation;
using forward::VolumeCoefficients;

std::vector<Rotation> quasi_uniform_rotations(int count) {
  require(count >= 1, "quasi_uniform_rotations: count must be >= 1");
  const double phi = std::sqrt(2.0), psi = 1.533751168755204288118041;
  std::vector<Rotation> out;
  out.reserve(count);
  for (int i = 0; i < count; ++i) {
    const double s = i + 0.5;
    const double r = std::sqrt(s / count), R = std::sqrt(1.0 - s / count);
    const double a = 2.0 * kPi * s / phi, b = 2.0 * kPi * s / psi;
    out.push_back(Rotation::from_quaternion(r * std::sin(a), r * std::cos(a), R * std::sin(b), R * std::cos(b)));
  }
  return out;
}

VolumeCoefficients rotate_coefficients(const VolumeCoefficients& x, const Rotation& R) {
  const auto& lay = x.layout;
  const basis::WignerSet D(lay.ell_max(), R);
  VolumeCoefficients out(lay);
  for (int l = 0; l <= lay.ell_max(); ++l) {
    for (int s = 1; s <= lay.S(l); ++s) {
      for (int mp = -l; mp <= l; ++mp) {
        cdouble acc = 0.0;
        for (int m = -l; m <= l; ++m) acc += D.at(l, mp, m) * x.at(l, m, s);
        out.at(l, mp, s) = acc;
      }
    }
  }
  out.enforce_symmetry();
  return out;
}

VolumeCoefficients reflect_coefficients(const VolumeCoefficients& x) {
  VolumeCoefficients out = x;
  for (int l = 1; l <= x.layout.ell_max(); l += 2) {
    for (int m = -l; m <= l; ++m) {
      for (int s = 1; s <= x.layout.S(l); ++s) out.at(l, m, s) = -out.at(l, m, s);
    }
  }
  return out;
}

namespace {

Rotation axis_rotation(int axis, double angle) {
  const double c = std::cos(0.5 * angle), s = std::sin(0.5 * angle);
  return Rotation::from_quaternion(c, axis == 0 ? s : 0.0, axis == 1 ? s : 0.0, axis == 2 ? s : 0.0);
}

struct Scorer {
  const forward::BallSampling& samp;
  ComplexVector truth;
  double truth_norm;

  double operator()(const ComplexVector& F, const Vec3& t) const {
    cdouble acc = 0.0;
    const int n = samp.n;
    for (int r = 0; r < F.size(); ++r) {
      const auto& q = samp.q[r];
      const double ph = -2.0 * kPi * (q[0] * t.x() + q[1] * t.y() + q[2] * t.z()) / n;
      acc += F[r] * std::conj(truth[r]) * std::polar(1.0, ph);
    }
    const double den = F.norm() * truth_norm;
    return den > 0.0 ? acc.real() / den : 0.0;
  }

  // Best integer translation through one FFT of the cross spectrum.
  double best_integer(const ComplexVector& F, Vec3& t) const {
    const int n = samp.n;
    std::vector<cdouble> buf(static_cast<size_t>(n) * n * n, 0.0);
    const auto wrap = [n](int q) { return q < 0 ? q + n : q; };
    for (int r = 0; r < F.size(); ++r) {
      const auto& q = samp.q[r];
      buf[(static_cast<size_t>(wrap(q[0])) * n + wrap(q[1])) * n + wrap(q[2])] = F[r] * std::conj(truth[r]);
    }
    fftw_plan plan;
#pragma omp critical(pickless_fftw_plan)
    plan = fftw_plan_dft_3d(n, n, n, reinterpret_cast<fftw_complex*>(buf.data()),
                            reinterpret_cast<fftw_complex*>(buf.data()), FFTW_FORWARD, FFTW_ESTIMATE);
    fftw_execute(plan);
#pragma omp critical(pickless_fftw_plan)
    fftw_destroy_plan(plan);
    size_t best = 0;
    for (size_t i = 1; i < buf.size(); ++i) {
      if (buf[i].real() > buf[best].real()) best = i;
    }
    const auto signed_of = [n](int i) { return i <= n / 2 ? i : i - n; };
    t = Vec3(signed_of(static_cast<int>(best / (n * n))), signed_of(static_cast<int>((best / n) % n)),
             signed_of(static_cast<int>(best % n)));
    const double den = F.norm() * truth_norm;
    return den > 0.0 ? buf[best].real() / den : 0.0;
  }
};

double golden_max(const std::function<double(double)>& f, double lo, double hi, int steps, double& arg) {
  const double g = 0.5 * (std::sqrt(5.0) - 1.0);
  double a = lo, b = hi;
  double c = b - g * (b - a), d = a + g * (b - a);
  double fc = f(c), fd = f(d);
  for (int i = 0; i < steps; ++i) {
    if (fc > fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - g * (b - a);
      fc = f(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + g * (b - a);
      fd = f(d);
    }
  }
  arg = fc > fd ? c : d;
  return std::max(fc, fd);
}

}  // namespace

Volume render_translated(const VolumeCoefficients& x, const basis::BandlimitParams& params, int n, const Vec3& t) {
  const auto samp = forward::ball_sampling(params, x.layout, n);
  const ComplexVector F = samp.basis * x.x;
  std::vector<cdouble> buf(static_cast<size_t>(n) * n * n, 0.0);
  const auto wrap = [n](int q) { return q < 0 ? q + n : q; };
  const double c = 0.5 * (n - 1);
  for (int r = 0; r < F.size(); ++r) {
    const auto& q = samp.q[r];
    // Translation phase and the shift from centered to 0-based voxel coordinates.
    const double ph = -2.0 * kPi * (q[0] * (t.x() + c) + q[1] * (t.y() + c) + q[2] * (t.z() + c)) / n;
    buf[(static_cast<size_t>(wrap(q[0])) * n + wrap(q[1])) * n + wrap(q[2])] = F[r] * std::polar(1.0, ph);
  }
  fftw_plan plan;
#pragma omp critical(pickless_fftw_plan)
  plan = fftw_plan_dft_3d(n, n, n, reinterpret_cast<fftw_complex*>(buf.data()),
                          reinterpret_cast<fftw_complex*>(buf.data()), FFTW_BACKWARD, FFTW_ESTIMATE);
  fftw_execute(plan);
#pragma omp critical(pickless_fftw_plan)
  fftw_destroy_plan(plan);
  Volume v(n);
  const double scale = 1.0 / (static_cast<double>(n) * n * n);
  for (size_t i = 0; i < buf.size(); ++i) v.data[i] = buf[i].real() * scale;
  return v;
}

namespace {

// Search against target spectrum T sampled at samp.q.
AlignResult align_to_spectrum(const VolumeCoefficients& est, const forward::BallSampling& samp, const ComplexVector& T,
                              const basis::BandlimitParams& params, const AlignOptions& opt) {
  require(opt.rotations >= 1 && opt.refine_steps >= 0 && opt.refine_sweeps >= 0, "align: invalid options");
  require(T.norm() > 0.0, "align: reference volume is zero");
  const Scorer score{samp, T, T.norm()};

  const auto grid = quasi_uniform_rotations(opt.rotations);
  const VolumeCoefficients variants[2] = {est, reflect_coefficients(est)};
  const int total = 2 * static_cast<int>(grid.size());
  std::vector<double> val(total);
  std::vector<Vec3> shift(total);
#pragma omp parallel for schedule(dynamic, 16)
  for (int i = 0; i < total; ++i) {
    const auto xr = rotate_coefficients(variants[i % 2], grid[i / 2]);
    val[i] = score.best_integer(samp.basis * xr.x, shift[i]);
  }
  int best = 0;
  for (int i = 1; i < total; ++i) {
    if (val[i] > val[best]) best = i;
  }

  AlignResult res;
  res.reflected = best % 2 == 1;
  const VolumeCoefficients& base = variants[best % 2];
  Rotation R = grid[best / 2];
  Vec3 t = shift[best];
  double cur = score(samp.basis * rotate_coefficients(base, R).x, t);
  // Coordinate-wise golden-section refinement: three small rotations about
  // the coordinate axes, then the three translation components. A span
  // shrinks only after a sweep that did not improve.
  double rot_span = std::cbrt(8.0 * kPi * kPi / opt.rotations), tr_span = 1.0;
  for (int sweep = 0; sweep < opt.refine_sweeps; ++sweep) {
    const double before = cur;
    for (int c = 0; c < 6; ++c) {
      std::function<double(double)> f;
      if (c < 3) {
        f = [&](double a) { return score(samp.basis * rotate_coefficients(base, axis_rotation(c, a) * R).x, t); };
      } else {
        const ComplexVector F = samp.basis * rotate_coefficients(base, R).x;
        f = [&, F](double a) {
          Vec3 tt = t;
          tt[c - 3] += a;
          return score(F, tt);
        };
      }
      const double span = c < 3 ? rot_span : tr_span;
      double arg = 0.0;
      const double v = golden_max(f, -span, span, opt.refine_steps, arg);
      if (v > cur) {
        cur = v;
        if (c < 3) R = axis_rotation(c, arg) * R;
        else t[c - 3] += arg;
      }
    }
    if (cur - before < 1e-4 * (1.0 - cur) + 1e-15) {
      rot_span *= 0.3;
      tr_span *= 0.3;
    }
    if (rot_span < 1e-9) break;
  }
  res.rotation = R;
  res.translation = t;
  res.correlation = cur;
  res.coefficients = rotate_coefficients(base, R);
  res.volume = render_translated(res.coefficients, params, samp.n, t);
  return res;
}

}  // namespace

AlignResult align_coefficients(const VolumeCoefficients& est, const VolumeCoefficients& truth,
                               const basis::BandlimitParams& params, int n, const AlignOptions& opt) {
  const auto samp = forward::ball_sampling(params, est.layout, n);
  const auto samp_truth = forward::ball_sampling(params, truth.layout, n);
  return align_to_spectrum(est, samp, samp_truth.basis * truth.x, params, opt);
}

AlignResult align(const Volume& est, const Volume& truth, const basis::BandlimitParams& params,
                  const AlignOptions& opt) {
  require(est.n == truth.n, "align: volumes must share a grid size");
  // Only the estimate is fitted (rotations need the expansion); the target
  // enters through its exact DFT samples.
  const int n = est.n;
  const auto x = forward::fit_coefficients(est, params);
  const auto samp = forward::ball_sampling(params, x.layout, n);
  const auto F = dft3(truth);
  const auto wrap = [n](int q) { return q < 0 ? q + n : q; };
  ComplexVector T(static_cast<Eigen::Index>(samp.q.size()));
  for (size_t r = 0; r < samp.q.size(); ++r) {
    const auto& q = samp.q[r];
    T[static_cast<Eigen::Index>(r)] = F[(static_cast<size_t>(wrap(q[0])) * n + wrap(q[1])) * n + wrap(q[2])];
  }
  return align_to_spectrum(x, samp, T, params, opt);
}

}  // namespace pickless::eval
