#include "pickless/forward/coefficients.hpp"

#include <cmath>
#include <random>

#include "pickless/common/errors.hpp"

namespace pickless::forward {

namespace {
double parity(int k) { return (k % 2 == 0) ? 1.0 : -1.0; }
}  // namespace

CoeffLayout::CoeffLayout(int ell_max, std::vector<int> S_of_ell) : ell_max_(ell_max), S_(std::move(S_of_ell)) {
  require(ell_max >= 0 && static_cast<int>(S_.size()) == ell_max + 1, "CoeffLayout: S table size mismatch");
  offset_.resize(ell_max + 1);
  for (int l = 0; l <= ell_max; ++l) {
    require(S_[l] >= 1, "CoeffLayout: S(ell) must be >= 1");
    offset_[l] = size_;
    size_ += (2 * l + 1) * S_[l];
  }
}

double VolumeCoefficients::symmetry_defect() const {
  double worst = 0.0;
  for (int l = 0; l <= layout.ell_max(); ++l) {
    for (int m = 0; m <= l; ++m) {
      for (int s = 1; s <= layout.S(l); ++s) {
        const cdouble d = at(l, -m, s) - parity(l + m) * std::conj(at(l, m, s));
        worst = std::max(worst, std::abs(d));
      }
    }
  }
  return worst;
}

void VolumeCoefficients::enforce_symmetry() { x = from_real(layout, to_real(layout, x)); }

ComplexMatrix real_parameterization(const CoeffLayout& layout) {
  const int M = layout.size();
  ComplexMatrix P = ComplexMatrix::Zero(M, M);
  for (int l = 0; l <= layout.ell_max(); ++l) {
    for (int s = 1; s <= layout.S(l); ++s) {
      const int i0 = layout.index(l, 0, s);
      P(i0, i0) = (l % 2 == 0) ? cdouble(1.0, 0.0) : cdouble(0.0, 1.0);
      for (int m = 1; m <= l; ++m) {
        const int ip = layout.index(l, m, s), in = layout.index(l, -m, s);
        const double sg = parity(l + m);
        P(ip, ip) = 1.0;
        P(ip, in) = cdouble(0.0, 1.0);
        P(in, ip) = sg;
        P(in, in) = cdouble(0.0, -sg);
      }
    }
  }
  return P;
}

ComplexVector from_real(const CoeffLayout& layout, const RealVector& theta) {
  require(theta.size() == layout.size(), "from_real: size mismatch");
  ComplexVector x(layout.size());
  for (int l = 0; l <= layout.ell_max(); ++l) {
    for (int s = 1; s <= layout.S(l); ++s) {
      const int i0 = layout.index(l, 0, s);
      x[i0] = (l % 2 == 0) ? cdouble(theta[i0], 0.0) : cdouble(0.0, theta[i0]);
      for (int m = 1; m <= l; ++m) {
        const int ip = layout.index(l, m, s), in = layout.index(l, -m, s);
        x[ip] = cdouble(theta[ip], theta[in]);
        x[in] = parity(l + m) * cdouble(theta[ip], -theta[in]);
      }
    }
  }
  return x;
}

RealVector to_real(const CoeffLayout& layout, const ComplexVector& x) {
  require(x.size() == layout.size(), "to_real: size mismatch");
  RealVector t(layout.size());
  // Least-squares projection: each parameter averages the two slots that carry it.
  for (int l = 0; l <= layout.ell_max(); ++l) {
    for (int s = 1; s <= layout.S(l); ++s) {
      const int i0 = layout.index(l, 0, s);
      t[i0] = (l % 2 == 0) ? x[i0].real() : x[i0].imag();
      for (int m = 1; m <= l; ++m) {
        const int ip = layout.index(l, m, s), in = layout.index(l, -m, s);
        const cdouble mirrored = parity(l + m) * std::conj(x[in]);
        const cdouble avg = 0.5 * (x[ip] + mirrored);
        t[ip] = avg.real();
        t[in] = avg.imag();
      }
    }
  }
  return t;
}

VolumeCoefficients embed(const VolumeCoefficients& from, const CoeffLayout& to) {
  VolumeCoefficients out(to);
  const int lmax = std::min(from.layout.ell_max(), to.ell_max());
  for (int l = 0; l <= lmax; ++l) {
    const int smax = std::min(from.layout.S(l), to.S(l));
    for (int m = -l; m <= l; ++m) {
      for (int s = 1; s <= smax; ++s) out.at(l, m, s) = from.at(l, m, s);
    }
  }
  return out;
}

VolumeCoefficients random_coefficients(const CoeffLayout& layout, uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g(0.0, 1.0);
  RealVector theta(layout.size());
  for (int i = 0; i < theta.size(); ++i) theta[i] = g(rng);
  VolumeCoefficients v(layout);
  v.x = from_real(layout, theta);
  return v;
}

}  // namespace pickless::forward
