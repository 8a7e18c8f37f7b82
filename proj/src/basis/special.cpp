#include "pickless/basis/special.hpp"

#include <cmath>
#include <string>

#include "pickless/common/errors.hpp"

namespace pickless::basis {

double spherical_bessel(int ell, double x) {
  require(ell >= 0, "spherical_bessel: negative degree");
  if (x == 0.0) return ell == 0 ? 1.0 : 0.0;
  return std::sph_bessel(static_cast<unsigned>(ell), std::abs(x)) *
         ((x < 0 && (ell % 2)) ? -1.0 : 1.0);
}

namespace {

// Bisect a bracketed sign change of j_ell down to adjacent doubles.
double bisect_zero(int ell, double lo, double hi) {
  double flo = spherical_bessel(ell, lo);
  for (int it = 0; it < 200; ++it) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= lo || mid >= hi) break;
    const double fmid = spherical_bessel(ell, mid);
    if (fmid == 0.0) return mid;
    if ((fmid < 0) == (flo < 0)) {
      lo = mid;
      flo = fmid;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

// Consecutive zeros of j_ell are more than pi apart asymptotically and never
// closer than ~2.5 for ell <= 40, so a 0.1 scan cannot skip a pair.
constexpr double kScanStep = 0.1;

}  // namespace

std::vector<double> spherical_bessel_zeros_below(int ell, double limit) {
  require(ell >= 0, "spherical_bessel_zeros_below: negative degree");
  std::vector<double> zeros;
  // j_ell has no zero below ell (the first zero exceeds ell + 1/2).
  double x0 = std::max(0.5, static_cast<double>(ell));
  double f0 = spherical_bessel(ell, x0);
  while (x0 < limit) {
    const double x1 = x0 + kScanStep;
    const double f1 = spherical_bessel(ell, x1);
    if ((f0 < 0) != (f1 < 0)) {
      const double z = bisect_zero(ell, x0, x1);
      if (z <= limit) zeros.push_back(z);
    }
    x0 = x1;
    f0 = f1;
  }
  return zeros;
}

double spherical_bessel_zero(int ell, int s) {
  require(ell >= 0, "spherical_bessel_zero: negative degree " + std::to_string(ell));
  require(s >= 1, "spherical_bessel_zero: zero index must be >= 1");
  // McMahon: u_{l,s} ~ (s + l/2) pi; the scan limit overshoots it comfortably.
  double limit = (s + 0.5 * ell + 1.0) * kPi;
  for (;;) {
    auto zeros = spherical_bessel_zeros_below(ell, limit);
    if (static_cast<int>(zeros.size()) >= s) return zeros[s - 1];
    limit += 2.0 * kPi;
  }
}

double normalized_spherical_bessel_at(int ell, double zero, double k) {
  require(k >= 0.0 && k <= 1.0, "normalized_spherical_bessel: k outside [0, 1]");
  return 4.0 / std::abs(spherical_bessel(ell + 1, zero)) * spherical_bessel(ell, zero * k);
}

double normalized_spherical_bessel(int ell, int s, double k) {
  require(k >= 0.0 && k <= 1.0, "normalized_spherical_bessel: k outside [0, 1]");
  return normalized_spherical_bessel_at(ell, spherical_bessel_zero(ell, s), k);
}

std::vector<double> normalized_legendre(int ell_max, double x) {
  std::vector<double> p(static_cast<size_t>((ell_max + 1) * (ell_max + 2) / 2), 0.0);
  const double sx = std::sqrt(std::max(0.0, 1.0 - x * x));
  double pmm = 1.0 / std::sqrt(4.0 * kPi);
  for (int m = 0; m <= ell_max; ++m) {
    if (m > 0) pmm *= -std::sqrt((2.0 * m + 1.0) / (2.0 * m)) * sx;
    p[legendre_index(m, m)] = pmm;
    if (m == ell_max) break;
    double prev2 = pmm;
    double prev1 = std::sqrt(2.0 * m + 3.0) * x * pmm;
    p[legendre_index(m + 1, m)] = prev1;
    for (int l = m + 2; l <= ell_max; ++l) {
      const double a = std::sqrt((4.0 * l * l - 1.0) / (static_cast<double>(l) * l - m * m));
      const double b = std::sqrt(((l - 1.0) * (l - 1.0) - m * m) / (4.0 * (l - 1.0) * (l - 1.0) - 1.0));
      const double cur = a * (x * prev1 - b * prev2);
      p[legendre_index(l, m)] = cur;
      prev2 = prev1;
      prev1 = cur;
    }
  }
  return p;
}

cdouble spherical_harmonic(int ell, int m, double theta, double phi) {
  require(ell >= 0 && std::abs(m) <= ell,
          "spherical_harmonic: need |m| <= ell, got ell=" + std::to_string(ell) +
              " m=" + std::to_string(m));
  const auto p = normalized_legendre(ell, std::cos(theta));
  const int am = std::abs(m);
  const cdouble y = p[legendre_index(ell, am)] * std::polar(1.0, am * phi);
  if (m >= 0) return y;
  return ((am % 2) ? -1.0 : 1.0) * std::conj(y);
}

std::vector<cdouble> spherical_harmonics(int ell_max, double theta, double phi) {
  std::vector<cdouble> out(static_cast<size_t>((ell_max + 1) * (ell_max + 1)));
  const auto p = normalized_legendre(ell_max, std::cos(theta));
  for (int l = 0; l <= ell_max; ++l) {
    for (int m = 0; m <= l; ++m) {
      const cdouble y = p[legendre_index(l, m)] * std::polar(1.0, m * phi);
      out[sh_index(l, m)] = y;
      if (m > 0) out[sh_index(l, -m)] = ((m % 2) ? -1.0 : 1.0) * std::conj(y);
    }
  }
  return out;
}

Quadrature gauss_legendre(int n, double a, double b) {
  require(n >= 1, "gauss_legendre: need at least one node");
  Quadrature q;
  q.nodes.assign(n, 0.0);
  q.weights.assign(n, 2.0);
  // Legendre P_n and its derivative at x by the three-term recurrence.
  auto legendre = [n](double x, double& dp) {
    double p0 = 1.0, p1 = x;
    for (int k = 2; k <= n; ++k) {
      const double pk = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
      p0 = p1;
      p1 = pk;
    }
    dp = n * (x * p1 - p0) / (x * x - 1.0);
    return p1;
  };
  if (n > 1) {
    for (int i = 0; i < (n + 1) / 2; ++i) {
      double x = std::cos(kPi * (i + 0.75) / (n + 0.5));
      double dp = 1.0;
      for (int it = 0; it < 100; ++it) {
        const double dx = legendre(x, dp) / dp;
        x -= dx;
        if (std::abs(dx) < 1e-16) break;
      }
      legendre(x, dp);
      const double w = 2.0 / ((1.0 - x * x) * dp * dp);
      q.nodes[i] = -x;
      q.nodes[n - 1 - i] = x;
      q.weights[i] = w;
      q.weights[n - 1 - i] = w;
    }
  }
  const double half = 0.5 * (b - a), mid = 0.5 * (b + a);
  for (int i = 0; i < n; ++i) {
    q.nodes[i] = mid + half * q.nodes[i];
    q.weights[i] *= half;
  }
  return q;
}

std::vector<double> jacobi_a0(int jmax, double a, double x) {
  std::vector<double> p(static_cast<size_t>(jmax + 1));
  p[0] = 1.0;
  if (jmax == 0) return p;
  p[1] = (a + 1.0) + (a + 2.0) * (x - 1.0) / 2.0;
  for (int n = 2; n <= jmax; ++n) {
    const double s = 2.0 * n + a;
    const double c1 = 2.0 * n * (n + a) * (s - 2.0);
    const double c2 = (s - 1.0) * (s * (s - 2.0) * x + a * a);
    const double c3 = 2.0 * (n + a - 1.0) * (n - 1.0) * s;
    p[n] = (c2 * p[n - 1] - c3 * p[n - 2]) / c1;
  }
  return p;
}

}  // namespace pickless::basis
