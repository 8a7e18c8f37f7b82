#include "pickless/eval/fsc.hpp"

#include <cmath>
#include <sstream>

#include <fftw3.h>

#include "pickless/common/errors.hpp"

namespace pickless::eval {

namespace {

int freq_of(int idx, int n) { return idx <= (n - 1) / 2 ? idx : idx - n; }

}  // namespace

std::vector<cdouble> dft3(const Volume& v) {
  const int n = v.n;
  std::vector<cdouble> buf(v.data.begin(), v.data.end());
  fftw_plan plan;
#pragma omp critical(pickless_fftw_plan)
  plan = fftw_plan_dft_3d(n, n, n, reinterpret_cast<fftw_complex*>(buf.data()),
                          reinterpret_cast<fftw_complex*>(buf.data()), FFTW_FORWARD, FFTW_ESTIMATE);
  fftw_execute(plan);
#pragma omp critical(pickless_fftw_plan)
  fftw_destroy_plan(plan);
  // Origin at the grid center.
  const double c = 0.5 * (n - 1);
  for (int a = 0; a < n; ++a) {
    for (int b = 0; b < n; ++b) {
      for (int d = 0; d < n; ++d) {
        const double q = freq_of(a, n) + freq_of(b, n) + freq_of(d, n);
        buf[(static_cast<size_t>(a) * n + b) * n + d] *= std::polar(1.0, 2.0 * kPi * q * c / n);
      }
    }
  }
  return buf;
}

FscCurve fsc(const Volume& a, const Volume& b) {
  require(a.n == b.n && a.n > 0, "fsc: volumes must share a nonzero grid size");
  const int n = a.n;
  const auto A = dft3(a), B = dft3(b);
  // Shells beyond the inscribed Nyquist sphere are partial and left out.
  const int rmax = n / 2;
  std::vector<double> num(rmax + 1, 0.0), da(rmax + 1, 0.0), db(rmax + 1, 0.0);
  std::vector<int> cnt(rmax + 1, 0);
  for (int i = 0; i < n; ++i) {
    for (int j = 0; j < n; ++j) {
      for (int k = 0; k < n; ++k) {
        const int qi = freq_of(i, n), qj = freq_of(j, n), qk = freq_of(k, n);
        const int r = static_cast<int>(std::lround(std::sqrt(double(qi * qi + qj * qj + qk * qk))));
        if (r > rmax) continue;
        const size_t idx = (static_cast<size_t>(i) * n + j) * n + k;
        num[r] += (A[idx] * std::conj(B[idx])).real();
        da[r] += std::norm(A[idx]);
        db[r] += std::norm(B[idx]);
        ++cnt[r];
      }
    }
  }
  FscCurve out;
  out.n = n;
  out.resolution_shell = n / 2;
  bool crossed = false;
  for (int r = 0; r <= rmax; ++r) {
    if (cnt[r] == 0) continue;
    const double den = std::sqrt(da[r] * db[r]);
    const double c = den > 0.0 ? std::clamp(num[r] / den, -1.0, 1.0) : 0.0;
    out.shell.push_back(r);
    out.correlation.push_back(c);
    out.count.push_back(cnt[r]);
    if (!crossed && c < 0.5) {
      out.resolution_shell = r;
      crossed = true;
    }
  }
  return out;
}

double FscCurve::min_up_to(double r) const {
  double m = 1.0;
  for (size_t i = 0; i < shell.size(); ++i) {
    if (shell[i] <= r) m = std::min(m, correlation[i]);
  }
  return m;
}

std::string fsc_csv(const FscCurve& curve) {
  std::ostringstream os;
  os.precision(10);
  os << "shell,frequency,correlation\n";
  for (size_t i = 0; i < curve.shell.size(); ++i) {
    os << curve.shell[i] << ',' << curve.frequency(i) << ',' << curve.correlation[i] << '\n';
  }
  return os.str();
}

}  // namespace pickless::eval
