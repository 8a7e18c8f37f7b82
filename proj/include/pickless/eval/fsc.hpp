#pragma once

#include <string>
#include <vector>

#include "pickless/common/types.hpp"

namespace pickless::eval {

/// Correlation of two volumes over integer-radius shells of the 3-D DFT, up to
/// the Nyquist shell floor(n/2).
struct FscCurve {
  int n = 0;                        // grid side
  std::vector<int> shell;           // shell radius in DFT index units
  std::vector<double> correlation;  // in [-1, 1]
  std::vector<int> count;           // frequencies per shell
  int resolution_shell = 0;         // first shell below 0.5, else floor(n/2)

  /// Spatial frequency of entry i in cycles per voxel.
  double frequency(size_t i) const { return static_cast<double>(shell[i]) / n; }
  int nyquist_shell() const { return n / 2; }
  /// Smallest correlation over shells with radius <= r.
  double min_up_to(double r) const;
};

FscCurve fsc(const Volume& a, const Volume& b);

/// "shell,frequency,correlation" rows with a header line.
std::string fsc_csv(const FscCurve& curve);

/// Centered 3-D DFT helper: F(q) = sum_p v(p) e^{-2 pi i q . c(p) / n}, c the
/// centered coordinate; output indexed by wrapped q.
std::vector<cdouble> dft3(const Volume& v);

}  // namespace pickless::eval
