#pragma once

#include <string>

#include "pickless/basis/params.hpp"
#include "pickless/forward/coefficients.hpp"

namespace pickless::io {

struct CoefficientFile {
  forward::VolumeCoefficients x;
  double c = 0.5;
  int L = 0;
  std::string config_hash;
};

/// JSON with full-precision doubles; lossless.
void save_coefficients(const std::string& path, const CoefficientFile& f);
CoefficientFile load_coefficients(const std::string& path);

/// Checks that the file's bandlimit and size agree with `params` and that its
/// layout fits inside them.
void check_compatible(const CoefficientFile& f, const basis::BandlimitParams& params, const std::string& what);

}  // namespace pickless::io
