#include "pickless/basis/params.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "pickless/basis/special.hpp"
#include "pickless/common/errors.hpp"
#include "pickless/common/types.hpp"

namespace pickless::basis {

double BandlimitParams::disk_bandlimit() const { return kPi * c * L; }

double BandlimitParams::angular_bandlimit() const { return 2.0 * kPi * c; }

int BandlimitParams::coefficient_count() const {
  int m = 0;
  for (int l = 0; l <= ell_max; ++l) m += (2 * l + 1) * S_of_ell[l];
  return m;
}

int BandlimitParams::S_max() const { return *std::max_element(S_of_ell.begin(), S_of_ell.end()); }

void BandlimitParams::validate() const {
  require(c > 0.0 && c <= 1.0, "bandlimit c must lie in (0, 1], got " + std::to_string(c));
  require(L >= 3, "projection side L must be >= 3, got " + std::to_string(L));
  require(ell_max >= 0, "ell_max must be >= 0");
  require(static_cast<int>(S_of_ell.size()) == ell_max + 1, "S(ell) table size must be ell_max + 1");
  require(static_cast<int>(zeros.size()) == ell_max + 1, "zero table size must be ell_max + 1");
  for (int l = 0; l <= ell_max; ++l) {
    require(S_of_ell[l] >= 1, "S(ell) must be >= 1 for every ell");
    require(static_cast<int>(zeros[l].size()) == S_of_ell[l], "zero table inconsistent with S(ell)");
  }
  require(pswf_threshold > 0.0 && pswf_threshold < 1.0, "pswf_threshold must lie in (0, 1)");
}

BandlimitParams make_bandlimit_params(double c, int L, int ell_max, double pswf_threshold) {
  require(c > 0.0 && c <= 1.0, "bandlimit c must lie in (0, 1]");
  require(L >= 3, "projection side L must be >= 3");
  require(ell_max >= 0, "ell_max must be >= 0");
  const double limit = kPi * c * L;
  std::vector<int> S(ell_max + 1);
  for (int l = 0; l <= ell_max; ++l) {
    S[l] = std::max(1, static_cast<int>(spherical_bessel_zeros_below(l, limit).size()));
  }
  return make_bandlimit_params(c, L, ell_max, std::move(S), pswf_threshold);
}

BandlimitParams make_bandlimit_params(double c, int L, int ell_max, std::vector<int> S_of_ell,
                                      double pswf_threshold) {
  BandlimitParams p;
  p.c = c;
  p.L = L;
  p.ell_max = ell_max;
  p.S_of_ell = std::move(S_of_ell);
  p.pswf_threshold = pswf_threshold;
  require(static_cast<int>(p.S_of_ell.size()) == ell_max + 1, "S(ell) table size must be ell_max + 1");
  p.zeros.resize(ell_max + 1);
  for (int l = 0; l <= ell_max; ++l) {
    require(p.S_of_ell[l] >= 1, "S(ell) must be >= 1 for every ell");
    for (int s = 1; s <= p.S_of_ell[l]; ++s) p.zeros[l].push_back(spherical_bessel_zero(l, s));
  }
  p.validate();
  return p;
}

}  // namespace pickless::basis
