#pragma once

#include <cstdint>

#include "pickless/common/types.hpp"

namespace pickless::forward {

/// Shift in the set {0..2L-1}^2.
struct Shift {
  int x = 0;
  int y = 0;
  bool operator==(const Shift&) const = default;
};

inline int shift_index(Shift s, int L) { return s.x * 2 * L + s.y; }
inline Shift shift_from_index(int idx, int L) { return {idx / (2 * L), idx % (2 * L)}; }

/// Range [begin, end) of projection rows seen by a patch under shift component ell,
/// and the patch row showing projection row `begin`.
struct Window {
  int begin = 0;
  int end = 0;
  int patch_offset = 0;
  int size() const { return end - begin; }
};
Window window(int ell, int L);

/// Zero-pad an L x L image to 2L x 2L (padding to the right and bottom).
RealImage zero_pad(const RealImage& img);
/// Circular shift of a 2L x 2L image: out[u, v] = in[(u + a) mod 2L, (v + b) mod 2L].
RealImage circular_shift(const RealImage& padded, Shift s);
/// Top-left L x L crop.
RealImage crop(const RealImage& padded, int L);

/// C T_shift Z proj, computed directly.
RealImage shift_window(const RealImage& proj, Shift s);

/// C T_shift Z proj + N(0, sigma2) noise drawn from `seed`.
RealImage make_patch(const RealImage& proj, Shift s, double sigma2, uint64_t seed);

}  // namespace pickless::forward
