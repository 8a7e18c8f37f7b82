#pragma once

#include <vector>

#include "pickless/common/types.hpp"

namespace pickless::em {

struct PatchOrigin {
  int micrograph = 0;
  int x = 0;
  int y = 0;
};

enum class EdgePolicy { Crop, Pad };

/// Non-overlapping L x L patches; column p of `pixels` is patch p flattened
/// row-major (pixel (i, j) at i * L + j).
struct PatchSet {
  int L = 0;
  double sigma2 = 0.0;
  RealMatrix pixels;
  std::vector<PatchOrigin> origins;

  int size() const { return static_cast<int>(pixels.cols()); }
  RealImage patch(int p) const;
};

/// Partition micrographs into L x L tiles. Crop drops the trailing rows and
/// columns that do not fill a tile; Pad zero-fills them.
PatchSet partition(const std::vector<const RealImage*>& micrographs, int L, double sigma2,
                   EdgePolicy policy = EdgePolicy::Crop);

/// Build a patch set directly from images (tests and model-matched data).
PatchSet from_patches(const std::vector<RealImage>& patches, double sigma2);

}  // namespace pickless::em
