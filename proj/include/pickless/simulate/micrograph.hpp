#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "pickless/basis/rotation.hpp"
#include "pickless/common/types.hpp"

namespace pickless::simulate {

enum class PlacementMode { Separated, Arbitrary };
enum class Method { TrueVolume, ExpandedVolume };

std::string to_string(PlacementMode m);
std::string to_string(Method m);
PlacementMode placement_mode_from_string(const std::string& s);
Method method_from_string(const std::string& s);

/// One projection in a micrograph; (x, y) is the top-left pixel of its L x L box.
struct Placement {
  int x = 0;
  int y = 0;
  basis::Rotation rotation;
  /// ||I_t||_F^2 at generation time.
  double energy = 0.0;
};

struct Micrograph {
  RealImage pixels;
  double sigma2 = 0.0;
  std::vector<Placement> placements;
  int L_proj = 0;

  int N() const { return static_cast<int>(pixels.rows()); }
};

struct SimConfig {
  int N = 540;
  double gamma = 0.4;
  double snr = 10.0;
  PlacementMode mode = PlacementMode::Separated;
  Method method = Method::ExpandedVolume;
  uint64_t seed = 1;
  /// Projection side during generation (L-tilde).
  int L_tilde = 9;
  std::optional<int> downsample_to;
  /// Keep the achieved count instead of failing when the density is infeasible.
  bool allow_partial = false;

  void validate() const;
};

}  // namespace pickless::simulate
