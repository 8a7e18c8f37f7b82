#pragma once

#include <random>
#include <utility>
#include <vector>

#include "pickless/simulate/micrograph.hpp"

namespace pickless::simulate {

/// T = round(gamma N^2 / L^2), the occupancy-fraction reading of the density.
int target_count(int N, double gamma, int L);

/// Separated: two boxes may not both be within 2L-1 of each other along x and
/// along y, so every L x L patch of a grid partition meets at most one box.
/// Arbitrary: boxes do not overlap.
bool compatible(int ax, int ay, int bx, int by, int L, PlacementMode mode);

struct PlacementResult {
  std::vector<std::pair<int, int>> corners;
  long attempts = 0;
  bool saturated = false;
};

/// Sequential uniform placement of up to T boxes with corners in [0, N-L]^2.
/// Each draw is uniform over the corners still compatible with all earlier
/// boxes (rejection sampling with rejected corners retired). Stops at T, at
/// saturation, or after max_attempts draws.
PlacementResult place_corners(int N, int L, int T, PlacementMode mode, std::mt19937_64& rng, long max_attempts);

/// O(T^2) verification of the mode's pairwise condition.
bool verify_placement(const std::vector<std::pair<int, int>>& corners, int L, PlacementMode mode);

/// Placement plus Haar-uniform rotations. Throws ValidationError naming the
/// achieved T when fewer than the target fit, unless config.allow_partial.
std::vector<Placement> place_projections(const SimConfig& config, int L);

}  // namespace pickless::simulate
