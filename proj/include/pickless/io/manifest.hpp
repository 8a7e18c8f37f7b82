#pragma once

#include <string>
#include <vector>

#include "json.hpp"
#include "pickless/simulate/micrograph.hpp"

namespace pickless::io {

/// Describes one simulate run. Ground-truth shift of a patch with top-left
/// corner (u, v) showing a projection with box corner (x, y):
/// ((u - x) mod 2L, (v - y) mod 2L).
struct MicrographEntry {
  std::string file;  // relative to the manifest
  int N = 0;
  int L_proj = 0;
  double sigma2 = 0.0;
  std::vector<simulate::Placement> placements;
};

struct Manifest {
  std::string config_hash;
  nlohmann::json config;  // echo
  std::string truth_coefficients;  // relative path, empty for method one
  std::string truth_volume;        // relative path
  std::vector<MicrographEntry> micrographs;
};

void save_manifest(const std::string& path, const Manifest& m);
Manifest load_manifest(const std::string& path);

/// Micrograph metadata (no pixels) for ground-truth scoring.
std::vector<simulate::Micrograph> manifest_micrographs(const Manifest& m);

}  // namespace pickless::io
