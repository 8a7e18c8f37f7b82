#pragma once

#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "pickless/basis/params.hpp"
#include "pickless/em/driver.hpp"
#include "pickless/em/patchset.hpp"
#include "pickless/eval/align.hpp"
#include "pickless/eval/pick.hpp"
#include "pickless/simulate/micrograph.hpp"

namespace pickless::io {

struct BasisConfig {
  double c = 0.5;
  int L = 9;
  int ell_max = 4;
  double pswf_threshold = 1e-6;
  std::optional<std::vector<int>> S;  // overrides the Nyquist-counting rule

  basis::BandlimitParams params() const;
};

struct SimulateConfig {
  simulate::SimConfig sim;
  int micrographs = 1;
  /// "blobs", "shepp-logan", or a path to an MRC volume.
  std::string phantom = "blobs";
  uint64_t phantom_seed = 1;
};

struct EmSection {
  em::EmConfig em;
  int K = 200;
  uint64_t grid_seed = 7;
  em::EdgePolicy edge = em::EdgePolicy::Crop;
};

struct PickSection {
  eval::PickOptions options;
  double min_f1 = 0.0;
  double min_accuracy = 0.0;
};

struct EvaluateSection {
  bool align = true;
  eval::AlignOptions align_options;
  double fsc_threshold = 0.5;
  double nyquist_fraction = 0.6;
};

struct ExperimentConfig {
  BasisConfig basis;
  SimulateConfig simulate;
  EmSection em;
  PickSection pick;
  EvaluateSection evaluate;
  std::string output = "pickless-out";
  std::string cache_dir;  // empty: environment or default
  int threads = 0;

  void validate() const;
  /// FNV-1a over the canonical JSON of the basis, simulate and em sections.
  uint64_t hash() const;
  std::string hash_hex() const;
};

nlohmann::json to_json(const ExperimentConfig& c);
/// Keys missing from `j` keep their defaults; unknown keys and wrong types
/// raise ValidationError naming the offending key.
ExperimentConfig from_json(const nlohmann::json& j);

ExperimentConfig load_config(const std::string& path);
void save_config(const std::string& path, const ExperimentConfig& c);

/// Applies "dotted.key=value" overrides; value is parsed as JSON, falling back
/// to a plain string.
ExperimentConfig apply_overrides(const ExperimentConfig& c, const std::vector<std::string>& overrides);

}  // namespace pickless::io
