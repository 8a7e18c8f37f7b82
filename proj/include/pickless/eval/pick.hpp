#pragma once

#include <vector>

#include "pickless/em/patchset.hpp"
#include "pickless/em/templates.hpp"
#include "pickless/forward/coefficients.hpp"
#include "pickless/forward/patch.hpp"
#include "pickless/simulate/micrograph.hpp"

namespace pickless::eval {

struct PickOptions {
  /// A patch is also called empty when its posterior-weighted template energy
  /// is below theta * L^2 * sigma2.
  double energy_threshold = 0.05;
  /// Allowed error per axis (circular in the shift set).
  int tolerance = 1;
};

struct PatchPick {
  forward::Shift shift;
  bool empty = false;
  double template_energy = 0.0;
  double shift_posterior = 0.0;  // p(shift | patch) at the argmax
};

/// Shifts whose crop window contains no pixel of the projection support.
std::vector<bool> zero_template_shifts(const basis::PswfBasis& basis);

/// Per-patch argmax of p(shift | patch) = sum_omega p(shift, omega | patch)
/// and the empty decision. `degenerate` is set when every template vanishes.
std::vector<PatchPick> pick(const em::StageModel& model, const forward::VolumeCoefficients& x,
                            const RealVector& rho, const em::PatchSet& patches, const PickOptions& opt = {},
                            bool* degenerate = nullptr);

struct PatchTruth {
  bool empty = true;
  bool half_occupied = false;
  forward::Shift shift;
};

/// Ground truth from the simulator manifest: the projection with the largest
/// support overlap defines the patch's shift, (origin - corner) mod 2L.
std::vector<PatchTruth> ground_truth(const em::PatchSet& patches, const std::vector<simulate::Micrograph>& mgs);
std::vector<PatchTruth> ground_truth(const em::PatchSet& patches,
                                     const std::vector<std::vector<simulate::Placement>>& placements);

struct PickReport {
  std::vector<PatchPick> picks;
  int true_positive = 0, false_positive = 0, false_negative = 0, true_negative = 0;
  double precision = 0.0, recall = 0.0, f1_empty = 0.0;
  int half_occupied = 0, localized = 0;
  double localization_accuracy = 0.0;
  /// F1 of the classifier calling every patch empty.
  double all_empty_f1 = 0.0;
  /// Expected accuracy of a uniformly random shift.
  double uniform_chance_accuracy = 0.0;
  /// Accuracy of the same picks paired with the truth at random: every
  /// half-occupied pick scored against every half-occupied truth shift.
  double chance_accuracy = 0.0;
  /// All templates vanish, so picks follow the prior alone.
  bool degenerate = false;
};

PickReport score(std::vector<PatchPick> picks, const std::vector<PatchTruth>& truth, int L,
                 const PickOptions& opt = {}, bool degenerate = false);

}  // namespace pickless::eval
