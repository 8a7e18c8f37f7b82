#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "pickless/basis/pswf.hpp"
#include "pickless/basis/wigner.hpp"
#include "pickless/em/mstep.hpp"
#include "pickless/em/patchset.hpp"
#include "pickless/forward/beta.hpp"
#include "pickless/forward/coefficients.hpp"

namespace pickless::em {

struct Stage {
  int ell_max = 0;
  int max_iters = 1;
};

enum class StopMode {
  None,        // run every stage to its iteration cap
  Literal,     // per-patch Q_k - Q_{k-1} <= epsilon on the current minibatch
  Validation,  // per-patch log-likelihood on a fixed validation subset
};

StopMode stop_mode_from_string(const std::string& s);
std::string to_string(StopMode m);

struct EmConfig {
  std::vector<Stage> stages{{2, 10}, {4, 10}};
  double batch_fraction = 1.0;  // S
  double epsilon = 1e-4;
  StopMode stop = StopMode::Validation;
  double validation_fraction = 0.05;
  uint64_t seed = 1;
  int threads = 0;  // 0 keeps the OpenMP default
  double ridge = kDefaultRidge;

  void validate() const;
};

/// Patches drawn per iteration, floor(S * n), at least one.
int minibatch_size(double batch_fraction, int n_patches);

struct IterationRecord {
  int k = 0;
  int stage = 0;
  int ell_max = 0;
  int batch = 0;
  double loglik = 0.0;     // per-patch marginal log-likelihood at (x_k, rho_k) on the batch
  double q_old = 0.0;      // per-patch Q(x_k, rho_k | x_k, rho_k)
  double q_new = 0.0;      // per-patch Q(x_{k+1}, rho_{k+1} | x_k, rho_k)
  double validation = 0.0;  // per-patch log-likelihood on the validation subset at x_k
  bool ridge = false;
  double seconds = 0.0;
};

struct EmState {
  forward::VolumeCoefficients x;
  RealVector rho;
  int k = 0;           // completed iterations
  int stage = 0;       // current stage index
  int stage_iter = 0;  // completed iterations in the current stage
  bool finished = false;
  std::vector<IterationRecord> history;
  std::mt19937_64 rng;
  std::vector<int> validation_idx;
  uint64_t config_hash = 0;
};

/// Data-independent tables shared by every stage.
struct EmContext {
  const basis::PswfBasis* basis = nullptr;
  const forward::BetaTable* beta = nullptr;  // at the final ell_max
  const basis::RotationGrid* grid = nullptr;
};

/// x_0 from a Gaussian L^3 volume fitted by least squares, rho_0 uniform.
EmState initial_state(const EmContext& ctx, const PatchSet& patches, const EmConfig& cfg);

/// Called after each iteration with the updated state; returning false stops the run.
using IterationCallback = std::function<bool(const EmState&, const IterationRecord&)>;

/// Runs (or resumes) Algorithm-style stochastic EM with frequency marching.
EmState run(const EmContext& ctx, const PatchSet& patches, const EmConfig& cfg, EmState state,
            const IterationCallback& callback = {});

EmState run(const EmContext& ctx, const PatchSet& patches, const EmConfig& cfg,
            const IterationCallback& callback = {});

}  // namespace pickless::em
