#pragma once

#include <functional>
#include <vector>

#include "pickless/em/patchset.hpp"
#include "pickless/em/templates.hpp"

namespace pickless::em {

/// Gaussian exponent -||I_p - C T_l Z I_omega||^2 / (2 sigma^2) for every
/// (shift, rotation); 4L^2 x K. The normalizing constant is dropped.
RealMatrix log_likelihood_table(const double* patch, const TemplateBank& bank, double sigma2);

/// Posterior over (shift, rotation) with prior rho(l) / K, computed in the log
/// domain with max subtraction. Returns the marginal log-likelihood
/// log sum_{l, omega} rho(l)/K exp(loglik) through `marginal` when non-null.
RealMatrix posterior_from_loglik(const RealMatrix& loglik, const RealVector& rho, double* marginal = nullptr);

RealMatrix posterior(const double* patch, const TemplateBank& bank, const RealVector& rho, double sigma2,
                     double* marginal = nullptr);

/// Sufficient statistics of one E-step over a set of patches.
struct EStepAccumulator {
  RealMatrix B;           // L^2 x K: sum_p E_p^T R_p (back-projected patches)
  RealMatrix Rsum;        // 4L^2 x K: sum_p R_p
  double loglik = 0.0;    // sum_p marginal log-likelihood
  double patch_energy = 0.0;  // sum_p ||I_p||^2
  int count = 0;

  RealVector rho_mass() const { return Rsum.rowwise().sum(); }
};

inline constexpr int kPatchChunk = 32;
inline constexpr int kChunkGroup = 64;

/// Streamed E-step. Patches are processed in fixed chunks of kPatchChunk,
/// chunks run in parallel and are reduced in index order, so the result does
/// not depend on the thread count.
EStepAccumulator estep(const StageModel& model, const TemplateBank& bank, const PatchSet& patches,
                       const std::vector<int>& indices, const RealVector& rho);

/// Marginal log-likelihood sum over `indices` (no accumulators).
double total_log_likelihood(const StageModel& model, const TemplateBank& bank, const PatchSet& patches,
                            const std::vector<int>& indices, const RealVector& rho);

/// Calls f(position, patch index, posterior table, marginal) for every patch,
/// possibly from several threads at once.
void for_each_posterior(const TemplateBank& bank, const PatchSet& patches, const std::vector<int>& indices,
                        const RealVector& rho,
                        const std::function<void(int, int, const RealMatrix&, double)>& f);

RealVector uniform_rho(int L);

}  // namespace pickless::em
