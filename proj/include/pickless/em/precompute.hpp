#pragma once

#include <cstddef>
#include <vector>

#include "pickless/em/estep.hpp"
#include "pickless/em/patchset.hpp"
#include "pickless/em/templates.hpp"

namespace pickless::em {

inline constexpr std::size_t kDefaultTensorBudget = std::size_t{1} << 30;

/// g(shift, omega; a, b) = sum over the shift's visible projection pixels of
/// conj(T_omega[q, a]) T_omega[q, b], T_omega = Psi G(omega). Only a <= b is stored.
class GTensor {
 public:
  GTensor() = default;
  int L() const { return L_; }
  int K() const { return K_; }
  int M() const { return M_; }
  cdouble operator()(int shift, int k, int a, int b) const;
  /// Full Hermitian M x M block.
  ComplexMatrix block(int shift, int k) const;

  static std::size_t memory_estimate(int L, int K, int M);

 private:
  friend GTensor precompute_g(const StageModel&, std::size_t);
  int L_ = 0, K_ = 0, M_ = 0;
  std::vector<cdouble> data_;  // [(shift * K + k) * tri + packed(a, b)]
  std::size_t offset(int shift, int k) const;
};

/// Refuses with a ValidationError carrying the estimate when it exceeds the budget.
GTensor precompute_g(const StageModel& model, std::size_t budget_bytes = kDefaultTensorBudget);

/// q(p, shift, omega; a) = sum_q conj(T_omega[q, a]) * (patch pixel showing q).
struct QTensor {
  int L = 0, K = 0, M = 0;
  std::vector<int> patches;                // patch indices, in order
  std::vector<ComplexMatrix> blocks;       // [i * K + k]: 4L^2 x M

  const ComplexMatrix& at(int i, int k) const { return blocks[static_cast<std::size_t>(i) * K + k]; }
  static std::size_t memory_estimate(int L, int K, int M, int patches);
};

QTensor precompute_q(const StageModel& model, const PatchSet& patches, const std::vector<int>& indices,
                     std::size_t budget_bytes = kDefaultTensorBudget);

/// Hermitian system A x = y over the complex coefficient vector.
struct ComplexSystem {
  ComplexMatrix A;
  ComplexVector y;
};

/// A = sum_{p, shift, omega} R_p(shift, omega) g(shift, omega),
/// y = sum R_p(shift, omega) q(p, shift, omega). The responsibilities already
/// carry the prior rho, so it is not a separate argument.
ComplexSystem assemble_system(const std::vector<RealMatrix>& responsibilities, const QTensor& q, const GTensor& g);

/// Same system in the real parameterization x = P theta, plus the scalars
/// needed for the surrogate objective.
struct RealSystem {
  RealMatrix A;
  RealVector y;
  double patch_energy = 0.0;
  RealVector rho_mass;  // sum of responsibilities per shift
  int count = 0;
  double loglik = 0.0;  // marginal log-likelihood at the E-step point
};

RealSystem to_real(const ComplexSystem& sys, const ComplexMatrix& P);

/// Streamed assembly from E-step accumulators without forming q or g:
/// A = sum_omega H_omega^T diag(Omega_omega) H_omega, y = sum_omega H_omega^T B_omega.
RealSystem assemble_streamed(const StageModel& model, const EStepAccumulator& acc);

}  // namespace pickless::em
