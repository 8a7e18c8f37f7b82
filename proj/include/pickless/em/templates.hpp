#pragma once

#include <vector>

#include "pickless/basis/pswf.hpp"
#include "pickless/basis/wigner.hpp"
#include "pickless/forward/beta.hpp"
#include "pickless/forward/coefficients.hpp"

namespace pickless::em {

/// Tables for one frequency-marching stage. The PSWF basis and rotation grid
/// are built once at the final ell_max and shared across stages.
struct StageModel {
  const basis::PswfBasis* basis = nullptr;
  const basis::RotationGrid* grid = nullptr;
  forward::CoeffLayout layout;
  forward::BetaTable beta;
  /// Per rotation, the P x M map to PSWF coefficients.
  std::vector<ComplexMatrix> G;
  /// M x M real parameterization of the conjugate-symmetric subspace.
  ComplexMatrix P;
  /// Per rotation, the real L^2 x M map theta -> template image, Re(Psi G P).
  std::vector<RealMatrix> H;
  /// 2L x L indicator: window(ell)[q] = 1 when projection row q is visible under shift ell.
  RealMatrix Mw;

  int L() const { return basis->L(); }
  int K() const { return grid->size(); }
  int M() const { return layout.size(); }
  int shifts() const { return 4 * L() * L(); }
};

/// Sub-table of a beta table for degrees <= ell_max.
forward::BetaTable restrict_beta(const forward::BetaTable& full, int ell_max);

StageModel make_stage_model(const basis::PswfBasis& basis, const forward::BetaTable& full_beta,
                            const basis::RotationGrid& grid, int ell_max);

/// Noise-free projections of the current estimate for every rotation.
struct TemplateBank {
  RealMatrix images;  // L^2 x K
  RealMatrix energy;  // 4L^2 x K: sum of squares inside each shift's window
};

TemplateBank make_templates(const StageModel& model, const forward::VolumeCoefficients& x);

/// Complex L^2 x M template matrix Psi G(omega) for rotation k.
ComplexMatrix template_matrix(const StageModel& model, int k);

/// 4L^2 x L^2 embedding of a patch: row = shift index, column = projection
/// pixel; entry is the patch pixel showing that projection pixel (0 if none).
RealMatrix patch_embedding(const double* patch, int L);

}  // namespace pickless::em
