#pragma once

#include <optional>

#include "pickless/basis/pswf.hpp"
#include "pickless/basis/wigner.hpp"
#include "pickless/forward/beta.hpp"
#include "pickless/forward/coefficients.hpp"

namespace pickless::forward {

struct Projection {
  RealImage image;
  std::optional<basis::Rotation> omega;
};

/// P x M map G(omega) from volume coefficients to PSWF coefficients:
///   G[(N,n), (ell,m,s)] = beta_hat_{ell,s;N,n} D^ell_{N,m}(omega).
ComplexMatrix coefficient_map(const basis::PswfBasis& basis, const BetaTable& beta, const basis::WignerSet& D);

/// L^2 x M complex template matrix Psi G(omega); image = T x.
ComplexMatrix template_matrix(const basis::PswfBasis& basis, const BetaTable& beta, const basis::WignerSet& D);

/// Complex projection image before the real-part check.
ComplexImage project_complex(const VolumeCoefficients& x, const basis::WignerSet& D, const basis::PswfBasis& basis,
                             const BetaTable& beta);

/// Projection image. Throws NumericalError if the imaginary residue exceeds
/// 1e-10 relative (broken conjugate symmetry).
Projection project(const VolumeCoefficients& x, const basis::Rotation& omega, const basis::PswfBasis& basis,
                   const BetaTable& beta);
RealImage project(const VolumeCoefficients& x, const basis::WignerSet& D, const basis::PswfBasis& basis,
                  const BetaTable& beta);

/// Converts a complex image to real, enforcing the residue bound.
RealImage real_part_checked(const ComplexImage& img, double tol = 1e-10);

}  // namespace pickless::forward
