#pragma once

#include <vector>

#include "pickless/em/precompute.hpp"
#include "pickless/forward/coefficients.hpp"

namespace pickless::em {

struct SolveInfo {
  bool ridge = false;
  double condition = 0.0;  // estimate from the Cholesky diagonal
};

inline constexpr double kDefaultRidge = 1e-10;

/// Solves A theta = y by Cholesky. A ridge delta * tr(A) / M * I is added only
/// when the plain factorization fails; NumericalError if that also fails.
RealVector solve_real(const RealSystem& sys, SolveInfo* info = nullptr, double delta = kDefaultRidge);

/// x_{k+1} in the conjugate-symmetric parameterization.
forward::VolumeCoefficients solve_m_step_x(const forward::CoeffLayout& layout, const RealSystem& sys,
                                          SolveInfo* info = nullptr, double delta = kDefaultRidge);
forward::VolumeCoefficients solve_m_step_x(const forward::CoeffLayout& layout, const ComplexSystem& sys,
                                          SolveInfo* info = nullptr, double delta = kDefaultRidge);

/// rho_{k+1}(l) = sum_p sum_omega R_p(l, omega) / n.
RealVector update_rho(const std::vector<RealMatrix>& responsibilities);
RealVector update_rho(const RealVector& rho_mass);

/// Surrogate objective Q(theta, rho | x_k, rho_k) summed over the batch, up to
/// the Gaussian normalizing constant.
double surrogate_q(const RealSystem& sys, const RealVector& theta, const RealVector& rho, double sigma2, int K);

}  // namespace pickless::em
