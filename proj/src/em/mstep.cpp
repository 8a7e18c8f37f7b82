#include "pickless/em/mstep.hpp"

#include <cmath>
#include <limits>
#include <sstream>

#include <Eigen/Cholesky>

#include "pickless/common/errors.hpp"

namespace pickless::em {

namespace {

double cholesky_condition(const Eigen::LLT<RealMatrix>& llt) {
  const RealVector d = llt.matrixLLT().diagonal();
  const double r = d.maxCoeff() / d.minCoeff();
  return r * r;
}

}  // namespace

RealVector solve_real(const RealSystem& sys, SolveInfo* info, double delta) {
  const int M = static_cast<int>(sys.A.rows());
  require(sys.A.cols() == M && sys.y.size() == M, "solve_m_step_x: system dimension mismatch");
  SolveInfo local;
  Eigen::LLT<RealMatrix> llt(sys.A);
  const auto ok = [&](const Eigen::LLT<RealMatrix>& f) {
    return f.info() == Eigen::Success && f.matrixLLT().diagonal().minCoeff() > 0.0;
  };
  if (!ok(llt)) {
    const double tr = sys.A.trace();
    RealMatrix Ar = sys.A;
    Ar.diagonal().array() += delta * (tr > 0.0 ? tr / M : 1.0);
    llt.compute(Ar);
    local.ridge = true;
    if (!ok(llt)) {
      Eigen::SelfAdjointEigenSolver<RealMatrix> es(sys.A, Eigen::EigenvaluesOnly);
      const auto ev = es.eigenvalues();
      const double cond = ev.minCoeff() > 0.0 ? ev.maxCoeff() / ev.minCoeff() : std::numeric_limits<double>::infinity();
      std::ostringstream os;
      os << "M-step system is singular beyond the ridge (condition estimate " << cond << ")";
      throw NumericalError(os.str());
    }
  }
  local.condition = cholesky_condition(llt);
  RealVector theta = llt.solve(sys.y);
  if (!theta.allFinite()) throw NumericalError("M-step solve produced non-finite coefficients");
  if (info) *info = local;
  return theta;
}

forward::VolumeCoefficients solve_m_step_x(const forward::CoeffLayout& layout, const RealSystem& sys, SolveInfo* info,
                                          double delta) {
  require(sys.y.size() == layout.size(), "solve_m_step_x: layout does not match the system");
  forward::VolumeCoefficients x(layout);
  x.x = forward::from_real(layout, solve_real(sys, info, delta));
  return x;
}

forward::VolumeCoefficients solve_m_step_x(const forward::CoeffLayout& layout, const ComplexSystem& sys,
                                          SolveInfo* info, double delta) {
  return solve_m_step_x(layout, to_real(sys, forward::real_parameterization(layout)), info, delta);
}

RealVector update_rho(const RealVector& rho_mass) {
  const double total = rho_mass.sum();
  if (!(total > 0.0)) throw NumericalError("update_rho: total responsibility mass is zero");
  return rho_mass / total;
}

RealVector update_rho(const std::vector<RealMatrix>& responsibilities) {
  require(!responsibilities.empty(), "update_rho: no responsibilities");
  RealVector mass = RealVector::Zero(responsibilities.front().rows());
  for (const auto& R : responsibilities) mass += R.rowwise().sum();
  return update_rho(mass);
}

double surrogate_q(const RealSystem& sys, const RealVector& theta, const RealVector& rho, double sigma2, int K) {
  require(sigma2 > 0.0, "surrogate_q: sigma2 must be > 0");
  const double quad = sys.patch_energy - 2.0 * theta.dot(sys.y) + theta.dot(sys.A * theta);
  double prior = 0.0;
  for (int i = 0; i < rho.size(); ++i) {
    if (sys.rho_mass[i] > 0.0) prior += sys.rho_mass[i] * std::log(rho[i]);
  }
  return -quad / (2.0 * sigma2) + prior - sys.count * std::log(static_cast<double>(K));
}

}  // namespace pickless::em
