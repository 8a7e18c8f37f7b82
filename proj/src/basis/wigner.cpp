#include "pickless/basis/wigner.hpp"

#include <cmath>
#include <map>
#include <mutex>

#include <Eigen/Eigenvalues>

#include "pickless/common/errors.hpp"

namespace pickless::basis {

namespace {

// Eigenvectors of J_y for degree ell; d(beta) = V exp(-i beta diag(m)) V^H.
struct JyEigen {
  ComplexMatrix vectors;
  RealVector values;
};

JyEigen compute_jy(int ell) {
  const int n = 2 * ell + 1;
  ComplexMatrix jy = ComplexMatrix::Zero(n, n);
  // <m+1| J+ |m> = sqrt(l(l+1) - m(m+1)); J_y = (J+ - J-) / 2i.
  for (int m = -ell; m < ell; ++m) {
    const double jp = std::sqrt(ell * (ell + 1.0) - m * (m + 1.0));
    jy(m + 1 + ell, m + ell) += jp / cdouble(0.0, 2.0);
    jy(m + ell, m + 1 + ell) -= jp / cdouble(0.0, 2.0);
  }
  Eigen::SelfAdjointEigenSolver<ComplexMatrix> es(jy);
  // Eigenvalues are the integers -ell..ell; snap away the rounding.
  RealVector vals = es.eigenvalues().array().round();
  return {es.eigenvectors(), vals};
}

const JyEigen& jy_eigen(int ell) {
  static std::mutex mu;
  static std::map<int, JyEigen> cache;
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find(ell);
  if (it == cache.end()) it = cache.emplace(ell, compute_jy(ell)).first;
  return it->second;
}

}  // namespace

RealMatrix wigner_small_d(int ell, double beta) {
  require(ell >= 0, "wigner_small_d: negative degree");
  const auto& e = jy_eigen(ell);
  ComplexVector phase(e.values.size());
  for (int i = 0; i < e.values.size(); ++i) phase[i] = std::polar(1.0, -beta * e.values[i]);
  ComplexMatrix d = e.vectors * phase.asDiagonal() * e.vectors.adjoint();
  return d.real();
}

ComplexMatrix wigner_d(int ell, const Rotation& omega) {
  const auto [alpha, beta, gamma] = omega.euler_zyz();
  const RealMatrix d = wigner_small_d(ell, beta);
  const int n = 2 * ell + 1;
  ComplexMatrix out(n, n);
  for (int mp = -ell; mp <= ell; ++mp) {
    for (int m = -ell; m <= ell; ++m) {
      out(mp + ell, m + ell) =
          std::polar(1.0, -mp * alpha) * d(mp + ell, m + ell) * std::polar(1.0, -m * gamma);
    }
  }
  return out;
}

WignerSet::WignerSet(int ell_max, const Rotation& omega) {
  blocks_.reserve(ell_max + 1);
  for (int l = 0; l <= ell_max; ++l) blocks_.push_back(wigner_d(l, omega));
}

RotationGrid make_rotation_grid(std::vector<Rotation> rotations, int ell_max) {
  require(!rotations.empty(), "rotation grid needs K >= 1");
  RotationGrid g;
  g.ell_max = ell_max;
  g.rotations = std::move(rotations);
  g.wigner.reserve(g.rotations.size());
  for (const auto& r : g.rotations) g.wigner.emplace_back(ell_max, r);
  return g;
}

RotationGrid build_rotation_grid(int K, uint64_t seed, int ell_max, bool include_identity) {
  require(K >= 1, "build_rotation_grid: K must be >= 1");
  std::mt19937_64 rng(seed);
  std::vector<Rotation> rots;
  rots.reserve(K);
  for (int k = 0; k < K; ++k) rots.push_back(Rotation::random(rng));
  if (include_identity) rots[0] = Rotation();
  return make_rotation_grid(std::move(rots), ell_max);
}

}  // namespace pickless::basis
