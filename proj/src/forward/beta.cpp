#include "pickless/forward/beta.hpp"

#include <cmath>

#include "pickless/basis/special.hpp"
#include "pickless/common/errors.hpp"

namespace pickless::forward {

BetaTable compute_beta_table(const basis::PswfBasis& basis, const basis::BandlimitParams& params) {
  require(basis.params().L == params.L && basis.params().c == params.c &&
              basis.params().ell_max == params.ell_max && basis.params().S_of_ell == params.S_of_ell,
          "compute_beta_table: basis was built for different parameters");
  const CoeffLayout layout(params);
  const auto& nodes = basis.radial_nodes();
  const auto& weights = basis.radial_weights();
  const auto& R = basis.radial_samples();
  const int P = basis.size();
  const double c2 = params.c * params.c;
  const auto Y = basis::spherical_harmonics(params.ell_max, kPi / 2, 0.0);

  std::vector<ComplexMatrix> by_ell;
  for (int l = 0; l <= params.ell_max; ++l) {
    ComplexMatrix blk = ComplexMatrix::Zero(P, layout.S(l));
    for (int s = 1; s <= layout.S(l); ++s) {
      const double u = params.zeros[l][s - 1];
      RealVector jw(nodes.size());
      for (size_t a = 0; a < nodes.size(); ++a) {
        jw[a] = basis::normalized_spherical_bessel_at(l, u, nodes[a]) * nodes[a] * weights[a];
      }
      for (int e = 0; e < P; ++e) {
        const int N = basis.entries()[e].N;
        if (std::abs(N) > l || (l + N) % 2 != 0) continue;
        const double radial = jw.dot(R.col(e));
        if (!std::isfinite(radial)) throw NumericalError("compute_beta_table: non-finite radial integral");
        const cdouble beta = std::sqrt(2.0 * kPi) * Y[basis::sh_index(l, N)] * radial;
        blk(e, s - 1) = c2 * basis.alpha(e) * beta;
      }
    }
    by_ell.push_back(std::move(blk));
  }
  return BetaTable(layout, std::move(by_ell));
}

}  // namespace pickless::forward
