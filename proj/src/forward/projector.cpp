#include "pickless/forward/projector.hpp"

#include <sstream>

#include "pickless/common/errors.hpp"

namespace pickless::forward {

ComplexMatrix coefficient_map(const basis::PswfBasis& basis, const BetaTable& beta, const basis::WignerSet& D) {
  const auto& lay = beta.layout();
  require(D.ell_max() >= lay.ell_max(), "coefficient_map: Wigner table has too few degrees");
  const int P = basis.size();
  ComplexMatrix G = ComplexMatrix::Zero(P, lay.size());
  for (int e = 0; e < P; ++e) {
    const int N = basis.entries()[e].N;
    for (int l = std::abs(N); l <= lay.ell_max(); ++l) {
      if ((l + N) % 2 != 0) continue;
      const auto& blk = beta.block(l);
      const auto& Dl = D[l];
      for (int m = -l; m <= l; ++m) {
        const cdouble d = Dl(N + l, m + l);
        const int base = lay.index(l, m, 1);
        for (int s = 0; s < lay.S(l); ++s) G(e, base + s) = blk(e, s) * d;
      }
    }
  }
  return G;
}

ComplexMatrix template_matrix(const basis::PswfBasis& basis, const BetaTable& beta, const basis::WignerSet& D) {
  return basis.psi() * coefficient_map(basis, beta, D);
}

RealImage real_part_checked(const ComplexImage& img, double tol) {
  const double re = img.real().norm();
  const double im = img.imag().norm();
  if (im > tol * std::max(re, 1e-300) && im > 1e-300) {
    std::ostringstream os;
    os << "projection has imaginary residue " << im / std::max(re, 1e-300)
       << " (relative); coefficients are not conjugate-symmetric";
    throw NumericalError(os.str());
  }
  return img.real();
}

ComplexImage project_complex(const VolumeCoefficients& x, const basis::WignerSet& D, const basis::PswfBasis& basis,
                             const BetaTable& beta) {
  require(x.layout == beta.layout(), "project: coefficient layout does not match the beta table");
  const int L = basis.L();
  const ComplexVector a = coefficient_map(basis, beta, D) * x.x;
  const ComplexVector flat = basis.psi() * a;
  return Eigen::Map<const ComplexImage>(flat.data(), L, L);
}

RealImage project(const VolumeCoefficients& x, const basis::WignerSet& D, const basis::PswfBasis& basis,
                  const BetaTable& beta) {
  return real_part_checked(project_complex(x, D, basis, beta));
}

Projection project(const VolumeCoefficients& x, const basis::Rotation& omega, const basis::PswfBasis& basis,
                   const BetaTable& beta) {
  const basis::WignerSet D(x.layout.ell_max(), omega);
  return {project(x, D, basis, beta), omega};
}

}  // namespace pickless::forward
