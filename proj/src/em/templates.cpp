#include "pickless/em/templates.hpp"

#include "pickless/common/errors.hpp"
#include "pickless/forward/patch.hpp"
#include "pickless/forward/projector.hpp"

namespace pickless::em {

forward::BetaTable restrict_beta(const forward::BetaTable& full, int ell_max) {
  require(ell_max <= full.layout().ell_max(), "restrict_beta: ell_max exceeds the table");
  std::vector<int> S(full.layout().S_of_ell().begin(), full.layout().S_of_ell().begin() + ell_max + 1);
  std::vector<ComplexMatrix> blocks;
  for (int l = 0; l <= ell_max; ++l) blocks.push_back(full.block(l));
  return forward::BetaTable(forward::CoeffLayout(ell_max, S), std::move(blocks));
}

StageModel make_stage_model(const basis::PswfBasis& basis, const forward::BetaTable& full_beta,
                            const basis::RotationGrid& grid, int ell_max) {
  require(grid.ell_max >= ell_max, "make_stage_model: rotation grid lacks Wigner degrees");
  StageModel m;
  m.basis = &basis;
  m.grid = &grid;
  m.beta = restrict_beta(full_beta, ell_max);
  m.layout = m.beta.layout();
  m.G.resize(grid.size());
#pragma omp parallel for schedule(static)
  for (int k = 0; k < grid.size(); ++k) m.G[k] = forward::coefficient_map(basis, m.beta, grid.wigner[k]);
  m.P = forward::real_parameterization(m.layout);
  m.H.resize(grid.size());
#pragma omp parallel for schedule(static)
  for (int k = 0; k < grid.size(); ++k) m.H[k] = (basis.psi() * (m.G[k] * m.P)).real();
  const int L = basis.L();
  m.Mw = RealMatrix::Zero(2 * L, L);
  for (int l = 0; l < 2 * L; ++l) {
    const auto w = forward::window(l, L);
    for (int q = w.begin; q < w.end; ++q) m.Mw(l, q) = 1.0;
  }
  return m;
}

ComplexMatrix template_matrix(const StageModel& model, int k) { return model.basis->psi() * model.G[k]; }

TemplateBank make_templates(const StageModel& model, const forward::VolumeCoefficients& x) {
  require(x.layout == model.layout, "make_templates: coefficient layout does not match the stage");
  const int L = model.L(), K = model.K();
  TemplateBank bank;
  bank.images.resize(L * L, K);
  bank.energy.resize(4 * L * L, K);
  const ComplexMatrix& psi = model.basis->psi();
  std::vector<std::string> errors(K);
#pragma omp parallel for schedule(static)
  for (int k = 0; k < K; ++k) {
    const ComplexVector a = model.G[k] * x.x;
    const ComplexVector img = psi * a;
    try {
      const RealImage re = forward::real_part_checked(Eigen::Map<const ComplexImage>(img.data(), L, L));
      RealMatrix sq(L, L);
      for (int i = 0; i < L; ++i) {
        for (int j = 0; j < L; ++j) {
          bank.images(i * L + j, k) = re(i, j);
          sq(i, j) = re(i, j) * re(i, j);
        }
      }
      const RealMatrix en = model.Mw * sq * model.Mw.transpose();  // (2L x 2L), [lx, ly]
      for (int lx = 0; lx < 2 * L; ++lx) {
        for (int ly = 0; ly < 2 * L; ++ly) bank.energy(lx * 2 * L + ly, k) = en(lx, ly);
      }
    } catch (const std::exception& e) {
      errors[k] = e.what();
    }
  }
  for (const auto& e : errors) {
    if (!e.empty()) throw NumericalError(e);
  }
  return bank;
}

RealMatrix patch_embedding(const double* patch, int L) {
  const int n2 = 2 * L;
  RealMatrix E = RealMatrix::Zero(n2 * n2, L * L);
  for (int lx = 0; lx < n2; ++lx) {
    const auto wx = forward::window(lx, L);
    for (int ly = 0; ly < n2; ++ly) {
      const auto wy = forward::window(ly, L);
      const int row = lx * n2 + ly;
      for (int qx = wx.begin; qx < wx.end; ++qx) {
        const int i = qx - wx.begin + wx.patch_offset;
        for (int qy = wy.begin; qy < wy.end; ++qy) {
          const int j = qy - wy.begin + wy.patch_offset;
          E(row, qx * L + qy) = patch[i * L + j];
        }
      }
    }
  }
  return E;
}

}  // namespace pickless::em
