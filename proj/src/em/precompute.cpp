#include "pickless/em/precompute.hpp"

#include <string>

#include "pickless/common/errors.hpp"
#include "pickless/forward/patch.hpp"

namespace pickless::em {

namespace {

std::size_t tri(int M) { return static_cast<std::size_t>(M) * (M + 1) / 2; }

// Packed index of (a, b), a <= b, row-major upper triangle.
std::size_t packed(int a, int b, int M) {
  return static_cast<std::size_t>(a) * M - static_cast<std::size_t>(a) * (a - 1) / 2 + (b - a);
}

std::string mib(std::size_t bytes) { return std::to_string(bytes / (1024.0 * 1024.0)) + " MiB"; }

}  // namespace

std::size_t GTensor::memory_estimate(int L, int K, int M) {
  return static_cast<std::size_t>(4) * L * L * K * tri(M) * sizeof(cdouble);
}

std::size_t GTensor::offset(int shift, int k) const {
  return (static_cast<std::size_t>(shift) * K_ + k) * tri(M_);
}

cdouble GTensor::operator()(int shift, int k, int a, int b) const {
  if (a <= b) return data_[offset(shift, k) + packed(a, b, M_)];
  return std::conj(data_[offset(shift, k) + packed(b, a, M_)]);
}

ComplexMatrix GTensor::block(int shift, int k) const {
  ComplexMatrix out(M_, M_);
  const cdouble* d = data_.data() + offset(shift, k);
  for (int a = 0; a < M_; ++a) {
    for (int b = a; b < M_; ++b) {
      out(a, b) = d[packed(a, b, M_)];
      out(b, a) = std::conj(out(a, b));
    }
  }
  return out;
}

GTensor precompute_g(const StageModel& model, std::size_t budget_bytes) {
  const int L = model.L(), K = model.K(), M = model.M(), n2 = 2 * L;
  const std::size_t need = GTensor::memory_estimate(L, K, M);
  if (need > budget_bytes) {
    throw ValidationError("precompute_g: needs " + mib(need) + ", budget is " + mib(budget_bytes));
  }
  GTensor g;
  g.L_ = L;
  g.K_ = K;
  g.M_ = M;
  g.data_.assign(need / sizeof(cdouble), cdouble(0.0));
#pragma omp parallel for schedule(dynamic, 1)
  for (int k = 0; k < K; ++k) {
    const ComplexMatrix T = template_matrix(model, k);
    for (int lx = 0; lx < n2; ++lx) {
      const auto wx = forward::window(lx, L);
      for (int ly = 0; ly < n2; ++ly) {
        const auto wy = forward::window(ly, L);
        if (wx.begin == wx.end || wy.begin == wy.end) continue;
        ComplexMatrix rows((wx.end - wx.begin) * (wy.end - wy.begin), M);
        int r = 0;
        for (int qx = wx.begin; qx < wx.end; ++qx) {
          for (int qy = wy.begin; qy < wy.end; ++qy) rows.row(r++) = T.row(qx * L + qy);
        }
        ComplexMatrix blk = ComplexMatrix::Zero(M, M);
        blk.selfadjointView<Eigen::Upper>().rankUpdate(rows.adjoint());
        cdouble* d = g.data_.data() + g.offset(lx * n2 + ly, k);
        for (int a = 0; a < M; ++a) {
          for (int b = a; b < M; ++b) d[packed(a, b, M)] = blk(a, b);
        }
      }
    }
  }
  return g;
}

std::size_t QTensor::memory_estimate(int L, int K, int M, int patches) {
  return static_cast<std::size_t>(4) * L * L * K * M * patches * sizeof(cdouble);
}

QTensor precompute_q(const StageModel& model, const PatchSet& patches, const std::vector<int>& indices,
                     std::size_t budget_bytes) {
  require(patches.L == model.L(), "precompute_q: patch size does not match the model");
  const int L = model.L(), K = model.K(), M = model.M();
  const int n = static_cast<int>(indices.size());
  const std::size_t need = QTensor::memory_estimate(L, K, M, n);
  if (need > budget_bytes) {
    throw ValidationError("precompute_q: needs " + mib(need) + ", budget is " + mib(budget_bytes));
  }
  QTensor q;
  q.L = L;
  q.K = K;
  q.M = M;
  q.patches = indices;
  q.blocks.resize(static_cast<std::size_t>(n) * K);
  std::vector<ComplexMatrix> Tc(K);
  for (int k = 0; k < K; ++k) Tc[k] = template_matrix(model, k).conjugate();
#pragma omp parallel for schedule(dynamic, 1)
  for (int i = 0; i < n; ++i) {
    const RealMatrix E = patch_embedding(patches.pixels.col(indices[i]).data(), L);
    for (int k = 0; k < K; ++k) q.blocks[static_cast<std::size_t>(i) * K + k] = E.cast<cdouble>() * Tc[k];
  }
  return q;
}

ComplexSystem assemble_system(const std::vector<RealMatrix>& responsibilities, const QTensor& q, const GTensor& g) {
  const int n = static_cast<int>(q.patches.size());
  require(static_cast<int>(responsibilities.size()) == n, "assemble_system: responsibilities/q patch count mismatch");
  require(q.L == g.L() && q.K == g.K() && q.M == g.M(), "assemble_system: q and g dimensions differ");
  const int S = 4 * g.L() * g.L(), K = g.K(), M = g.M();
  RealMatrix Rsum = RealMatrix::Zero(S, K);
  ComplexSystem sys;
  sys.y = ComplexVector::Zero(M);
  for (int i = 0; i < n; ++i) {
    const RealMatrix& R = responsibilities[i];
    require(R.rows() == S && R.cols() == K, "assemble_system: responsibility table has the wrong shape");
    Rsum += R;
    for (int k = 0; k < K; ++k) sys.y += q.at(i, k).transpose() * R.col(k).cast<cdouble>();
  }
  sys.A = ComplexMatrix::Zero(M, M);
  for (int k = 0; k < K; ++k) {
    for (int s = 0; s < S; ++s) {
      if (Rsum(s, k) != 0.0) sys.A += Rsum(s, k) * g.block(s, k);
    }
  }
  return sys;
}

RealSystem to_real(const ComplexSystem& sys, const ComplexMatrix& P) {
  RealSystem out;
  out.A = (P.adjoint() * sys.A * P).real();
  out.A = 0.5 * (out.A + out.A.transpose()).eval();
  out.y = (P.adjoint() * sys.y).real();
  return out;
}

RealSystem assemble_streamed(const StageModel& model, const EStepAccumulator& acc) {
  const int L = model.L(), K = model.K(), M = model.M(), n2 = 2 * L;
  require(acc.B.rows() == L * L && acc.B.cols() == K, "assemble_streamed: accumulator shape mismatch");
  // Per-rotation parts are computed in parallel and summed in index order.
  std::vector<RealMatrix> Ak(K);
  std::vector<RealVector> yk(K);
#pragma omp parallel for schedule(static)
  for (int k = 0; k < K; ++k) {
    const RealMatrix Rk = Eigen::Map<const RealMatrix>(acc.Rsum.col(k).data(), n2, n2).transpose();  // [lx, ly]
    const RealMatrix Om = model.Mw.transpose() * Rk * model.Mw;                                        // [qx, qy]
    const RealMatrix& H = model.H[k];
    RealMatrix WH(L * L, M);
    for (int qx = 0; qx < L; ++qx) {
      for (int qy = 0; qy < L; ++qy) WH.row(qx * L + qy) = Om(qx, qy) * H.row(qx * L + qy);
    }
    Ak[k] = H.transpose() * WH;
    yk[k] = H.transpose() * acc.B.col(k);
  }
  RealSystem out;
  out.A = RealMatrix::Zero(M, M);
  out.y = RealVector::Zero(M);
  for (int k = 0; k < K; ++k) {
    out.A += Ak[k];
    out.y += yk[k];
  }
  out.A = 0.5 * (out.A + out.A.transpose()).eval();
  out.patch_energy = acc.patch_energy;
  out.rho_mass = acc.rho_mass();
  out.count = acc.count;
  out.loglik = acc.loglik;
  return out;
}

}  // namespace pickless::em
