#include "pickless/em/estep.hpp"

#include <cmath>
#include <limits>

#include "pickless/common/errors.hpp"

namespace pickless::em {

namespace {

RealVector log_prior(const RealVector& rho, int K) {
  RealVector lp(rho.size());
  const double lk = std::log(static_cast<double>(K));
  for (int i = 0; i < rho.size(); ++i) {
    lp[i] = rho[i] > 0.0 ? std::log(rho[i]) - lk : -std::numeric_limits<double>::infinity();
  }
  return lp;
}

// Posterior of one patch into R (block of a stacked matrix); returns the marginal.
template <class Block>
double posterior_into(const Block& corr, const RealMatrix& energy, double pnorm, const RealVector& lp, double sigma2,
                      Block&& R) {
  const int S = static_cast<int>(corr.rows()), K = static_cast<int>(corr.cols());
  const double inv = 1.0 / (2.0 * sigma2);
  double mx = -std::numeric_limits<double>::infinity();
  for (int k = 0; k < K; ++k) {
    for (int s = 0; s < S; ++s) {
      const double v = (2.0 * corr(s, k) - energy(s, k) - pnorm) * inv + lp[s];
      R(s, k) = v;
      mx = std::max(mx, v);
    }
  }
  if (!std::isfinite(mx)) throw NumericalError("E-step: no shift has positive prior mass");
  double sum = 0.0;
  for (int k = 0; k < K; ++k) {
    for (int s = 0; s < S; ++s) {
      const double e = std::exp(R(s, k) - mx);
      R(s, k) = e;
      sum += e;
    }
  }
  const double scale = 1.0 / sum;
  for (int k = 0; k < K; ++k) {
    for (int s = 0; s < S; ++s) R(s, k) *= scale;
  }
  return mx + std::log(sum);
}

struct ChunkResult {
  RealMatrix B, Rsum;
  double loglik = 0.0, energy = 0.0;
};

// One chunk: stacked embeddings, correlations by one GEMM, posteriors, back-projection.
ChunkResult run_chunk(const TemplateBank& bank, const PatchSet& patches, const int* idx, int n, const RealVector& lp,
                      bool accumulate) {
  const int L = patches.L, S = 4 * L * L, K = static_cast<int>(bank.images.cols());
  RealMatrix E(n * S, L * L);
  for (int c = 0; c < n; ++c) E.middleRows(c * S, S) = patch_embedding(patches.pixels.col(idx[c]).data(), L);
  RealMatrix R = E * bank.images;  // correlations, overwritten by posteriors
  ChunkResult out;
  for (int c = 0; c < n; ++c) {
    const double pn = patches.pixels.col(idx[c]).squaredNorm();
    auto blk = R.middleRows(c * S, S);
    out.loglik += posterior_into(blk, bank.energy, pn, lp, patches.sigma2, R.middleRows(c * S, S));
    out.energy += pn;
  }
  if (accumulate) {
    out.B = E.transpose() * R;
    out.Rsum = RealMatrix::Zero(S, K);
    for (int c = 0; c < n; ++c) out.Rsum += R.middleRows(c * S, S);
  }
  return out;
}

template <class Consume>
void chunked(const PatchSet& patches, const std::vector<int>& indices, Consume consume,
             const std::function<ChunkResult(const int*, int)>& work) {
  const int n = static_cast<int>(indices.size());
  const int chunks = (n + kPatchChunk - 1) / kPatchChunk;
  (void)patches;
  for (int g0 = 0; g0 < chunks; g0 += kChunkGroup) {
    const int g1 = std::min(chunks, g0 + kChunkGroup);
    std::vector<ChunkResult> res(g1 - g0);
    std::vector<std::string> errors(g1 - g0);
#pragma omp parallel for schedule(dynamic, 1)
    for (int c = g0; c < g1; ++c) {
      const int b = c * kPatchChunk, e = std::min(n, b + kPatchChunk);
      try {
        res[c - g0] = work(indices.data() + b, e - b);
      } catch (const std::exception& ex) {
        errors[c - g0] = ex.what();
      }
    }
    for (const auto& e : errors) {
      if (!e.empty()) throw NumericalError(e);
    }
    for (auto& r : res) consume(r);
  }
}

}  // namespace

RealVector uniform_rho(int L) { return RealVector::Constant(4 * L * L, 1.0 / (4.0 * L * L)); }

RealMatrix log_likelihood_table(const double* patch, const TemplateBank& bank, double sigma2) {
  require(sigma2 > 0.0, "log-likelihood: sigma2 must be > 0");
  const int L = static_cast<int>(std::lround(std::sqrt(static_cast<double>(bank.images.rows()))));
  const RealMatrix E = patch_embedding(patch, L);
  const double pn = Eigen::Map<const RealVector>(patch, L * L).squaredNorm();
  RealMatrix ll = E * bank.images;
  ll = (2.0 * ll - bank.energy).array() - pn;
  return ll / (2.0 * sigma2);
}

RealMatrix posterior_from_loglik(const RealMatrix& loglik, const RealVector& rho, double* marginal) {
  require(rho.size() == loglik.rows(), "posterior: rho size mismatch");
  const RealVector lp = log_prior(rho, static_cast<int>(loglik.cols()));
  RealMatrix R(loglik.rows(), loglik.cols());
  double mx = -std::numeric_limits<double>::infinity();
  for (int k = 0; k < loglik.cols(); ++k) {
    for (int s = 0; s < loglik.rows(); ++s) {
      R(s, k) = loglik(s, k) + lp[s];
      mx = std::max(mx, R(s, k));
    }
  }
  if (!std::isfinite(mx)) throw NumericalError("posterior: no shift has positive prior mass");
  R = (R.array() - mx).exp();
  const double sum = R.sum();
  R /= sum;
  if (marginal) *marginal = mx + std::log(sum);
  return R;
}

RealMatrix posterior(const double* patch, const TemplateBank& bank, const RealVector& rho, double sigma2,
                     double* marginal) {
  return posterior_from_loglik(log_likelihood_table(patch, bank, sigma2), rho, marginal);
}

EStepAccumulator estep(const StageModel& model, const TemplateBank& bank, const PatchSet& patches,
                       const std::vector<int>& indices, const RealVector& rho) {
  require(patches.L == model.L(), "estep: patch size does not match the model");
  require(rho.size() == model.shifts(), "estep: rho size mismatch");
  EStepAccumulator acc;
  const int L = model.L();
  acc.B = RealMatrix::Zero(L * L, model.K());
  acc.Rsum = RealMatrix::Zero(model.shifts(), model.K());
  const RealVector lp = log_prior(rho, model.K());
  chunked(
      patches, indices,
      [&](const ChunkResult& r) {
        acc.B += r.B;
        acc.Rsum += r.Rsum;
        acc.loglik += r.loglik;
        acc.patch_energy += r.energy;
      },
      [&](const int* idx, int n) { return run_chunk(bank, patches, idx, n, lp, true); });
  acc.count = static_cast<int>(indices.size());
  return acc;
}

double total_log_likelihood(const StageModel& model, const TemplateBank& bank, const PatchSet& patches,
                            const std::vector<int>& indices, const RealVector& rho) {
  require(rho.size() == model.shifts(), "total_log_likelihood: rho size mismatch");
  const RealVector lp = log_prior(rho, model.K());
  double total = 0.0;
  chunked(
      patches, indices, [&](const ChunkResult& r) { total += r.loglik; },
      [&](const int* idx, int n) { return run_chunk(bank, patches, idx, n, lp, false); });
  return total;
}

void for_each_posterior(const TemplateBank& bank, const PatchSet& patches, const std::vector<int>& indices,
                        const RealVector& rho, const std::function<void(int, int, const RealMatrix&, double)>& f) {
  const int n = static_cast<int>(indices.size());
  std::vector<std::string> errors(n);
#pragma omp parallel for schedule(dynamic, 8)
  for (int t = 0; t < n; ++t) {
    try {
      double marg = 0.0;
      const RealMatrix R = posterior(patches.pixels.col(indices[t]).data(), bank, rho, patches.sigma2, &marg);
      f(t, indices[t], R, marg);
    } catch (const std::exception& e) {
      errors[t] = e.what();
    }
  }
  for (const auto& e : errors) {
    if (!e.empty()) throw NumericalError(e);
  }
}

}  // namespace pickless::em
