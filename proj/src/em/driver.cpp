#include "pickless/em/driver.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <numeric>

#include <omp.h>

#include "pickless/common/errors.hpp"
#include "pickless/common/hash.hpp"
#include "pickless/em/estep.hpp"
#include "pickless/em/templates.hpp"
#include "pickless/forward/volume.hpp"

namespace pickless::em {

StopMode stop_mode_from_string(const std::string& s) {
  if (s == "none") return StopMode::None;
  if (s == "literal") return StopMode::Literal;
  if (s == "validation") return StopMode::Validation;
  throw ValidationError("unknown stop mode '" + s + "' (expected none, literal or validation)");
}

std::string to_string(StopMode m) {
  switch (m) {
    case StopMode::None: return "none";
    case StopMode::Literal: return "literal";
    case StopMode::Validation: return "validation";
  }
  return "?";
}

void EmConfig::validate() const {
  require(!stages.empty(), "em: at least one stage is required");
  for (size_t i = 0; i < stages.size(); ++i) {
    require(stages[i].ell_max >= 0 && stages[i].max_iters >= 1, "em: stage needs ell_max >= 0 and max_iters >= 1");
    if (i > 0) require(stages[i].ell_max >= stages[i - 1].ell_max, "em: stage ell_max must be non-decreasing");
  }
  require(batch_fraction > 0.0 && batch_fraction <= 1.0, "em: batch fraction S must lie in (0, 1]");
  require(epsilon >= 0.0, "em: epsilon must be >= 0");
  require(validation_fraction > 0.0 && validation_fraction <= 1.0, "em: validation fraction must lie in (0, 1]");
  require(threads >= 0, "em: threads must be >= 0");
}

int minibatch_size(double batch_fraction, int n_patches) {
  const int m = static_cast<int>(std::floor(batch_fraction * n_patches));
  return std::clamp(m, 1, n_patches);
}

namespace {

// Uniform draw of m indices out of n without replacement, sorted.
std::vector<int> draw_subset(int n, int m, std::mt19937_64& rng) {
  std::vector<int> all(n);
  std::iota(all.begin(), all.end(), 0);
  if (m >= n) return all;
  for (int i = 0; i < m; ++i) {
    std::uniform_int_distribution<int> u(i, n - 1);
    std::swap(all[i], all[u(rng)]);
  }
  all.resize(m);
  std::sort(all.begin(), all.end());
  return all;
}

std::vector<int> all_indices(int n) {
  std::vector<int> v(n);
  std::iota(v.begin(), v.end(), 0);
  return v;
}

}  // namespace

EmState initial_state(const EmContext& ctx, const PatchSet& patches, const EmConfig& cfg) {
  cfg.validate();
  require(ctx.basis && ctx.beta && ctx.grid, "em: context tables are missing");
  require(patches.size() > 0, "em: no patches");
  require(patches.sigma2 > 0.0, "em: noise variance must be > 0");
  const auto& params = ctx.basis->params();
  require(cfg.stages.back().ell_max <= ctx.beta->layout().ell_max(), "em: final stage exceeds the beta table");
  EmState st;
  const int L = params.L;
  Volume v(L);
  std::mt19937_64 g(derive_seed(cfg.seed, 3));
  std::normal_distribution<double> nd;
  for (double& d : v.data) d = nd(g);
  const auto full = forward::fit_coefficients(v, params);
  const auto& S = ctx.beta->layout().S_of_ell();
  const int l0 = cfg.stages.front().ell_max;
  st.x = forward::embed(full, forward::CoeffLayout(l0, std::vector<int>(S.begin(), S.begin() + l0 + 1)));
  st.rho = uniform_rho(L);
  st.rng.seed(derive_seed(cfg.seed, 0));
  std::mt19937_64 vr(derive_seed(cfg.seed, 2));
  st.validation_idx = draw_subset(patches.size(), minibatch_size(cfg.validation_fraction, patches.size()), vr);
  return st;
}

EmState run(const EmContext& ctx, const PatchSet& patches, const EmConfig& cfg, const IterationCallback& callback) {
  return run(ctx, patches, cfg, initial_state(ctx, patches, cfg), callback);
}

EmState run(const EmContext& ctx, const PatchSet& patches, const EmConfig& cfg, EmState st,
            const IterationCallback& callback) {
  cfg.validate();
  require(ctx.basis && ctx.beta && ctx.grid, "em: context tables are missing");
  require(patches.L == ctx.basis->L(), "em: patch size does not match the basis");
  require(patches.sigma2 > 0.0, "em: noise variance must be > 0");
  if (cfg.threads > 0) omp_set_num_threads(cfg.threads);
  const int n = patches.size();
  const int K = ctx.grid->size();
  const bool full_batch = minibatch_size(cfg.batch_fraction, n) >= n;
  const std::vector<int> everything = all_indices(n);

  while (!st.finished && st.stage < static_cast<int>(cfg.stages.size())) {
    const int si = st.stage;
    const Stage& stage = cfg.stages[si];
    const StageModel model = make_stage_model(*ctx.basis, *ctx.beta, *ctx.grid, stage.ell_max);
    if (!(st.x.layout == model.layout)) st.x = forward::embed(st.x, model.layout);
    while (st.stage == si) {
      const auto t0 = std::chrono::steady_clock::now();
      const std::vector<int> batch =
          full_batch ? everything : draw_subset(n, minibatch_size(cfg.batch_fraction, n), st.rng);
      const TemplateBank bank = make_templates(model, st.x);
      const EStepAccumulator acc = estep(model, bank, patches, batch, st.rho);
      const RealSystem sys = assemble_streamed(model, acc);
      const RealVector theta_old = forward::to_real(model.layout, st.x.x);

      IterationRecord rec;
      rec.k = st.k + 1;
      rec.stage = st.stage;
      rec.ell_max = stage.ell_max;
      rec.batch = static_cast<int>(batch.size());
      rec.loglik = acc.loglik / acc.count;
      rec.q_old = surrogate_q(sys, theta_old, st.rho, patches.sigma2, K) / acc.count;

      SolveInfo info;
      const RealVector theta = solve_real(sys, &info, cfg.ridge);
      const RealVector rho = update_rho(sys.rho_mass);
      rec.q_new = surrogate_q(sys, theta, rho, patches.sigma2, K) / acc.count;
      rec.ridge = info.ridge;
      if (cfg.stop == StopMode::Validation) {
        rec.validation = full_batch ? rec.loglik
                                    : total_log_likelihood(model, bank, patches, st.validation_idx, st.rho) /
                                          static_cast<double>(st.validation_idx.size());
      }

      st.x.x = forward::from_real(model.layout, theta);
      st.rho = rho;
      ++st.k;
      ++st.stage_iter;

      bool advance = false;
      if (st.stage_iter >= 2 && !st.history.empty() && st.history.back().stage == si) {
        const IterationRecord& prev = st.history.back();
        if (cfg.stop == StopMode::Literal) advance = rec.q_new - prev.q_new <= cfg.epsilon;
        if (cfg.stop == StopMode::Validation) advance = rec.validation - prev.validation <= cfg.epsilon;
      }
      if (advance || st.stage_iter >= stage.max_iters) {
        ++st.stage;
        st.stage_iter = 0;
        if (st.stage >= static_cast<int>(cfg.stages.size())) st.finished = true;
      }
      rec.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
      st.history.push_back(rec);
      if (callback && !callback(st, rec)) return st;
    }
  }
  st.finished = true;
  return st;
}

}  // namespace pickless::em
