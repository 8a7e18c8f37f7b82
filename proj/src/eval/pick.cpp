#include "pickless/eval/pick.hpp"

#include <algorithm>
#include <cmath>

#include "pickless/common/errors.hpp"
#include "pickless/em/estep.hpp"

namespace pickless::eval {

using forward::Shift;

std::vector<bool> zero_template_shifts(const basis::PswfBasis& basis) {
  const int L = basis.L();
  std::vector<bool> support(L * L);
  for (int q = 0; q < L * L; ++q) support[q] = basis.psi().row(q).squaredNorm() > 0.0;
  std::vector<bool> out(4 * L * L, true);
  for (int lx = 0; lx < 2 * L; ++lx) {
    const auto wx = forward::window(lx, L);
    for (int ly = 0; ly < 2 * L; ++ly) {
      const auto wy = forward::window(ly, L);
      for (int qx = wx.begin; qx < wx.end && out[lx * 2 * L + ly]; ++qx) {
        for (int qy = wy.begin; qy < wy.end; ++qy) {
          if (support[qx * L + qy]) {
            out[lx * 2 * L + ly] = false;
            break;
          }
        }
      }
    }
  }
  return out;
}

std::vector<PatchPick> pick(const em::StageModel& model, const forward::VolumeCoefficients& x, const RealVector& rho,
                            const em::PatchSet& patches, const PickOptions& opt, bool* degenerate) {
  const int L = model.L();
  require(patches.L == L, "pick: patch size does not match the model");
  require(opt.energy_threshold >= 0.0, "pick: energy threshold must be >= 0");
  const em::TemplateBank bank = em::make_templates(model, x);
  if (degenerate) *degenerate = bank.images.squaredNorm() == 0.0;
  const auto zero = zero_template_shifts(*model.basis);
  std::vector<int> idx(patches.size());
  for (int p = 0; p < patches.size(); ++p) idx[p] = p;
  std::vector<PatchPick> out(patches.size());
  const double floor_energy = opt.energy_threshold * L * L * patches.sigma2;
  em::for_each_posterior(bank, patches, idx, rho, [&](int, int p, const RealMatrix& R, double) {
    const RealVector marg = R.rowwise().sum();
    Eigen::Index best;
    marg.maxCoeff(&best);
    PatchPick pk;
    pk.shift = forward::shift_from_index(static_cast<int>(best), L);
    pk.shift_posterior = marg[best];
    pk.template_energy = (R.array() * bank.energy.array()).sum();
    pk.empty = zero[best] || pk.template_energy < floor_energy;
    out[p] = pk;
  });
  return out;
}

std::vector<PatchTruth> ground_truth(const em::PatchSet& patches,
                                     const std::vector<std::vector<simulate::Placement>>& placements) {
  const int L = patches.L;
  std::vector<bool> disk(L * L);
  for (int i = 0; i < L; ++i) {
    for (int j = 0; j < L; ++j) {
      double r, phi;
      basis::pixel_to_disk(i, j, L, r, phi);
      disk[i * L + j] = r <= 1.0;
    }
  }
  std::vector<PatchTruth> out(patches.size());
  for (int p = 0; p < patches.size(); ++p) {
    const auto& o = patches.origins[p];
    require(o.micrograph < static_cast<int>(placements.size()), "ground_truth: placement list is missing a micrograph");
    int best = 0;
    PatchTruth t;
    for (const auto& pl : placements[o.micrograph]) {
      if (std::abs(pl.x - o.x) >= L || std::abs(pl.y - o.y) >= L) continue;
      int overlap = 0;
      for (int qx = 0; qx < L; ++qx) {
        const int u = pl.x + qx - o.x;
        if (u < 0 || u >= L) continue;
        for (int qy = 0; qy < L; ++qy) {
          const int v = pl.y + qy - o.y;
          if (v >= 0 && v < L && disk[qx * L + qy]) ++overlap;
        }
      }
      if (overlap > best) {
        best = overlap;
        const int n2 = 2 * L;
        t.shift = {((o.x - pl.x) % n2 + n2) % n2, ((o.y - pl.y) % n2 + n2) % n2};
      }
    }
    t.empty = best == 0;
    if (!t.empty) {
      const double h = 0.5 * L, h3 = 1.5 * L;
      t.half_occupied = (t.shift.x < h && t.shift.y < h) || (t.shift.x > h3 && t.shift.y > h3);
    }
    out[p] = t;
  }
  return out;
}

std::vector<PatchTruth> ground_truth(const em::PatchSet& patches, const std::vector<simulate::Micrograph>& mgs) {
  std::vector<std::vector<simulate::Placement>> pl;
  for (const auto& m : mgs) {
    require(m.L_proj == patches.L, "ground_truth: projection size differs from the patch size");
    pl.push_back(m.placements);
  }
  return ground_truth(patches, pl);
}

PickReport score(std::vector<PatchPick> picks, const std::vector<PatchTruth>& truth, int L, const PickOptions& opt,
                 bool degenerate) {
  require(picks.size() == truth.size(), "score: picks and ground truth differ in length");
  PickReport r;
  const int n2 = 2 * L;
  const auto circ = [n2](int a, int b) {
    const int d = std::abs(a - b) % n2;
    return std::min(d, n2 - d);
  };
  int empties = 0;
  for (size_t i = 0; i < picks.size(); ++i) {
    const bool pred = picks[i].empty, act = truth[i].empty;
    empties += act;
    if (pred && act) ++r.true_positive;
    if (pred && !act) ++r.false_positive;
    if (!pred && act) ++r.false_negative;
    if (!pred && !act) ++r.true_negative;
    if (truth[i].half_occupied) {
      ++r.half_occupied;
      if (circ(picks[i].shift.x, truth[i].shift.x) <= opt.tolerance &&
          circ(picks[i].shift.y, truth[i].shift.y) <= opt.tolerance) {
        ++r.localized;
      }
    }
  }
  const int tp = r.true_positive;
  r.precision = tp + r.false_positive > 0 ? static_cast<double>(tp) / (tp + r.false_positive) : 0.0;
  r.recall = tp + r.false_negative > 0 ? static_cast<double>(tp) / (tp + r.false_negative) : 0.0;
  r.f1_empty = r.precision + r.recall > 0 ? 2.0 * r.precision * r.recall / (r.precision + r.recall) : 0.0;
  r.localization_accuracy = r.half_occupied > 0 ? static_cast<double>(r.localized) / r.half_occupied : 0.0;
  const double e = picks.empty() ? 0.0 : static_cast<double>(empties) / picks.size();
  r.all_empty_f1 = e > 0.0 ? 2.0 * e / (1.0 + e) : 0.0;
  const int window = std::min(2 * opt.tolerance + 1, n2);
  r.uniform_chance_accuracy = static_cast<double>(window * window) / (n2 * n2);
  std::vector<Shift> hp, ht;
  for (size_t i = 0; i < picks.size(); ++i) {
    if (!truth[i].half_occupied) continue;
    hp.push_back(picks[i].shift);
    ht.push_back(truth[i].shift);
  }
  long hits = 0;
  for (const auto& a : hp) {
    for (const auto& b : ht) hits += circ(a.x, b.x) <= opt.tolerance && circ(a.y, b.y) <= opt.tolerance;
  }
  r.chance_accuracy = hp.empty() ? r.uniform_chance_accuracy : static_cast<double>(hits) / (hp.size() * ht.size());
  r.degenerate = degenerate;
  r.picks = std::move(picks);
  return r;
}

}  // namespace pickless::eval
