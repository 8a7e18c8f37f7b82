#include "pickless/simulate/placement.hpp"

#include <cmath>
#include <sstream>

#include "pickless/common/errors.hpp"

namespace pickless::simulate {

std::string to_string(PlacementMode m) { return m == PlacementMode::Separated ? "separated" : "arbitrary"; }
std::string to_string(Method m) { return m == Method::TrueVolume ? "true-volume" : "expanded-volume"; }

PlacementMode placement_mode_from_string(const std::string& s) {
  if (s == "separated") return PlacementMode::Separated;
  if (s == "arbitrary") return PlacementMode::Arbitrary;
  throw ValidationError("unknown placement mode '" + s + "' (expected separated|arbitrary)");
}

Method method_from_string(const std::string& s) {
  if (s == "true-volume" || s == "one") return Method::TrueVolume;
  if (s == "expanded-volume" || s == "two") return Method::ExpandedVolume;
  throw ValidationError("unknown generation method '" + s + "' (expected true-volume|expanded-volume)");
}

void SimConfig::validate() const {
  require(L_tilde >= 3, "sim.L_tilde must be >= 3");
  require(N >= L_tilde, "sim.N must be at least the projection size");
  require(gamma > 0.0 && gamma < 1.0, "sim.gamma must lie in (0, 1)");
  require(snr > 0.0, "sim.snr must be > 0");
  if (downsample_to) {
    require(*downsample_to >= 3 && *downsample_to <= L_tilde, "sim.downsample_to must lie in [3, L_tilde]");
  }
}

int target_count(int N, double gamma, int L) {
  return static_cast<int>(std::llround(gamma * static_cast<double>(N) * N / (static_cast<double>(L) * L)));
}

bool compatible(int ax, int ay, int bx, int by, int L, PlacementMode mode) {
  const int dx = std::abs(ax - bx), dy = std::abs(ay - by);
  const int sep = mode == PlacementMode::Separated ? 2 * L - 1 : L;
  return dx >= sep || dy >= sep;
}

PlacementResult place_corners(int N, int L, int T, PlacementMode mode, std::mt19937_64& rng, long max_attempts) {
  require(N >= L && L >= 1 && T >= 0, "place_corners: invalid sizes");
  const int side = N - L + 1;
  const int reach = (mode == PlacementMode::Separated ? 2 * L - 1 : L) - 1;
  // blocked[c] counts boxes whose exclusion square covers corner c.
  std::vector<uint8_t> blocked(static_cast<size_t>(side) * side, 0);
  std::vector<int> free_list(static_cast<size_t>(side) * side);
  for (size_t i = 0; i < free_list.size(); ++i) free_list[i] = static_cast<int>(i);

  PlacementResult res;
  while (static_cast<int>(res.corners.size()) < T) {
    if (free_list.empty()) {
      res.saturated = true;
      break;
    }
    if (res.attempts >= max_attempts) break;
    ++res.attempts;
    std::uniform_int_distribution<size_t> pick(0, free_list.size() - 1);
    const size_t slot = pick(rng);
    const int c = free_list[slot];
    if (blocked[c]) {
      free_list[slot] = free_list.back();
      free_list.pop_back();
      continue;
    }
    const int cx = c / side, cy = c % side;
    res.corners.emplace_back(cx, cy);
    for (int x = std::max(0, cx - reach); x <= std::min(side - 1, cx + reach); ++x) {
      for (int y = std::max(0, cy - reach); y <= std::min(side - 1, cy + reach); ++y) {
        blocked[static_cast<size_t>(x) * side + y] = 1;
      }
    }
  }
  return res;
}

bool verify_placement(const std::vector<std::pair<int, int>>& corners, int L, PlacementMode mode) {
  for (size_t a = 0; a < corners.size(); ++a) {
    for (size_t b = a + 1; b < corners.size(); ++b) {
      if (!compatible(corners[a].first, corners[a].second, corners[b].first, corners[b].second, L, mode)) {
        return false;
      }
    }
  }
  return true;
}

std::vector<Placement> place_projections(const SimConfig& config, int L) {
  config.validate();
  const int T = target_count(config.N, config.gamma, L);
  std::mt19937_64 rng(config.seed);
  const auto res = place_corners(config.N, L, T, config.mode, rng, 10000L * std::max(T, 1));
  if (static_cast<int>(res.corners.size()) < T && !config.allow_partial) {
    std::ostringstream os;
    os << "placement failed: target T = " << T << " (gamma = " << config.gamma << ", N = " << config.N
       << ", L = " << L << ", mode = " << to_string(config.mode) << ") but only T = " << res.corners.size()
       << " projections fit" << (res.saturated ? " before the micrograph saturated" : " within the attempt cap")
       << "; lower gamma, use mode=arbitrary, or set allow_partial";
    throw ValidationError(os.str());
  }
  std::vector<Placement> out;
  out.reserve(res.corners.size());
  for (const auto& [x, y] : res.corners) {
    Placement p;
    p.x = x;
    p.y = y;
    p.rotation = basis::Rotation::random(rng);
    out.push_back(p);
  }
  return out;
}

}  // namespace pickless::simulate
