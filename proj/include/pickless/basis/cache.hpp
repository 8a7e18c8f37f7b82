#pragma once

#include <filesystem>
#include <string>

#include "pickless/basis/pswf.hpp"

namespace pickless::basis {

inline constexpr uint32_t kBasisCacheVersion = 1;

/// Cache key for (c, L, ell_max, S table, thresholds, radial nodes).
std::string basis_cache_key(const BandlimitParams& params, int radial_nodes = 128);

void save_basis(const PswfBasis& basis, const std::filesystem::path& path);
/// Loads a cached basis. Throws IoError on unreadable/corrupt files and
/// ValidationError when the stored parameters differ from `params`.
PswfBasis load_basis(const std::filesystem::path& path, const BandlimitParams& params);

/// Cache directory: $PICKLESS_CACHE_DIR, else ./.pickless-cache.
std::filesystem::path default_cache_dir();

/// Load from `dir` on a hit, else build and store.
PswfBasis load_or_build_basis(const BandlimitParams& params, const std::filesystem::path& dir,
                              bool* hit = nullptr);

}  // namespace pickless::basis
