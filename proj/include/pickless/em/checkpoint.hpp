#pragma once

#include <string>

#include "pickless/em/driver.hpp"

namespace pickless::em {

inline constexpr uint32_t kCheckpointVersion = 1;

/// Versioned little-endian binary snapshot of an EmState (coefficients, rho,
/// counters, history, RNG state, validation subset, config hash). Written to a
/// temporary file and renamed.
void save_checkpoint(const std::string& path, const EmState& state);

/// Throws IoError on a malformed file, ValidationError when `expected_hash`
/// is non-zero and differs from the stored config hash.
EmState load_checkpoint(const std::string& path, uint64_t expected_hash = 0);

}  // namespace pickless::em
