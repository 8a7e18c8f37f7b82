#pragma once

#include <cstdint>
#include <string>
#include <string_view>

namespace pickless {

// 64-bit FNV-1a. Stable across platforms, unlike std::hash.
uint64_t fnv1a64(std::string_view bytes, uint64_t seed = 0xcbf29ce484222325ULL);

std::string to_hex(uint64_t v);

}  // namespace pickless

namespace pickless {

// Independent sub-stream seed (splitmix64 finalizer over seed and stream id).
inline uint64_t derive_seed(uint64_t seed, uint64_t stream) {
  uint64_t z = seed + 0x9E3779B97F4A7C15ULL * (stream + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

}  // namespace pickless
