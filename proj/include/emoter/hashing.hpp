#pragma once

#include <cstdint>
#include <string>
#include <string_view>

namespace emoter {

inline constexpr int kFeatureSpaceBits = 22;
inline constexpr std::uint32_t kFeatureSpaceMask = (1u << kFeatureSpaceBits) - 1u;

/// FNV-1a over a byte sequence. Stable across platforms.
inline std::uint64_t fnv1a64(std::string_view data) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : data) {
    h ^= static_cast<std::uint64_t>(c);
    h *= 1099511628211ULL;
  }
  return h;
}

/// Hash a feature template string into the fixed feature space.
/// Collisions are not handled; they act as benign noise.
inline std::uint32_t feature_id(std::string_view tmpl) {
  return static_cast<std::uint32_t>(fnv1a64(tmpl)) & kFeatureSpaceMask;
}

/// Hex digest used for provenance (corpus checksums, config hashes).
std::string fnv1a64_hex(std::string_view data);

/// Digest of a whole file's bytes. Throws DataError if unreadable.
std::string file_digest(const std::string& path);

}  // namespace emoter
