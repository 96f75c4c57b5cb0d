#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace metaforge::hash {

/// splitmix64 step; also usable as a finalizing mixer.
std::uint64_t splitmix64(std::uint64_t& state);

/// i-th value of the splitmix64 stream seeded with `seed`.
std::uint64_t splitmix64_at(std::uint64_t seed, std::uint64_t i);

/// Strong 64-bit avalanche mix (splitmix64 finalizer).
std::uint64_t mix64(std::uint64_t x);

/// 64-bit FNV-1a over raw bytes. Platform-stable.
std::uint64_t fnv1a64(std::string_view bytes);

/// Seeded hash family used for sketching: one base hash of the bytes,
/// combined with a per-seed mix. Stable across runs and platforms.
std::uint64_t seeded_hash(std::uint64_t seed, std::string_view bytes);

/// SHA-256 of `bytes` as lowercase hex.
std::string sha256_hex(std::string_view bytes);

/// Deterministic in-place Fisher-Yates shuffle driven by splitmix64.
/// std::shuffle is implementation-defined, so batches that must be
/// byte-identical across platforms go through this.
template <typename T>
void deterministic_shuffle(std::vector<T>& items, std::uint64_t seed) {
  std::uint64_t state = seed;
  for (std::size_t i = items.size(); i > 1; --i) {
    std::size_t j = static_cast<std::size_t>(splitmix64(state) % i);
    std::swap(items[i - 1], items[j]);
  }
}

/// Deterministic index in [0, n).
std::uint64_t bounded(std::uint64_t value, std::uint64_t n);

}  // namespace metaforge::hash
