#pragma once

#include <cstdint>
#include <string_view>
#include <vector>

namespace metaforge::profile {

inline constexpr std::uint64_t kDefaultSeedBase = 0x9e3779b97f4a7c15ULL;
inline constexpr std::uint64_t kEmptySlot = ~0ULL;

/// K per-hash-function minima over a value multiset. Deterministic given
/// (seed_base, k, value set); order- and duplicate-insensitive. An empty
/// value set leaves every slot at the sentinel (max representable value).
struct MinHashSketch {
  std::uint32_t k = 0;
  std::uint64_t seed_base = 0;
  std::vector<std::uint64_t> values;

  bool compatible_with(const MinHashSketch& other) const {
    return k == other.k && seed_base == other.seed_base;
  }
};

/// Streaming sketch builder. h_i(v) = mix(base_hash(v), seed_base + i).
class SketchBuilder {
 public:
  SketchBuilder(std::uint32_t k, std::uint64_t seed_base);

  void add(std::string_view value);
  const MinHashSketch& sketch() const { return sketch_; }
  MinHashSketch take() { return std::move(sketch_); }

 private:
  MinHashSketch sketch_;
  std::vector<std::uint64_t> slot_seeds_;
};

MinHashSketch sketch_values(const std::vector<std::string>& values, std::uint32_t k,
                            std::uint64_t seed_base);

struct ResemblanceEstimate {
  double value = 0.0;  // matching slots / k, in [0, 1]
  std::uint32_t k = 0;
};

/// Slot-agreement estimate of Jaccard resemblance. Throws
/// Error(incompatible_sketch) when k or seed_base differ.
ResemblanceEstimate estimate_resemblance(const MinHashSketch& a, const MinHashSketch& b);

}  // namespace metaforge::profile
