#include "metaforge/profile/minhash.hpp"

#include "metaforge/common.hpp"
#include "metaforge/util/hash.hpp"
#include "metaforge/util/strings.hpp"

namespace metaforge::profile {

SketchBuilder::SketchBuilder(std::uint32_t k, std::uint64_t seed_base) {
  sketch_.k = k;
  sketch_.seed_base = seed_base;
  sketch_.values.assign(k, kEmptySlot);
  slot_seeds_.resize(k);
  for (std::uint32_t i = 0; i < k; ++i) {
    slot_seeds_[i] = hash::mix64((seed_base + i) ^ 0xd6e8feb86659fd93ULL);
  }
}

void SketchBuilder::add(std::string_view value) {
  std::uint64_t base = hash::fnv1a64(value);
  for (std::uint32_t i = 0; i < sketch_.k; ++i) {
    std::uint64_t h = hash::mix64(base ^ slot_seeds_[i]);
    if (h < sketch_.values[i]) sketch_.values[i] = h;
  }
}

MinHashSketch sketch_values(const std::vector<std::string>& values, std::uint32_t k,
                            std::uint64_t seed_base) {
  SketchBuilder builder(k, seed_base);
  for (const auto& v : values) builder.add(v);
  return builder.take();
}

ResemblanceEstimate estimate_resemblance(const MinHashSketch& a, const MinHashSketch& b) {
  if (!a.compatible_with(b)) {
    throw Error(ErrorKind::incompatible_sketch,
                "sketches differ in k (" + std::to_string(a.k) + " vs " + std::to_string(b.k) +
                    ") or seed_base");
  }
  if (a.k == 0) throw Error(ErrorKind::incompatible_sketch, "zero-size sketch");
  std::uint32_t matches = 0;
  for (std::uint32_t i = 0; i < a.k; ++i) {
    if (a.values[i] == b.values[i]) ++matches;
  }
  return {static_cast<double>(matches) / a.k, a.k};
}

}  // namespace metaforge::profile
