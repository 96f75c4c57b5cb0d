#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "metaforge/common.hpp"
#include "metaforge/db/sqlite.hpp"
#include "metaforge/profile/minhash.hpp"

namespace metaforge::index {

struct IndexConfig {
  std::size_t n = 10000;  // distinct-value sample bound
  int shingle_size = 3;
  int lsh_bands = 32;
  int lsh_rows = 4;
  double min_similarity = 0.5;
  std::uint64_t seed_base = profile::kDefaultSeedBase ^ 0x5348494e474c45ULL;

  int signature_length() const { return lsh_bands * lsh_rows; }
};

/// Banded minhash-over-shingles index for one field's sampled values.
/// Candidate hits from the buckets are verified by exact shingle-Jaccard,
/// so lookups never return a false positive.
struct ValueIndex {
  FieldRef field;
  IndexConfig config;
  std::vector<std::string> values;  // sampled distinct values, first-occurrence order
  std::map<std::uint64_t, std::vector<std::uint32_t>> buckets;

  std::size_t n_sampled() const { return values.size(); }

  /// Distinct candidate value ids whose band signatures collide with the
  /// query's, ascending.
  std::vector<std::uint32_t> candidates(const std::string& query) const;

  /// True when some sampled value has exact shingle-Jaccard >= min_similarity
  /// with the query (candidates only; exact verification).
  bool contains_similar(const std::string& query, double min_similarity) const;
};

/// Samples up to config.n distinct non-NULL values in first-occurrence scan
/// order and builds the banded LSH buckets. An empty column yields a valid
/// empty index.
ValueIndex build_value_index(const db::Database& db, const FieldRef& field,
                             const IndexConfig& config = {});

/// Builds an in-memory index over explicit values (test and replay paths).
ValueIndex build_value_index_from_values(const FieldRef& field,
                                         const std::vector<std::string>& values,
                                         const IndexConfig& config = {});

/// Fields whose index holds a value with shingle-Jaccard >= min_similarity
/// to the literal, ordered by field identifier.
std::vector<FieldRef> lookup_literal_fields(const std::string& literal,
                                            const std::vector<ValueIndex>& indexes,
                                            double min_similarity);

std::string to_json(const ValueIndex& index);
ValueIndex value_index_from_json(const std::string& text);

}  // namespace metaforge::index
