#include "metaforge/index/value_index.hpp"

#include <algorithm>
#include <set>
#include <unordered_set>

#include <nlohmann/json.hpp>

#include "metaforge/index/shingle.hpp"
#include "metaforge/util/hash.hpp"
#include "metaforge/util/io.hpp"
#include "metaforge/util/strings.hpp"

namespace metaforge::index {

using ordered_json = nlohmann::ordered_json;

namespace {

std::vector<std::uint64_t> signature_of(const std::set<std::string>& shingle_set,
                                        const IndexConfig& config) {
  profile::SketchBuilder builder(static_cast<std::uint32_t>(config.signature_length()),
                                 config.seed_base);
  for (const auto& s : shingle_set) builder.add(s);
  return builder.take().values;
}

std::vector<std::uint64_t> band_keys(const std::vector<std::uint64_t>& signature,
                                     const IndexConfig& config) {
  std::vector<std::uint64_t> keys;
  keys.reserve(config.lsh_bands);
  for (int band = 0; band < config.lsh_bands; ++band) {
    std::uint64_t h = hash::mix64(0xb4bdb15ULL + static_cast<std::uint64_t>(band));
    for (int row = 0; row < config.lsh_rows; ++row) {
      h = hash::mix64(h ^ signature[static_cast<std::size_t>(band * config.lsh_rows + row)]);
    }
    keys.push_back(h);
  }
  return keys;
}

void insert_value(ValueIndex& index, std::uint32_t value_id, const std::string& value) {
  auto sig = signature_of(shingles(value, index.config.shingle_size), index.config);
  for (auto key : band_keys(sig, index.config)) {
    index.buckets[key].push_back(value_id);
  }
}

}  // namespace

std::vector<std::uint32_t> ValueIndex::candidates(const std::string& query) const {
  auto sig = signature_of(shingles(query, config.shingle_size), config);
  std::set<std::uint32_t> ids;
  for (auto key : band_keys(sig, config)) {
    auto it = buckets.find(key);
    if (it == buckets.end()) continue;
    ids.insert(it->second.begin(), it->second.end());
  }
  return {ids.begin(), ids.end()};
}

bool ValueIndex::contains_similar(const std::string& query, double min_similarity) const {
  auto query_shingles = shingles(query, config.shingle_size);
  for (auto id : candidates(query)) {
    auto value_shingles = shingles(values[id], config.shingle_size);
    if (shingle_jaccard(query_shingles, value_shingles) >= min_similarity) return true;
  }
  return false;
}

ValueIndex build_value_index(const db::Database& db, const FieldRef& field,
                             const IndexConfig& config) {
  ValueIndex index;
  index.field = field;
  index.config = config;
  std::unordered_set<std::string> seen;
  auto stmt = db.prepare("SELECT " + db::quote_sql_identifier(field.field) + " FROM " +
                         db::quote_sql_identifier(field.table));
  while (stmt.step() && index.values.size() < config.n) {
    auto cell = stmt.column(0);
    if (!cell) continue;
    if (!seen.insert(*cell).second) continue;
    auto id = static_cast<std::uint32_t>(index.values.size());
    index.values.push_back(*cell);
    insert_value(index, id, *cell);
  }
  return index;
}

ValueIndex build_value_index_from_values(const FieldRef& field,
                                         const std::vector<std::string>& values,
                                         const IndexConfig& config) {
  ValueIndex index;
  index.field = field;
  index.config = config;
  std::unordered_set<std::string> seen;
  for (const auto& value : values) {
    if (index.values.size() >= config.n) break;
    if (!seen.insert(value).second) continue;
    auto id = static_cast<std::uint32_t>(index.values.size());
    index.values.push_back(value);
    insert_value(index, id, value);
  }
  return index;
}

std::vector<FieldRef> lookup_literal_fields(const std::string& literal,
                                            const std::vector<ValueIndex>& indexes,
                                            double min_similarity) {
  std::vector<FieldRef> out;
  for (const auto& index : indexes) {
    if (index.contains_similar(literal, min_similarity)) out.push_back(index.field);
  }
  std::sort(out.begin(), out.end(),
            [](const FieldRef& a, const FieldRef& b) { return a.key() < b.key(); });
  return out;
}

std::string to_json(const ValueIndex& index) {
  ordered_json j;
  j["table"] = index.field.table;
  j["field"] = index.field.field;
  j["n"] = index.config.n;
  j["shingle_size"] = index.config.shingle_size;
  j["lsh_bands"] = index.config.lsh_bands;
  j["lsh_rows"] = index.config.lsh_rows;
  j["min_similarity"] = index.config.min_similarity;
  j["seed_base"] = std::to_string(index.config.seed_base);
  j["values"] = index.values;
  return j.dump() + "\n";
}

ValueIndex value_index_from_json(const std::string& text) {
  auto j = ordered_json::parse(text);
  IndexConfig config;
  config.n = j.at("n").get<std::size_t>();
  config.shingle_size = j.at("shingle_size").get<int>();
  config.lsh_bands = j.at("lsh_bands").get<int>();
  config.lsh_rows = j.at("lsh_rows").get<int>();
  config.min_similarity = j.at("min_similarity").get<double>();
  config.seed_base = std::stoull(j.at("seed_base").get<std::string>());
  FieldRef field{j.at("table").get<std::string>(), j.at("field").get<std::string>()};
  return build_value_index_from_values(field, j.at("values").get<std::vector<std::string>>(),
                                       config);
}

}  // namespace metaforge::index
