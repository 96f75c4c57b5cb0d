#include "metaforge/profile/profile.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <unordered_map>

#include <nlohmann/json.hpp>

#include "metaforge/util/io.hpp"
#include "metaforge/util/strings.hpp"

namespace metaforge::profile {

using ordered_json = nlohmann::ordered_json;

std::string_view to_string(AlphabetClass c) {
  switch (c) {
    case AlphabetClass::digits: return "digits";
    case AlphabetClass::upper: return "upper";
    case AlphabetClass::lower: return "lower";
    case AlphabetClass::punctuation: return "punctuation";
    case AlphabetClass::whitespace: return "whitespace";
    case AlphabetClass::other: return "other";
  }
  return "other";
}

namespace {

AlphabetClass classify_char(unsigned char c) {
  if (std::isdigit(c)) return AlphabetClass::digits;
  if (std::isupper(c)) return AlphabetClass::upper;
  if (std::islower(c)) return AlphabetClass::lower;
  if (std::isspace(c)) return AlphabetClass::whitespace;
  if (std::ispunct(c)) return AlphabetClass::punctuation;
  return AlphabetClass::other;
}

AlphabetClass alphabet_class_from_string(std::string_view name) {
  for (auto c : {AlphabetClass::digits, AlphabetClass::upper, AlphabetClass::lower,
                 AlphabetClass::punctuation, AlphabetClass::whitespace, AlphabetClass::other}) {
    if (to_string(c) == name) return c;
  }
  throw Error(ErrorKind::io, "unknown alphabet class: " + std::string(name));
}

struct ColumnAccumulator {
  std::string name;
  std::uint64_t nulls = 0;
  std::unordered_map<std::string, std::uint64_t> counts;
  std::optional<std::string> min_value, max_value;
  std::size_t len_min = SIZE_MAX, len_max = 0;
  bool all_numeric = true;
  std::set<AlphabetClass> classes;
  std::optional<std::string> prefix;
  bool any_value = false;

  void add(const std::string& value) {
    any_value = true;
    ++counts[value];
    if (!min_value || value < *min_value) min_value = value;
    if (!max_value || value > *max_value) max_value = value;
    len_min = std::min(len_min, value.size());
    len_max = std::max(len_max, value.size());
    if (all_numeric && !strings::looks_numeric(value)) all_numeric = false;
    for (unsigned char c : value) classes.insert(classify_char(c));
    if (!prefix) {
      prefix = value;
    } else if (!prefix->empty()) {
      std::size_t i = 0;
      while (i < prefix->size() && i < value.size() && (*prefix)[i] == value[i]) ++i;
      prefix->resize(i);
    }
  }
};

}  // namespace

TableProfile profile_table(const db::Database& db, const std::string& table,
                           const ProfileConfig& config) {
  if (!db.has_table(table)) {
    throw Error(ErrorKind::not_found, "table not found: " + table);
  }
  auto columns = db.columns(table);
  TableProfile result;
  result.table = table;

  std::vector<ColumnAccumulator> accs(columns.size());
  std::vector<SketchBuilder> sketches;
  sketches.reserve(columns.size());
  for (std::size_t i = 0; i < columns.size(); ++i) {
    accs[i].name = columns[i].name;
    sketches.emplace_back(config.k, config.seed_base);
    if (columns[i].declared_type.empty()) {
      result.warnings.push_back("column " + table + "." + columns[i].name +
                                " has no declared type; profiled as opaque strings");
    }
  }

  std::uint64_t record_count = 0;
  auto stmt = db.prepare("SELECT * FROM " + db::quote_sql_identifier(table));
  while (stmt.step()) {
    ++record_count;
    for (std::size_t i = 0; i < columns.size(); ++i) {
      auto cell = stmt.column(static_cast<int>(i));
      if (!cell) {
        ++accs[i].nulls;
      } else {
        accs[i].add(*cell);
        sketches[i].add(*cell);
      }
    }
  }

  for (std::size_t i = 0; i < columns.size(); ++i) {
    auto& acc = accs[i];
    FieldProfile p;
    p.table = table;
    p.field = acc.name;
    p.record_count = record_count;
    p.null_count = acc.nulls;
    p.distinct_count = acc.counts.size();
    p.min_value = acc.min_value;
    p.max_value = acc.max_value;

    std::vector<std::pair<std::string, std::uint64_t>> pairs(acc.counts.begin(),
                                                             acc.counts.end());
    std::sort(pairs.begin(), pairs.end(), [](const auto& a, const auto& b) {
      if (a.second != b.second) return a.second > b.second;
      return a.first < b.first;
    });
    if (pairs.size() > config.top_k) pairs.resize(config.top_k);
    p.top_k = std::move(pairs);

    ShapeSummary shape;
    shape.length_min = acc.any_value ? acc.len_min : 0;
    shape.length_max = acc.any_value ? acc.len_max : 0;
    if (shape.length_min == shape.length_max) shape.fixed_length = shape.length_min;
    shape.all_numeric_looking = acc.all_numeric;  // vacuously true without values
    shape.alphabet_classes = acc.classes;
    if (acc.prefix && !acc.prefix->empty()) shape.common_prefix = acc.prefix;
    p.shape = shape;

    p.sketch = sketches[i].take();
    result.fields.push_back(std::move(p));
  }
  return result;
}

std::string render_profile_english(const FieldProfile& p) {
  std::string out = "Column " + p.field + " has " + std::to_string(p.null_count) +
                    " NULL values out of " + std::to_string(p.record_count) + " records.";
  out += " There are " + std::to_string(p.distinct_count) + " distinct values.";
  if (p.min_value && p.max_value) {
    out += " The minimum value is '" + *p.min_value + "' and the maximum value is '" +
           *p.max_value + "'.";
  }
  if (!p.top_k.empty()) {
    out += " Most common non-NULL column values are ";
    for (std::size_t i = 0; i < p.top_k.size(); ++i) {
      if (i) out += ", ";
      out += "'" + p.top_k[i].first + "'";
    }
    out += ".";
  }
  bool has_values = p.record_count > p.null_count;
  if (has_values && p.shape.fixed_length) {
    out += " The values are always " + std::to_string(*p.shape.fixed_length) +
           " characters long.";
  }
  if (has_values && p.shape.all_numeric_looking) {
    out += " Every column value looks like a number.";
  }
  if (has_values && p.shape.common_prefix) {
    out += " The values all start with '" + *p.shape.common_prefix + "'.";
  }
  return out;
}

JoinScan find_joinable_fields(const FieldProfile& target,
                              const std::vector<FieldProfile>& corpus, double threshold) {
  JoinScan scan;
  for (const auto& candidate : corpus) {
    if (candidate.table == target.table && candidate.field == target.field) continue;
    if (!candidate.sketch.compatible_with(target.sketch)) {
      scan.warnings.push_back("skipping incompatible sketch for " + candidate.ref().qualified());
      continue;
    }
    auto estimate = estimate_resemblance(target.sketch, candidate.sketch);
    if (estimate.value >= threshold) {
      scan.matches.push_back({candidate.ref(), estimate});
    }
  }
  std::sort(scan.matches.begin(), scan.matches.end(), [](const auto& a, const auto& b) {
    if (a.estimate.value != b.estimate.value) return a.estimate.value > b.estimate.value;
    return a.field < b.field;
  });
  return scan;
}

namespace {

ordered_json sketch_to_json(const MinHashSketch& sketch) {
  ordered_json j;
  j["k"] = sketch.k;
  j["seed_base"] = std::to_string(sketch.seed_base);
  ordered_json values = ordered_json::array();
  for (auto v : sketch.values) values.push_back(std::to_string(v));
  j["values"] = std::move(values);
  return j;
}

MinHashSketch sketch_from_json(const ordered_json& j) {
  MinHashSketch sketch;
  sketch.k = j.at("k").get<std::uint32_t>();
  sketch.seed_base = std::stoull(j.at("seed_base").get<std::string>());
  for (const auto& v : j.at("values")) {
    sketch.values.push_back(std::stoull(v.get<std::string>()));
  }
  if (sketch.values.size() != sketch.k) {
    throw Error(ErrorKind::io, "sketch slot count does not match k");
  }
  return sketch;
}

ordered_json field_to_json(const FieldProfile& p) {
  ordered_json j;
  j["table"] = p.table;
  j["field"] = p.field;
  j["record_count"] = p.record_count;
  j["null_count"] = p.null_count;
  j["distinct_count"] = p.distinct_count;
  if (p.min_value) j["min_value"] = *p.min_value;
  if (p.max_value) j["max_value"] = *p.max_value;
  ordered_json top = ordered_json::array();
  for (const auto& [value, count] : p.top_k) top.push_back(ordered_json::array({value, count}));
  j["top_k"] = std::move(top);
  ordered_json shape;
  if (p.shape.fixed_length) shape["fixed_length"] = *p.shape.fixed_length;
  shape["length_min"] = p.shape.length_min;
  shape["length_max"] = p.shape.length_max;
  shape["all_numeric_looking"] = p.shape.all_numeric_looking;
  ordered_json classes = ordered_json::array();
  for (auto c : p.shape.alphabet_classes) classes.push_back(std::string(to_string(c)));
  shape["alphabet_classes"] = std::move(classes);
  if (p.shape.common_prefix) shape["common_prefix"] = *p.shape.common_prefix;
  j["shape"] = std::move(shape);
  j["sketch"] = sketch_to_json(p.sketch);
  return j;
}

FieldProfile field_from_json(const ordered_json& j) {
  FieldProfile p;
  p.table = j.at("table").get<std::string>();
  p.field = j.at("field").get<std::string>();
  p.record_count = j.at("record_count").get<std::uint64_t>();
  p.null_count = j.at("null_count").get<std::uint64_t>();
  p.distinct_count = j.at("distinct_count").get<std::uint64_t>();
  if (j.contains("min_value")) p.min_value = j.at("min_value").get<std::string>();
  if (j.contains("max_value")) p.max_value = j.at("max_value").get<std::string>();
  for (const auto& pair : j.at("top_k")) {
    p.top_k.emplace_back(pair.at(0).get<std::string>(), pair.at(1).get<std::uint64_t>());
  }
  const auto& shape = j.at("shape");
  if (shape.contains("fixed_length"))
    p.shape.fixed_length = shape.at("fixed_length").get<std::size_t>();
  p.shape.length_min = shape.at("length_min").get<std::size_t>();
  p.shape.length_max = shape.at("length_max").get<std::size_t>();
  p.shape.all_numeric_looking = shape.at("all_numeric_looking").get<bool>();
  for (const auto& c : shape.at("alphabet_classes")) {
    p.shape.alphabet_classes.insert(alphabet_class_from_string(c.get<std::string>()));
  }
  if (shape.contains("common_prefix"))
    p.shape.common_prefix = shape.at("common_prefix").get<std::string>();
  p.sketch = sketch_from_json(j.at("sketch"));
  return p;
}

}  // namespace

std::string to_json(const TableProfile& profile) {
  ordered_json j;
  j["profile_version"] = 1;
  j["table"] = profile.table;
  ordered_json fields = ordered_json::array();
  for (const auto& f : profile.fields) fields.push_back(field_to_json(f));
  j["fields"] = std::move(fields);
  return j.dump(2) + "\n";
}

TableProfile table_profile_from_json(const std::string& text) {
  auto j = ordered_json::parse(text);
  if (j.at("profile_version").get<int>() != 1) {
    throw Error(ErrorKind::io, "unsupported profile_version");
  }
  TableProfile profile;
  profile.table = j.at("table").get<std::string>();
  for (const auto& f : j.at("fields")) profile.fields.push_back(field_from_json(f));
  return profile;
}

ProfileStore ProfileStore::load(const std::filesystem::path& dir) {
  ProfileStore store;
  if (!std::filesystem::is_directory(dir)) {
    throw Error(ErrorKind::not_found, "profile directory not found: " + dir.string());
  }
  std::vector<std::filesystem::path> files;
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    if (entry.path().extension() == ".json") files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());
  for (const auto& file : files) {
    store.put(table_profile_from_json(io::read_file(file)));
  }
  return store;
}

void ProfileStore::put(TableProfile profile) {
  auto key = strings::to_lower(profile.table);
  tables_[key] = std::move(profile);
}

void ProfileStore::save(const std::filesystem::path& dir) const {
  std::filesystem::create_directories(dir);
  for (const auto& [key, profile] : tables_) {
    io::atomic_write(dir / (key + ".json"), to_json(profile));
  }
}

const TableProfile* ProfileStore::table(const std::string& table) const {
  auto it = tables_.find(strings::to_lower(table));
  return it == tables_.end() ? nullptr : &it->second;
}

const FieldProfile* ProfileStore::field(const FieldRef& ref) const {
  const auto* t = table(ref.table);
  if (!t) return nullptr;
  for (const auto& f : t->fields) {
    if (strings::iequals(f.field, ref.field)) return &f;
  }
  return nullptr;
}

std::vector<const FieldProfile*> ProfileStore::all_fields() const {
  std::vector<const FieldProfile*> out;
  for (const auto& [key, profile] : tables_) {
    for (const auto& f : profile.fields) out.push_back(&f);
  }
  return out;
}

std::vector<std::string> ProfileStore::table_names() const {
  std::vector<std::string> names;
  for (const auto& [key, profile] : tables_) names.push_back(profile.table);
  return names;
}

}  // namespace metaforge::profile
