#include "metaforge/summarize/summarizer.hpp"

#include <algorithm>

#include <nlohmann/json.hpp>

#include "metaforge/util/csv.hpp"
#include "metaforge/util/io.hpp"
#include "metaforge/util/strings.hpp"

namespace metaforge::summarize {

using ordered_json = nlohmann::ordered_json;

MetadataKind metadata_kind_from_string(std::string_view name) {
  if (name == "none") return MetadataKind::none;
  if (name == "sme_only") return MetadataKind::sme_only;
  if (name == "minimal") return MetadataKind::minimal;
  if (name == "maximal") return MetadataKind::maximal;
  if (name == "full") return MetadataKind::full;
  throw Error(ErrorKind::config, "unknown metadata kind: " + std::string(name));
}

std::string_view to_string(MetadataKind kind) {
  switch (kind) {
    case MetadataKind::none: return "none";
    case MetadataKind::sme_only: return "sme_only";
    case MetadataKind::minimal: return "minimal";
    case MetadataKind::maximal: return "maximal";
    case MetadataKind::full: return "full";
  }
  return "none";
}

std::string statistics_clause(const profile::FieldProfile& p) {
  std::string out = "The " + p.field + " column has " + std::to_string(p.null_count) +
                    " NULL values out of " + std::to_string(p.record_count) + " records and " +
                    std::to_string(p.distinct_count) + " distinct values";
  if (p.min_value && p.max_value) {
    out += ", ranging from '" + *p.min_value + "' to '" + *p.max_value + "'";
  }
  if (!p.top_k.empty()) {
    out += "; common values include ";
    for (std::size_t i = 0; i < p.top_k.size(); ++i) {
      if (i) out += ", ";
      out += "'" + p.top_k[i].first + "'";
    }
  }
  out += ".";
  return out;
}

std::string summarize_field(const profile::FieldProfile& p,
                            const std::vector<std::string>& table_schema,
                            const std::optional<std::string>& sme_metadata, llm::Gateway& gw,
                            const llm::PromptSet& prompts, SummaryLength length) {
  llm::ChatRequest req;
  req.tag = "summarize_field";
  req.system_prompt =
      "You are a database documentation assistant. Answer with the description only.";
  req.user_prompt = prompts.render(
      "summarize_field",
      {{"table", p.table},
       {"field", p.field},
       {"siblings", strings::join(table_schema, ", ")},
       {"rendered_profile", profile::render_profile_english(p)},
       {"sme_metadata", sme_metadata ? *sme_metadata : "(none provided)"}});
  std::string short_summary = strings::trim(gw.chat(req));
  if (short_summary.empty()) {
    throw Error(ErrorKind::summarization_failed,
                "empty summary for " + p.ref().qualified());
  }
  if (length == SummaryLength::short_form) return short_summary;
  return short_summary + " " + statistics_clause(p);
}

std::map<std::pair<std::string, std::string>, std::string> load_sme_metadata(
    const std::filesystem::path& dir) {
  std::map<std::pair<std::string, std::string>, std::string> metadata;
  if (!std::filesystem::is_directory(dir)) return metadata;
  std::vector<std::filesystem::path> files;
  for (const auto& entry : std::filesystem::directory_iterator(dir)) {
    if (entry.path().extension() == ".csv") files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());
  for (const auto& file : files) {
    auto table = strings::to_lower(file.stem().string());
    auto rows = csv::read_rows(file);
    if (rows.empty()) continue;
    // Header: original_column_name, column_name, column_description,
    // data_format, value_description (case varies between databases).
    int col_name = -1, col_desc = -1, col_value_desc = -1;
    for (std::size_t i = 0; i < rows[0].size(); ++i) {
      auto header = strings::to_lower(strings::trim(rows[0][i]));
      if (header == "original_column_name") col_name = static_cast<int>(i);
      if (header == "column_description") col_desc = static_cast<int>(i);
      if (header == "value_description") col_value_desc = static_cast<int>(i);
    }
    if (col_name < 0) continue;
    for (std::size_t r = 1; r < rows.size(); ++r) {
      const auto& row = rows[r];
      if (static_cast<int>(row.size()) <= col_name) continue;
      auto column = strings::trim(row[col_name]);
      if (column.empty()) continue;
      std::string description;
      if (col_desc >= 0 && static_cast<int>(row.size()) > col_desc) {
        description = strings::normalize_whitespace(row[col_desc]);
      }
      if (col_value_desc >= 0 && static_cast<int>(row.size()) > col_value_desc) {
        auto value_desc = strings::normalize_whitespace(row[col_value_desc]);
        if (!value_desc.empty()) {
          if (!description.empty()) description += " ";
          description += "Values: " + value_desc;
        }
      }
      if (description.empty()) continue;  // blank descriptions count as absent
      metadata[{table, strings::to_lower(column)}] = description;
    }
  }
  return metadata;
}

std::vector<FieldDescriptor> build_descriptors(const db::Database& database,
                                               const profile::ProfileStore& profiles,
                                               const std::optional<std::filesystem::path>& sme_csv_dir,
                                               llm::Gateway& gw, const llm::PromptSet& prompts) {
  std::map<std::pair<std::string, std::string>, std::string> sme;
  if (sme_csv_dir) sme = load_sme_metadata(*sme_csv_dir);

  std::vector<FieldDescriptor> descriptors;
  for (const auto& table : database.table_names()) {
    std::vector<std::string> siblings;
    for (const auto& col : database.columns(table)) siblings.push_back(col.name);
    for (const auto& col : database.columns(table)) {
      const auto* p = profiles.field({table, col.name});
      if (!p) {
        throw Error(ErrorKind::not_found,
                    "no profile for column " + table + "." + col.name);
      }
      FieldDescriptor d;
      d.table = p->table;
      d.field = p->field;
      d.profile_ref = strings::to_lower(p->table);
      auto it = sme.find({strings::to_lower(table), strings::to_lower(col.name)});
      if (it != sme.end()) d.sme_metadata = it->second;
      d.short_summary =
          summarize_field(*p, siblings, d.sme_metadata, gw, prompts, SummaryLength::short_form);
      d.long_summary = *d.short_summary + " " + statistics_clause(*p);
      descriptors.push_back(std::move(d));
    }
  }
  std::sort(descriptors.begin(), descriptors.end(), [](const auto& a, const auto& b) {
    if (a.table != b.table) return a.table < b.table;
    return a.field < b.field;
  });
  return descriptors;
}

std::string to_json(const std::vector<FieldDescriptor>& descriptors) {
  ordered_json arr = ordered_json::array();
  for (const auto& d : descriptors) {
    ordered_json j;
    j["table"] = d.table;
    j["field"] = d.field;
    if (d.sme_metadata) j["sme_metadata"] = *d.sme_metadata;
    if (d.short_summary) j["short_summary"] = *d.short_summary;
    if (d.long_summary) j["long_summary"] = *d.long_summary;
    arr.push_back(std::move(j));
  }
  return arr.dump(2) + "\n";
}

DescriptorStore DescriptorStore::load(const std::filesystem::path& file) {
  auto j = ordered_json::parse(io::read_file(file));
  std::vector<FieldDescriptor> descriptors;
  for (const auto& entry : j) {
    FieldDescriptor d;
    d.table = entry.at("table").get<std::string>();
    d.field = entry.at("field").get<std::string>();
    if (entry.contains("sme_metadata")) d.sme_metadata = entry.at("sme_metadata").get<std::string>();
    if (entry.contains("short_summary"))
      d.short_summary = entry.at("short_summary").get<std::string>();
    if (entry.contains("long_summary")) d.long_summary = entry.at("long_summary").get<std::string>();
    d.profile_ref = strings::to_lower(d.table);
    descriptors.push_back(std::move(d));
  }
  return from_descriptors(std::move(descriptors));
}

DescriptorStore DescriptorStore::from_descriptors(std::vector<FieldDescriptor> descriptors) {
  DescriptorStore store;
  store.descriptors_ = std::move(descriptors);
  std::sort(store.descriptors_.begin(), store.descriptors_.end(),
            [](const auto& a, const auto& b) {
              if (a.table != b.table) return a.table < b.table;
              return a.field < b.field;
            });
  return store;
}

void DescriptorStore::save(const std::filesystem::path& file) const {
  io::atomic_write(file, to_json(descriptors_));
}

const FieldDescriptor* DescriptorStore::find(const FieldRef& ref) const {
  for (const auto& d : descriptors_) {
    if (strings::iequals(d.table, ref.table) && strings::iequals(d.field, ref.field)) return &d;
  }
  return nullptr;
}

}  // namespace metaforge::summarize
