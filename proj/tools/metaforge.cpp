// metaforge: database profiling, LLM field summaries, schema linking,
// query-log mining, and text-to-SQL generation over SQLite databases.

#include <atomic>
#include <filesystem>
#include <iostream>
#include <thread>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "metaforge/bird/bird.hpp"
#include "metaforge/gen/pipeline.hpp"
#include "metaforge/index/semantic.hpp"
#include "metaforge/index/value_index.hpp"
#include "metaforge/link/linker.hpp"
#include "metaforge/llm/gateway.hpp"
#include "metaforge/llm/prompts.hpp"
#include "metaforge/profile/profile.hpp"
#include "metaforge/sql/features.hpp"
#include "metaforge/sql/joins.hpp"
#include "metaforge/sql2text/sql2text.hpp"
#include "metaforge/summarize/summarizer.hpp"
#include "metaforge/util/io.hpp"
#include "metaforge/util/strings.hpp"

namespace mf = metaforge;
using ordered_json = nlohmann::ordered_json;

namespace {

struct PipelineConfig {
  std::filesystem::path prompts_dir = "prompts";
  std::filesystem::path cassette_path;
  std::string cassette_mode = "replay";
  mf::llm::HttpTransportConfig llm;
  int max_in_flight = 4;
  std::int64_t seed = 0;
  int candidates = 3;
  int max_retry = 3;
  std::size_t few_shot = 8;
  std::size_t focused_top_m = 10;
  double min_similarity = 0.5;
  bool use_hints = true;
  std::int64_t execution_timeout_ms = 30000;
  int workers = 4;
  std::uint32_t profile_k = 256;
  std::uint32_t profile_top_k = 10;
  std::size_t index_n = 10000;
};

PipelineConfig load_config(const std::filesystem::path& path) {
  PipelineConfig cfg;
  if (path.empty()) return cfg;
  auto j = ordered_json::parse(mf::io::read_file(path));
  if (j.contains("prompts_dir")) cfg.prompts_dir = j.at("prompts_dir").get<std::string>();
  if (j.contains("cassette")) {
    cfg.cassette_path = j.at("cassette").value("path", "");
    cfg.cassette_mode = j.at("cassette").value("mode", "replay");
  }
  if (j.contains("llm")) {
    const auto& l = j.at("llm");
    cfg.llm.endpoint = l.value("endpoint", "");
    cfg.llm.chat_model = l.value("chat_model", "");
    cfg.llm.embed_model = l.value("embed_model", "");
    cfg.llm.api_key_env = l.value("api_key_env", "METAFORGE_API_KEY");
    cfg.max_in_flight = l.value("max_in_flight", 4);
  }
  cfg.seed = j.value("seed", 0);
  cfg.candidates = j.value("candidates", 3);
  cfg.max_retry = j.value("max_retry", 3);
  cfg.few_shot = j.value("few_shot", 8);
  cfg.focused_top_m = j.value("focused_top_m", 10);
  cfg.min_similarity = j.value("min_similarity", 0.5);
  cfg.use_hints = j.value("use_hints", true);
  cfg.execution_timeout_ms = j.value("execution_timeout_ms", 30000);
  cfg.workers = j.value("workers", 4);
  cfg.profile_k = j.value("profile_k", 256);
  cfg.profile_top_k = j.value("profile_top_k", 10);
  cfg.index_n = j.value("index_n", 10000);
  return cfg;
}

mf::llm::Gateway make_gateway(const PipelineConfig& cfg) {
  if (cfg.cassette_path.empty()) {
    throw mf::Error(mf::ErrorKind::config,
                    "no cassette configured; set cassette.path in the config file");
  }
  auto mode = mf::llm::cassette_mode_from_string(cfg.cassette_mode);
  auto cassette = std::make_shared<mf::llm::Cassette>(
      mf::llm::Cassette::load(cfg.cassette_path, mode));
  std::shared_ptr<mf::llm::ChatTransport> transport;
  if (mode != mf::llm::CassetteMode::replay) {
    transport = mf::llm::make_http_transport(cfg.llm);
  }
  mf::llm::GatewayConfig gw_cfg;
  gw_cfg.max_in_flight = cfg.max_in_flight;
  return mf::llm::Gateway(cassette, transport, gw_cfg);
}

mf::bird::LoadedStores load_stores_cli(const std::filesystem::path& base) {
  return mf::bird::load_stores(mf::bird::StorePaths{base});
}

int cmd_profile(const PipelineConfig& cfg, const std::string& db_path,
                const std::string& out_dir) {
  mf::db::Database db(db_path);
  mf::profile::ProfileConfig pc;
  pc.k = cfg.profile_k;
  pc.top_k = cfg.profile_top_k;
  auto tables = db.table_names();
  std::vector<mf::profile::TableProfile> profiles(tables.size());
  mf::bird::parallel_for(tables.size(), cfg.workers, [&](std::size_t i) {
    mf::db::Database conn(db_path);
    profiles[i] = mf::profile::profile_table(conn, tables[i], pc);
  });
  mf::profile::ProfileStore store;
  for (auto& p : profiles) {
    for (const auto& warning : p.warnings) std::cerr << "warning: " << warning << "\n";
    store.put(std::move(p));
  }
  store.save(out_dir);
  std::cout << "profiled " << tables.size() << " tables into " << out_dir << "\n";
  return 0;
}

int cmd_summarize(const PipelineConfig& cfg, const std::string& db_path,
                  const std::string& profiles_dir, const std::string& descriptions_dir,
                  const std::string& out_file) {
  mf::db::Database db(db_path);
  auto profiles = mf::profile::ProfileStore::load(profiles_dir);
  auto prompts = mf::llm::PromptSet::load(cfg.prompts_dir);
  auto gateway = make_gateway(cfg);
  std::optional<std::filesystem::path> csv_dir;
  if (!descriptions_dir.empty()) csv_dir = descriptions_dir;
  auto descriptors = mf::summarize::build_descriptors(db, profiles, csv_dir, gateway, prompts);
  mf::io::atomic_write(out_file, mf::summarize::to_json(descriptors));
  std::cout << "wrote " << descriptors.size() << " descriptors to " << out_file << "\n";
  return 0;
}

int cmd_index(const PipelineConfig& cfg, const std::string& db_path,
              const std::string& descriptors_file, const std::string& out_dir,
              const std::string& train_file) {
  mf::db::Database db(db_path);
  auto descriptors = mf::summarize::DescriptorStore::load(descriptors_file);
  auto prompts = mf::llm::PromptSet::load(cfg.prompts_dir);
  auto gateway = make_gateway(cfg);
  mf::bird::StorePaths paths{out_dir};
  std::filesystem::create_directories(paths.base);

  mf::index::IndexConfig ic;
  ic.n = cfg.index_n;
  ic.min_similarity = cfg.min_similarity;
  std::string lines;
  for (const auto& table : db.table_names()) {
    for (const auto& col : db.columns(table)) {
      auto index = mf::index::build_value_index(db, {table, col.name}, ic);
      lines += mf::index::to_json(index);
    }
  }
  mf::io::atomic_write(paths.value_indexes(), lines);

  std::vector<std::pair<mf::FieldRef, std::string>> summaries;
  for (const auto& d : descriptors.all()) {
    if (d.long_summary) summaries.emplace_back(d.ref(), *d.long_summary);
  }
  auto semantic = mf::index::build_semantic_index(summaries, gateway);
  mf::io::atomic_write(paths.semantic(), mf::index::to_json(semantic));

  if (!train_file.empty()) {
    auto j = ordered_json::parse(mf::io::read_file(train_file));
    std::vector<std::pair<std::string, std::string>> pairs;
    for (const auto& entry : j) {
      pairs.emplace_back(entry.at("question").get<std::string>(),
                         entry.at("SQL").get<std::string>());
    }
    auto few_shot = mf::index::build_few_shot_index(pairs, gateway, prompts);
    mf::io::atomic_write(paths.few_shot(), mf::index::to_json(few_shot));
  }
  std::cout << "indexes written to " << out_dir << "\n";
  return 0;
}

int cmd_link(const PipelineConfig& cfg, const std::string& db_path, const std::string& stores_dir,
             const std::string& question, const std::string& hint, bool no_hints,
             const std::string& out_file) {
  mf::db::Database db(db_path);
  auto stores = load_stores_cli(stores_dir);
  auto prompts = mf::llm::PromptSet::load(cfg.prompts_dir);
  auto gateway = make_gateway(cfg);
  auto link_stores = mf::bird::make_link_stores(stores, db, cfg.focused_top_m, cfg.min_similarity);

  mf::link::LinkRequest req;
  req.question = question;
  if (!hint.empty() && !no_hints && cfg.use_hints) req.oracle_hint = hint;
  req.max_retry = cfg.max_retry;
  req.seed = cfg.seed;
  auto result = mf::link::link_schema(req, link_stores, gateway, prompts);
  mf::io::atomic_write(out_file, mf::link::to_json(result));
  std::cout << "linked " << result.fields.size() << " fields; result in " << out_file << "\n";
  return 0;
}

int cmd_generate(const PipelineConfig& cfg, const std::string& db_path,
                 const std::string& stores_dir, const std::string& question,
                 const std::string& hint, bool no_hints, int candidates, std::int64_t seed,
                 const std::string& out_file) {
  mf::db::Database db(db_path);
  auto stores = load_stores_cli(stores_dir);
  auto prompts = mf::llm::PromptSet::load(cfg.prompts_dir);
  auto gateway = make_gateway(cfg);
  auto link_stores = mf::bird::make_link_stores(stores, db, cfg.focused_top_m, cfg.min_similarity);

  mf::link::LinkRequest req;
  req.question = question;
  if (!hint.empty() && !no_hints && cfg.use_hints) req.oracle_hint = hint;
  req.max_retry = cfg.max_retry;
  req.seed = seed;
  auto link = mf::link::link_schema(req, link_stores, gateway, prompts);

  std::vector<std::pair<std::string, std::string>> few_shot;
  mf::bird::StorePaths paths{stores_dir};
  if (std::filesystem::exists(paths.few_shot())) {
    auto index = mf::index::few_shot_index_from_json(mf::io::read_file(paths.few_shot()));
    few_shot = mf::index::find_few_shot(question, index, gateway, prompts, cfg.few_shot);
  }

  mf::gen::GenerateConfig gen_cfg;
  gen_cfg.candidates = candidates;
  gen_cfg.seed = seed;
  gen_cfg.execution_timeout_ms = cfg.execution_timeout_ms;
  auto candidate_list =
      mf::gen::generate_candidates(question, req.oracle_hint, link, few_shot,
                                   stores.descriptors, gateway, prompts, db, &stores.profiles,
                                   gen_cfg, link_stores.fk_pairs);
  auto chosen_index = mf::gen::majority_vote_index(candidate_list, db, seed,
                                                   cfg.execution_timeout_ms);

  ordered_json j;
  j["question"] = question;
  j["chosen"] = candidate_list[chosen_index].sql;
  ordered_json arr = ordered_json::array();
  for (const auto& c : candidate_list) {
    ordered_json cj;
    cj["sql"] = c.sql;
    cj["seed"] = c.seed;
    cj["parse_ok"] = c.parse_ok;
    cj["correction_rounds"] = c.correction_rounds;
    ordered_json flags = ordered_json::array();
    for (const auto& flag : c.lint_flags) {
      flags.push_back(std::string(mf::gen::to_string(flag.rule)) + "@" + flag.location);
    }
    cj["lint_flags"] = std::move(flags);
    cj["failed"] = c.failed;
    arr.push_back(std::move(cj));
  }
  j["candidates"] = std::move(arr);
  mf::io::atomic_write(out_file, j.dump(2) + "\n");
  std::cout << "chose: " << candidate_list[chosen_index].sql << "\n";
  return 0;
}

struct LogAnalysis {
  std::vector<mf::bird::QueryLogEntry> entries;
  std::vector<std::optional<mf::sql::QueryFeatures>> features;  // null on failure
  std::vector<std::string> errors;
};

LogAnalysis analyze_log_entries(const std::vector<mf::bird::QueryLogEntry>& entries,
                                const std::function<mf::sql::SchemaMap(const std::string&)>&
                                    schema_for_db,
                                int workers) {
  LogAnalysis analysis;
  analysis.entries = entries;
  analysis.features.resize(entries.size());
  std::vector<std::string> errors(entries.size());
  mf::bird::parallel_for(entries.size(), workers, [&](std::size_t i) {
    try {
      auto schema = schema_for_db(entries[i].db_id);
      auto ast = mf::sql::parse_sql(entries[i].sql);
      analysis.features[i] = mf::sql::extract_features(ast, schema);
    } catch (const std::exception& e) {
      errors[i] = entries[i].id + ": " + e.what();
    }
  });
  for (auto& e : errors) {
    if (!e.empty()) analysis.errors.push_back(std::move(e));
  }
  return analysis;
}

std::function<mf::sql::SchemaMap(const std::string&)> schema_provider(
    const std::string& db_path, const std::string& bird_root) {
  if (!bird_root.empty()) {
    auto cache = std::make_shared<std::map<std::string, mf::sql::SchemaMap>>();
    auto mutex = std::make_shared<std::mutex>();
    mf::bird::Layout layout{bird_root};
    return [cache, mutex, layout](const std::string& db_id) {
      std::lock_guard lock(*mutex);
      auto it = cache->find(db_id);
      if (it != cache->end()) return it->second;
      mf::db::Database db(layout.database_path(db_id));
      auto schema = db.schema_map();
      (*cache)[db_id] = schema;
      return schema;
    };
  }
  mf::db::Database db(db_path);
  auto schema = std::make_shared<mf::sql::SchemaMap>(db.schema_map());
  return [schema](const std::string&) { return *schema; };
}

int cmd_analyze_log(const PipelineConfig& cfg, const std::string& db_path,
                    const std::string& bird_root, const std::string& log_file,
                    const std::string& out_file) {
  auto entries = mf::bird::load_query_log(log_file);
  auto analysis = analyze_log_entries(entries, schema_provider(db_path, bird_root), cfg.workers);
  std::string lines;
  for (std::size_t i = 0; i < analysis.entries.size(); ++i) {
    if (!analysis.features[i]) continue;
    ordered_json j = ordered_json::parse(mf::sql::to_json(*analysis.features[i]));
    ordered_json row;
    row["id"] = analysis.entries[i].id;
    if (!analysis.entries[i].db_id.empty()) row["db_id"] = analysis.entries[i].db_id;
    row["features"] = std::move(j);
    lines += row.dump() + "\n";
  }
  mf::io::atomic_write(out_file, lines);
  for (const auto& error : analysis.errors) std::cerr << "skipped " << error << "\n";
  std::cout << "analyzed " << (analysis.entries.size() - analysis.errors.size()) << "/"
            << analysis.entries.size() << " queries into " << out_file << "\n";
  return 0;
}

int cmd_diff_joins(const PipelineConfig& cfg, const std::string& db_path,
                   const std::string& bird_root, const std::string& log_file,
                   const std::string& fk_patch_file, const std::string& out_file,
                   bool print_table) {
  auto entries = mf::bird::load_query_log(log_file);
  auto analysis = analyze_log_entries(entries, schema_provider(db_path, bird_root), cfg.workers);

  std::set<std::string> documented;
  std::vector<std::string> fk_warnings;
  bool labeled = !bird_root.empty();
  if (labeled) {
    mf::bird::Layout layout{bird_root};
    for (const auto& db_id : layout.database_ids()) {
      mf::db::Database db(layout.database_path(db_id));
      auto fks = mf::sql::extract_documented_fks(db);
      for (const auto& pair : fks.pairs) {
        auto eq = pair.find('=');
        documented.insert(mf::sql::normalize_join_pair(db_id + "." + pair.substr(0, eq),
                                                       db_id + "." + pair.substr(eq + 1)));
      }
      for (const auto& warning : fks.warnings) fk_warnings.push_back(db_id + ": " + warning);
    }
  } else {
    mf::db::Database db(db_path);
    auto fks = mf::sql::extract_documented_fks(db);
    documented = fks.pairs;
    fk_warnings = fks.warnings;
  }
  if (!fk_patch_file.empty()) {
    for (const auto& pair : mf::bird::load_fk_patch(fk_patch_file)) documented.insert(pair);
  }

  mf::sql::JoinDiff diff;
  if (labeled) {
    std::vector<std::pair<std::string, const mf::sql::QueryFeatures*>> log;
    for (std::size_t i = 0; i < analysis.entries.size(); ++i) {
      if (analysis.features[i]) log.emplace_back(analysis.entries[i].db_id,
                                                 &*analysis.features[i]);
    }
    diff = mf::sql::diff_join_constraints_labeled(log, documented);
  } else {
    std::vector<mf::sql::QueryFeatures> log;
    for (const auto& f : analysis.features) {
      if (f) log.push_back(*f);
    }
    diff = mf::sql::diff_join_constraints(log, documented);
  }

  ordered_json j;
  j["observed_count"] = diff.observed.size();
  j["documented_count"] = diff.documented.size();
  j["undocumented_observed_count"] = diff.undocumented_observed.size();
  j["documented_unused_count"] = diff.documented_unused.size();
  j["cross_name_count"] = diff.cross_name_count;
  j["undocumented_cross_name_count"] = mf::sql::count_cross_name(diff.undocumented_observed);
  j["observed"] = diff.observed;
  j["undocumented_observed"] = diff.undocumented_observed;
  j["documented_unused"] = diff.documented_unused;
  j["fk_warnings"] = fk_warnings;
  mf::io::atomic_write(out_file, j.dump(2) + "\n");

  if (print_table) {
    std::cout << "observed equality pairs:   " << diff.observed.size() << "\n"
              << "documented pairs:          " << diff.documented.size() << "\n"
              << "undocumented observed:     " << diff.undocumented_observed.size() << "\n"
              << "documented never used:     " << diff.documented_unused.size() << "\n";
    std::cout << "\nundocumented observed pairs:\n";
    for (const auto& pair : diff.undocumented_observed) std::cout << "  " << pair << "\n";
    std::cout << "\ndocumented unused pairs:\n";
    for (const auto& pair : diff.documented_unused) std::cout << "  " << pair << "\n";
  } else {
    std::cout << "observed=" << diff.observed.size()
              << " undocumented_observed=" << diff.undocumented_observed.size()
              << " documented_unused=" << diff.documented_unused.size() << "\n";
  }
  for (const auto& warning : fk_warnings) std::cerr << "fk warning: " << warning << "\n";
  return 0;
}

mf::summarize::MetadataKind metadata_variant_from_cli(const std::string& name) {
  // Table variants: base (no metadata), bird (SME only), llm (short
  // summaries), fused (SME + long summaries).
  if (name == "base") return mf::summarize::MetadataKind::none;
  if (name == "bird") return mf::summarize::MetadataKind::sme_only;
  if (name == "llm") return mf::summarize::MetadataKind::minimal;
  if (name == "fused") return mf::summarize::MetadataKind::full;
  throw mf::Error(mf::ErrorKind::config, "unknown metadata variant: " + name);
}

int cmd_sql2text(const PipelineConfig& cfg, const std::string& db_path,
                 const std::string& stores_dir, const std::string& sql_file,
                 const std::string& metadata, const std::string& out_file) {
  mf::db::Database db(db_path);
  auto schema = db.schema_map();
  auto descriptors = mf::summarize::DescriptorStore::load(mf::bird::StorePaths{stores_dir}.descriptors());
  auto prompts = mf::llm::PromptSet::load(cfg.prompts_dir);
  auto gateway = make_gateway(cfg);
  auto variant = metadata_variant_from_cli(metadata);

  auto entries = mf::bird::load_query_log(sql_file);
  std::string lines;
  for (const auto& entry : entries) {
    ordered_json row;
    row["id"] = entry.id;
    row["sql"] = entry.sql;
    try {
      auto generated = mf::sql2text::generate_questions(entry.sql, schema, descriptors,
                                                        gateway, prompts, variant);
      row["long_question"] = generated.long_question;
      row["short_question"] = generated.short_question;
      ordered_json fields = ordered_json::array();
      for (const auto& f : generated.focused_fields) fields.push_back(f.qualified());
      row["focused_fields"] = std::move(fields);
      row["variant"] = metadata;
    } catch (const std::exception& e) {
      row["error"] = e.what();
    }
    lines += row.dump() + "\n";
  }
  mf::io::atomic_write(out_file, lines);
  std::cout << "generated questions for " << entries.size() << " queries into " << out_file
            << "\n";
  return 0;
}

int cmd_eval(const PipelineConfig& cfg, const std::string& bird_root,
             const std::string& stores_root, const std::string& questions_file,
             const std::string& schema_mode_name, bool no_hints, const std::string& out_dir) {
  auto questions = mf::bird::load_questions(questions_file);
  auto prompts = mf::llm::PromptSet::load(cfg.prompts_dir);
  auto gateway = make_gateway(cfg);

  mf::bird::EvalConfig eval_cfg;
  eval_cfg.layout = mf::bird::Layout{bird_root};
  eval_cfg.stores_root = stores_root;
  eval_cfg.schema_mode = mf::bird::schema_mode_from_string(schema_mode_name);
  eval_cfg.use_hints = cfg.use_hints && !no_hints;
  eval_cfg.candidates = cfg.candidates;
  eval_cfg.max_retry = cfg.max_retry;
  eval_cfg.seed = cfg.seed;
  eval_cfg.few_shot = cfg.few_shot;
  eval_cfg.focused_top_m = cfg.focused_top_m;
  eval_cfg.min_similarity = cfg.min_similarity;
  eval_cfg.execution_timeout_ms = cfg.execution_timeout_ms;
  eval_cfg.workers = cfg.workers;

  auto output = mf::bird::run_eval(eval_cfg, questions, gateway, prompts);
  mf::bird::write_eval_outputs(out_dir, output);

  std::size_t matches = 0, failed = 0;
  for (const auto& row : output.rows) {
    if (row.match) ++matches;
  }
  for (std::size_t i = 0; i < output.failures.size(); ++i) {
    if (!output.failures[i].empty()) {
      std::cerr << "question " << questions[i].question_id << " failed: "
                << output.failures[i] << "\n";
      ++failed;
    }
  }
  std::cout << "accuracy " << matches << "/" << output.rows.size() << "; outputs in "
            << out_dir << "\n";
  return failed == output.rows.size() && !output.rows.empty() ? 1 : 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"metadata extraction and text-to-SQL toolkit"};
  app.require_subcommand(1);

  std::string config_path;
  app.add_option("--config", config_path, "pipeline config JSON")->envname("METAFORGE_CONFIG");

  std::string db_path, out_path, profiles_dir, descriptions_dir, stores_dir, question, hint,
      train_file, bird_root, log_file, fk_patch, metadata = "fused", sql_file, questions_file,
      schema_mode = "linked";
  bool no_hints = false, print_table = false;
  int candidates = 3;
  std::int64_t seed = 0;

  auto* profile = app.add_subcommand("profile", "profile all tables of a database");
  profile->add_option("--db", db_path)->required();
  profile->add_option("--out", out_path)->required();

  auto* summarize = app.add_subcommand("summarize", "LLM field summaries from profiles");
  summarize->add_option("--db", db_path)->required();
  summarize->add_option("--profiles", profiles_dir)->required();
  summarize->add_option("--descriptions", descriptions_dir);
  summarize->add_option("--out", out_path)->required();

  auto* index_cmd = app.add_subcommand("index", "build value/semantic/few-shot indexes");
  index_cmd->add_option("--db", db_path)->required();
  index_cmd->add_option("--descriptors", profiles_dir)->required();
  index_cmd->add_option("--out", out_path)->required();
  index_cmd->add_option("--train", train_file);

  auto* link_cmd = app.add_subcommand("link", "schema-link a question");
  link_cmd->add_option("--db", db_path)->required();
  link_cmd->add_option("--stores", stores_dir)->required();
  link_cmd->add_option("--question", question)->required();
  link_cmd->add_option("--hint", hint);
  link_cmd->add_flag("--no-hints", no_hints);
  link_cmd->add_option("--out", out_path)->required();

  auto* generate = app.add_subcommand("generate", "generate SQL for a question");
  generate->add_option("--db", db_path)->required();
  generate->add_option("--stores", stores_dir)->required();
  generate->add_option("--question", question)->required();
  generate->add_option("--hint", hint);
  generate->add_flag("--no-hints", no_hints);
  generate->add_option("--candidates", candidates);
  generate->add_option("--seed", seed);
  generate->add_option("--out", out_path)->required();

  auto* analyze = app.add_subcommand("analyze-log", "extract features from a query log");
  analyze->add_option("--db", db_path);
  analyze->add_option("--bird-root", bird_root);
  analyze->add_option("--log", log_file)->required();
  analyze->add_option("--out", out_path)->required();

  auto* diff = app.add_subcommand("diff-joins", "diff observed joins against documented FKs");
  diff->add_option("--db", db_path);
  diff->add_option("--bird-root", bird_root);
  diff->add_option("--log", log_file)->required();
  diff->add_option("--fk-patch", fk_patch);
  diff->add_option("--out", out_path)->required();
  diff->add_flag("--print-table", print_table);

  auto* sql2text_cmd = app.add_subcommand("sql2text", "generate questions from SQL");
  sql2text_cmd->add_option("--db", db_path)->required();
  sql2text_cmd->add_option("--stores", stores_dir)->required();
  sql2text_cmd->add_option("--sql-file", sql_file)->required();
  sql2text_cmd->add_option("--metadata", metadata)
      ->check(CLI::IsMember({"base", "bird", "llm", "fused"}));
  sql2text_cmd->add_option("--out", out_path)->required();

  auto* eval = app.add_subcommand("eval", "score generation against gold SQL");
  eval->add_option("--bird-root", bird_root)->required();
  eval->add_option("--stores", stores_dir)->required();
  eval->add_option("--questions", questions_file)->required();
  eval->add_option("--schema-mode", schema_mode)
      ->check(CLI::IsMember({"full", "linked", "perfect"}));
  eval->add_flag("--no-hints", no_hints);
  eval->add_option("--out-dir", out_path)->required();

  CLI11_PARSE(app, argc, argv);

  try {
    auto cfg = load_config(config_path);
    if (profile->parsed()) return cmd_profile(cfg, db_path, out_path);
    if (summarize->parsed())
      return cmd_summarize(cfg, db_path, profiles_dir, descriptions_dir, out_path);
    if (index_cmd->parsed())
      return cmd_index(cfg, db_path, profiles_dir, out_path, train_file);
    if (link_cmd->parsed())
      return cmd_link(cfg, db_path, stores_dir, question, hint, no_hints, out_path);
    if (generate->parsed())
      return cmd_generate(cfg, db_path, stores_dir, question, hint, no_hints, candidates, seed,
                          out_path);
    if (analyze->parsed())
      return cmd_analyze_log(cfg, db_path, bird_root, log_file, out_path);
    if (diff->parsed())
      return cmd_diff_joins(cfg, db_path, bird_root, log_file, fk_patch, out_path, print_table);
    if (sql2text_cmd->parsed())
      return cmd_sql2text(cfg, db_path, stores_dir, sql_file, metadata, out_path);
    if (eval->parsed())
      return cmd_eval(cfg, bird_root, stores_dir, questions_file, schema_mode, no_hints,
                      out_path);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
