#include "metaforge/bird/bird.hpp"

#include <algorithm>
#include <atomic>
#include <thread>

#include <nlohmann/json.hpp>

#include "metaforge/sql/resolve.hpp"
#include "metaforge/util/io.hpp"
#include "metaforge/util/strings.hpp"

namespace metaforge::bird {

using ordered_json = nlohmann::ordered_json;

std::filesystem::path Layout::database_path(const std::string& db_id) const {
  return root / db_id / (db_id + ".sqlite");
}

std::optional<std::filesystem::path> Layout::description_dir(const std::string& db_id) const {
  auto dir = root / db_id / "database_description";
  if (std::filesystem::is_directory(dir)) return dir;
  return std::nullopt;
}

std::vector<std::string> Layout::database_ids() const {
  std::vector<std::string> ids;
  if (!std::filesystem::is_directory(root)) return ids;
  for (const auto& entry : std::filesystem::directory_iterator(root)) {
    if (!entry.is_directory()) continue;
    auto id = entry.path().filename().string();
    if (std::filesystem::exists(database_path(id))) ids.push_back(id);
  }
  std::sort(ids.begin(), ids.end());
  return ids;
}

std::vector<Question> load_questions(const std::filesystem::path& file) {
  auto j = ordered_json::parse(io::read_file(file));
  std::vector<Question> questions;
  for (const auto& entry : j) {
    Question q;
    q.question_id = entry.value("question_id", static_cast<int>(questions.size()));
    q.db_id = entry.value("db_id", "");
    q.question = entry.value("question", "");
    q.evidence = entry.value("evidence", "");
    q.difficulty = entry.value("difficulty", "");
    if (entry.contains("SQL")) q.gold_sql = entry.at("SQL").get<std::string>();
    questions.push_back(std::move(q));
  }
  return questions;
}

SchemaMode schema_mode_from_string(std::string_view name) {
  if (name == "full") return SchemaMode::full;
  if (name == "linked") return SchemaMode::linked;
  if (name == "perfect") return SchemaMode::perfect;
  throw Error(ErrorKind::config, "unknown schema mode: " + std::string(name));
}

std::vector<QueryLogEntry> load_query_log(const std::filesystem::path& file) {
  std::vector<QueryLogEntry> entries;
  if (file.extension() == ".sql") {
    auto text = io::read_file(file);
    std::string statement;
    int counter = 0;
    auto flush = [&] {
      auto trimmed = strings::trim(statement);
      statement.clear();
      if (trimmed.empty()) return;
      QueryLogEntry entry;
      entry.id = "q" + std::to_string(++counter);
      entry.sql = trimmed;
      entries.push_back(std::move(entry));
    };
    bool in_string = false;
    for (std::size_t i = 0; i < text.size(); ++i) {
      char c = text[i];
      if (c == '\'') in_string = !in_string;
      if (c == ';' && !in_string) {
        flush();
      } else {
        statement += c;
      }
    }
    flush();
    return entries;
  }
  for (const auto& line : io::read_lines(file)) {
    if (strings::trim(line).empty()) continue;
    auto j = ordered_json::parse(line);
    QueryLogEntry entry;
    if (j.contains("id")) {
      if (j.at("id").is_number()) {
        entry.id = std::to_string(j.at("id").get<long long>());
      } else {
        entry.id = j.at("id").get<std::string>();
      }
    } else {
      entry.id = std::to_string(entries.size());
    }
    entry.db_id = j.value("db_id", "");
    entry.sql = j.at("sql").get<std::string>();
    entries.push_back(std::move(entry));
  }
  return entries;
}

std::set<std::string> load_fk_patch(const std::filesystem::path& file) {
  auto j = ordered_json::parse(io::read_file(file));
  std::set<std::string> pairs;
  for (const auto& entry : j) {
    auto db = entry.value("db", "");
    std::string left = entry.at("child_table").get<std::string>() + "." +
                       entry.at("child_field").get<std::string>();
    std::string right = entry.at("parent_table").get<std::string>() + "." +
                        entry.at("parent_field").get<std::string>();
    if (!db.empty()) {
      left = db + "." + left;
      right = db + "." + right;
    }
    pairs.insert(sql::normalize_join_pair(left, right));
  }
  return pairs;
}

bool execution_match(const db::Database& database, const std::string& gold_sql,
                     const std::string& predicted_sql, std::int64_t timeout_ms) {
  gen::ResultSet gold;
  try {
    gold = gen::execute_sql(database, gold_sql, timeout_ms);
  } catch (const Error&) {
    return false;  // a gold query that cannot run scores the row as a miss
  }
  try {
    auto predicted = gen::execute_sql(database, predicted_sql, timeout_ms);
    return gold.set_equal(predicted);
  } catch (const Error&) {
    return false;
  }
}

std::string predictions_to_json(const std::map<int, std::string>& predictions) {
  ordered_json j = ordered_json::object();
  for (const auto& [id, sql_text] : predictions) {
    j[std::to_string(id)] = sql_text;
  }
  return j.dump(2) + "\n";
}

[[noreturn]] static void missing_artifact(const std::string& what, const std::string& producer) {
  throw Error(ErrorKind::not_found,
              what + " not found; run `metaforge " + producer + "` first");
}

LoadedStores load_stores(const StorePaths& paths) {
  LoadedStores stores;
  if (!std::filesystem::is_directory(paths.profiles())) {
    missing_artifact("profile store " + paths.profiles().string(), "profile");
  }
  stores.profiles = profile::ProfileStore::load(paths.profiles());
  if (!std::filesystem::exists(paths.descriptors())) {
    missing_artifact("descriptor store " + paths.descriptors().string(), "summarize");
  }
  stores.descriptors = summarize::DescriptorStore::load(paths.descriptors());
  if (!std::filesystem::exists(paths.value_indexes())) {
    missing_artifact("value indexes " + paths.value_indexes().string(), "index");
  }
  for (const auto& line : io::read_lines(paths.value_indexes())) {
    if (strings::trim(line).empty()) continue;
    stores.value_indexes.push_back(index::value_index_from_json(line));
  }
  if (!std::filesystem::exists(paths.semantic())) {
    missing_artifact("semantic index " + paths.semantic().string(), "index");
  }
  stores.semantic = index::semantic_index_from_json(io::read_file(paths.semantic()));
  return stores;
}

link::LinkStores make_link_stores(const LoadedStores& stores, const db::Database& database,
                                  std::size_t focused_top_m, double min_similarity) {
  link::LinkStores link_stores;
  link_stores.descriptors = &stores.descriptors;
  link_stores.profiles = &stores.profiles;
  link_stores.value_indexes = &stores.value_indexes;
  link_stores.semantic = &stores.semantic;
  link_stores.schema = database.schema_map();
  link_stores.fk_pairs = sql::extract_documented_fks(database).pairs;
  link_stores.focused_top_m = focused_top_m;
  link_stores.literal_min_similarity = min_similarity;
  return link_stores;
}

link::LinkResult full_schema_link(const sql::SchemaMap& schema) {
  link::LinkResult result;
  for (const auto& [table, cols] : schema) {
    for (const auto& col : cols) result.fields.insert({table, col});
  }
  return result;
}

link::LinkResult perfect_schema_link(const std::string& gold_sql,
                                     const sql::SchemaMap& schema) {
  link::LinkResult result;
  auto ast = sql::parse_sql(gold_sql);
  sql::Resolution resolution(ast, schema);
  result.fields = resolution.fields_referenced();
  return result;
}

void parallel_for(std::size_t count, int workers, const std::function<void(std::size_t)>& fn) {
  if (workers <= 1 || count <= 1) {
    for (std::size_t i = 0; i < count; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::vector<std::thread> threads;
  int n = std::min<int>(workers, static_cast<int>(count));
  threads.reserve(static_cast<std::size_t>(n));
  for (int t = 0; t < n; ++t) {
    threads.emplace_back([&] {
      while (true) {
        std::size_t i = next.fetch_add(1);
        if (i >= count) break;
        fn(i);
      }
    });
  }
  for (auto& thread : threads) thread.join();
}

EvalOutput run_eval(const EvalConfig& config, const std::vector<Question>& questions,
                    llm::Gateway& gateway, const llm::PromptSet& prompts) {
  // Per-database stores, loaded once up front.
  std::map<std::string, LoadedStores> stores_by_db;
  std::map<std::string, index::FewShotIndex> few_shot_by_db;
  for (const auto& q : questions) {
    if (stores_by_db.count(q.db_id)) continue;
    StorePaths paths{config.stores_root / q.db_id};
    stores_by_db.emplace(q.db_id, load_stores(paths));
    if (std::filesystem::exists(paths.few_shot())) {
      few_shot_by_db[q.db_id] =
          index::few_shot_index_from_json(io::read_file(paths.few_shot()));
    }
  }

  EvalOutput output;
  output.rows.resize(questions.size());
  output.failures.resize(questions.size());

  parallel_for(questions.size(), config.workers, [&](std::size_t i) {
    const auto& q = questions[i];
    EvalRow row;
    row.question_id = q.question_id;
    row.gold_sql = q.gold_sql;
    row.difficulty = q.difficulty;
    try {
      db::Database database(config.layout.database_path(q.db_id));
      const auto& stores = stores_by_db.at(q.db_id);
      auto link_stores = make_link_stores(stores, database, config.focused_top_m,
                                          config.min_similarity);

      link::LinkResult linked;
      switch (config.schema_mode) {
        case SchemaMode::full:
          linked = full_schema_link(link_stores.schema);
          break;
        case SchemaMode::perfect:
          linked = perfect_schema_link(q.gold_sql, link_stores.schema);
          break;
        case SchemaMode::linked: {
          link::LinkRequest req;
          req.question = q.question;
          if (!q.evidence.empty() && config.use_hints) req.oracle_hint = q.evidence;
          req.max_retry = config.max_retry;
          req.seed = config.seed;
          linked = link::link_schema(req, link_stores, gateway, prompts);
          break;
        }
      }

      std::vector<std::pair<std::string, std::string>> few_shot;
      auto fs = few_shot_by_db.find(q.db_id);
      if (fs != few_shot_by_db.end()) {
        few_shot = index::find_few_shot(q.question, fs->second, gateway, prompts,
                                        config.few_shot);
      }

      std::optional<std::string> hint;
      if (!q.evidence.empty() && config.use_hints) hint = q.evidence;
      gen::GenerateConfig gen_cfg;
      gen_cfg.candidates = config.candidates;
      gen_cfg.seed = config.seed + q.question_id;
      gen_cfg.execution_timeout_ms = config.execution_timeout_ms;
      auto candidates = gen::generate_candidates(q.question, hint, linked, few_shot,
                                                 stores.descriptors, gateway, prompts,
                                                 database, &stores.profiles, gen_cfg,
                                                 link_stores.fk_pairs);
      auto chosen = gen::majority_vote_index(candidates, database, gen_cfg.seed,
                                             config.execution_timeout_ms);
      row.predicted_sql = candidates[chosen].sql;
      row.match = execution_match(database, q.gold_sql, row.predicted_sql,
                                  config.execution_timeout_ms);
    } catch (const std::exception& e) {
      output.failures[i] = e.what();
    }
    output.rows[i] = std::move(row);
  });

  for (std::size_t i = 0; i < questions.size(); ++i) {
    output.predictions[questions[i].question_id] = output.rows[i].predicted_sql;
  }
  return output;
}

void write_eval_outputs(const std::filesystem::path& out_dir, const EvalOutput& output) {
  std::filesystem::create_directories(out_dir);
  io::atomic_write(out_dir / "predictions.json", predictions_to_json(output.predictions));
  std::string row_lines;
  std::size_t matches = 0;
  for (const auto& row : output.rows) {
    ordered_json j;
    j["question_id"] = row.question_id;
    j["gold_sql"] = row.gold_sql;
    j["predicted_sql"] = row.predicted_sql;
    j["match"] = row.match;
    j["difficulty"] = row.difficulty;
    row_lines += j.dump() + "\n";
    if (row.match) ++matches;
  }
  io::atomic_write(out_dir / "eval_rows.jsonl", row_lines);
  ordered_json summary;
  summary["total"] = output.rows.size();
  summary["matches"] = matches;
  summary["accuracy"] =
      output.rows.empty() ? 0.0 : static_cast<double>(matches) / output.rows.size();
  io::atomic_write(out_dir / "summary.json", summary.dump(2) + "\n");
}

}  // namespace metaforge::bird
