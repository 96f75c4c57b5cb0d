#pragma once

#include <filesystem>
#include <memory>
#include <string>
#include <vector>

#include "metaforge/bird/bird.hpp"
#include "scripted_transport.hpp"

namespace metaforge::testing {

/// Locations of everything the tests consume. Deterministic generators
/// build the database fixtures; cassettes ship with the repository.
struct FixturePaths {
  std::filesystem::path root;

  std::filesystem::path bird_root() const { return root / "bird"; }
  std::filesystem::path california_db() const {
    return bird_root() / "california_schools" / "california_schools.sqlite";
  }
  std::filesystem::path stores_root() const { return root / "stores"; }
  std::filesystem::path california_stores() const {
    return stores_root() / "california_schools";
  }
  std::filesystem::path dev_replica_root() const { return root / "dev_replica"; }
  std::filesystem::path dev_log() const { return dev_replica_root() / "gold_log.jsonl"; }
  std::filesystem::path fk_patch() const { return dev_replica_root() / "fk_patch.json"; }
  std::filesystem::path questions() const { return root / "questions.json"; }
  std::filesystem::path train_pairs() const { return root / "train_pairs.json"; }
  std::filesystem::path marker() const { return root / ".fixtures_ready"; }
};

/// Benchmark-layout california_schools replica reproducing the pinned
/// frpm.CDSCode statistics (9986 records, 0 NULLs, 9986 distinct, min/max,
/// fixed length 14, all numeric) and the district/zip content the linking
/// and lookup tests rely on.
void build_california_schools(const std::filesystem::path& sqlite_path);

/// database_description CSVs for the replica (cp1252 byte included to
/// exercise encoding cleanup).
void write_description_csvs(const std::filesystem::path& dir);

/// Schema-only replicas of the eleven dev databases plus a gold query log,
/// constructed so the join diff lands on exactly 107 observed / 27
/// undocumented-observed / 24 documented-unused pairs once the three broken
/// foreign keys are patched.
void build_dev_replica(const std::filesystem::path& replica_root,
                       const std::filesystem::path& log_path,
                       const std::filesystem::path& fk_patch_path);

/// Frozen expectations for the dev replica diff.
struct DevReplicaExpectations {
  std::size_t observed = 107;
  std::size_t documented_with_patch = 104;
  std::size_t documented_without_patch = 101;
  std::size_t undocumented_observed = 27;
  std::size_t undocumented_observed_without_patch = 30;
  std::size_t documented_unused = 24;
  std::size_t cross_name_observed = 7;
  std::size_t cross_name_undocumented = 4;
  std::size_t broken_fk_warnings = 3;
};

void write_questions_json(const std::filesystem::path& path);
void write_train_pairs_json(const std::filesystem::path& path);

/// The Fresno question and its scripted SQL (shared between fixtures and
/// linking tests).
extern const char* kFresnoQuestion;
extern const char* kFresnoFirstSql;    // constrains frpm.`County Name`
extern const char* kFresnoRevisedSql;  // constrains schools.District

/// Scripted transport wired with the california_schools scenario: the
/// paper-style CDSCode summary, the Fresno first/revised SQL, and scripted
/// generations for the ten fixture questions.
std::shared_ptr<ScriptedTransport> make_california_transport();

/// Builds every database fixture under `root` (idempotent via marker file).
/// Cassettes are not rebuilt here; they ship as committed fixtures.
void ensure_fixtures(const FixturePaths& paths);

/// Profiles, descriptors and indexes for california_schools, written to the
/// CLI store layout. The gateway supplies summaries and embeddings (replay
/// from the shipped cassette in tests; record with the scripted transport
/// in the fixture generator).
void build_stores(const FixturePaths& paths, llm::Gateway& gateway,
                  const llm::PromptSet& prompts);

/// ensure_fixtures + build_stores against the shipped cassette, once per
/// test-process tree (marker file).
void ensure_stores(const FixturePaths& paths);

/// Source-tree fixture locations baked in at compile time.
std::filesystem::path committed_fixture_dir();
std::filesystem::path prompts_dir();
std::filesystem::path build_fixture_root();

}  // namespace metaforge::testing
