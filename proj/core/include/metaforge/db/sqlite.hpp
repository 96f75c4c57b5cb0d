#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "metaforge/common.hpp"

struct sqlite3;
struct sqlite3_stmt;

namespace metaforge::db {

/// Canonical string form of one cell, or nullopt for NULL.
/// Integers render as decimal, reals in shortest round-trip form,
/// blobs as lowercase hex, text as stored.
using Cell = std::optional<std::string>;

class Statement {
 public:
  Statement(sqlite3* db, const std::string& sql);
  ~Statement();
  Statement(Statement&&) noexcept;
  Statement& operator=(Statement&&) = delete;
  Statement(const Statement&) = delete;
  Statement& operator=(const Statement&) = delete;

  /// Advance to the next row; false at end.
  bool step();
  int column_count() const;
  Cell column(int index) const;
  std::string column_name(int index) const;

 private:
  sqlite3* db_ = nullptr;
  sqlite3_stmt* stmt_ = nullptr;
};

struct ColumnInfo {
  std::string name;
  std::string declared_type;
  bool not_null = false;
  bool primary_key = false;
};

struct ForeignKeyRow {
  std::string child_table;
  std::string child_column;
  std::string parent_table;
  std::string parent_column;  // empty when the schema omitted it
};

class Database {
 public:
  /// Opens read-only by default; set writable for fixture construction.
  explicit Database(const std::filesystem::path& path, bool writable = false);
  ~Database();
  Database(Database&&) noexcept;
  Database(const Database&) = delete;
  Database& operator=(const Database&) = delete;
  Database& operator=(Database&&) = delete;

  Statement prepare(const std::string& sql) const;
  void exec(const std::string& sql);

  std::vector<std::string> table_names() const;
  bool has_table(const std::string& table) const;
  std::vector<ColumnInfo> columns(const std::string& table) const;
  std::vector<ForeignKeyRow> foreign_keys(const std::string& table) const;

  /// table -> declared column names, for the SQL resolver.
  std::map<std::string, std::vector<std::string>> schema_map() const;

  /// Runs a query with a wall-clock timeout; rows come back as canonical
  /// cells. Throws Error(parse/io) on SQLite errors, Error(io) on timeout.
  std::vector<std::vector<Cell>> query_all(const std::string& sql,
                                           std::int64_t timeout_ms = 30000) const;

  sqlite3* raw() const { return db_; }

 private:
  sqlite3* db_ = nullptr;
};

/// `"name"` with doubled inner quotes; safe for any table/column name.
std::string quote_sql_identifier(std::string_view name);

}  // namespace metaforge::db
