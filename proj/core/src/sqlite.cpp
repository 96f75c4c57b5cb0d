#include "metaforge/db/sqlite.hpp"

#include <sqlite3.h>

#include <chrono>
#include <utility>

#include "metaforge/util/strings.hpp"

namespace metaforge::db {

namespace {

Cell cell_from_column(sqlite3_stmt* stmt, int index) {
  switch (sqlite3_column_type(stmt, index)) {
    case SQLITE_NULL:
      return std::nullopt;
    case SQLITE_INTEGER:
      return strings::canonical_int(sqlite3_column_int64(stmt, index));
    case SQLITE_FLOAT:
      return strings::canonical_real(sqlite3_column_double(stmt, index));
    case SQLITE_BLOB: {
      const void* data = sqlite3_column_blob(stmt, index);
      int n = sqlite3_column_bytes(stmt, index);
      return strings::hex_encode(std::string_view(static_cast<const char*>(data), n));
    }
    default: {
      const unsigned char* text = sqlite3_column_text(stmt, index);
      int n = sqlite3_column_bytes(stmt, index);
      return std::string(reinterpret_cast<const char*>(text), n);
    }
  }
}

}  // namespace

Statement::Statement(sqlite3* db, const std::string& sql) : db_(db) {
  int rc = sqlite3_prepare_v2(db, sql.c_str(), -1, &stmt_, nullptr);
  if (rc != SQLITE_OK) {
    throw Error(ErrorKind::parse,
                "sqlite prepare failed: " + std::string(sqlite3_errmsg(db)) + " in: " + sql);
  }
}

Statement::~Statement() {
  if (stmt_) sqlite3_finalize(stmt_);
}

Statement::Statement(Statement&& other) noexcept
    : db_(other.db_), stmt_(std::exchange(other.stmt_, nullptr)) {}

bool Statement::step() {
  int rc = sqlite3_step(stmt_);
  if (rc == SQLITE_ROW) return true;
  if (rc == SQLITE_DONE) return false;
  throw Error(ErrorKind::io, "sqlite step failed: " + std::string(sqlite3_errmsg(db_)));
}

int Statement::column_count() const { return sqlite3_column_count(stmt_); }

Cell Statement::column(int index) const { return cell_from_column(stmt_, index); }

std::string Statement::column_name(int index) const {
  const char* name = sqlite3_column_name(stmt_, index);
  return name ? name : "";
}

Database::Database(const std::filesystem::path& path, bool writable) {
  int flags = writable ? (SQLITE_OPEN_READWRITE | SQLITE_OPEN_CREATE) : SQLITE_OPEN_READONLY;
  int rc = sqlite3_open_v2(path.string().c_str(), &db_, flags, nullptr);
  if (rc != SQLITE_OK) {
    std::string msg = db_ ? sqlite3_errmsg(db_) : "open failed";
    if (db_) sqlite3_close(db_);
    db_ = nullptr;
    throw Error(ErrorKind::not_found, "cannot open database " + path.string() + ": " + msg);
  }
  sqlite3_extended_result_codes(db_, 1);
}

Database::~Database() {
  if (db_) sqlite3_close(db_);
}

Database::Database(Database&& other) noexcept : db_(std::exchange(other.db_, nullptr)) {}

Statement Database::prepare(const std::string& sql) const { return Statement(db_, sql); }

void Database::exec(const std::string& sql) {
  char* err = nullptr;
  if (sqlite3_exec(db_, sql.c_str(), nullptr, nullptr, &err) != SQLITE_OK) {
    std::string msg = err ? err : "exec failed";
    sqlite3_free(err);
    throw Error(ErrorKind::io, msg + " in: " + sql);
  }
}

std::vector<std::string> Database::table_names() const {
  std::vector<std::string> names;
  auto stmt = prepare(
      "SELECT name FROM sqlite_master WHERE type='table' "
      "AND name NOT LIKE 'sqlite_%' ORDER BY name");
  while (stmt.step()) names.push_back(*stmt.column(0));
  return names;
}

bool Database::has_table(const std::string& table) const {
  for (const auto& name : table_names()) {
    if (strings::iequals(name, table)) return true;
  }
  return false;
}

std::vector<ColumnInfo> Database::columns(const std::string& table) const {
  std::vector<ColumnInfo> cols;
  auto stmt = prepare("PRAGMA table_info(" + quote_sql_identifier(table) + ")");
  while (stmt.step()) {
    ColumnInfo info;
    info.name = stmt.column(1).value_or("");
    info.declared_type = stmt.column(2).value_or("");
    info.not_null = stmt.column(3).value_or("0") != "0";
    info.primary_key = stmt.column(5).value_or("0") != "0";
    cols.push_back(std::move(info));
  }
  return cols;
}

std::vector<ForeignKeyRow> Database::foreign_keys(const std::string& table) const {
  std::vector<ForeignKeyRow> fks;
  auto stmt = prepare("PRAGMA foreign_key_list(" + quote_sql_identifier(table) + ")");
  while (stmt.step()) {
    ForeignKeyRow row;
    row.child_table = table;
    row.parent_table = stmt.column(2).value_or("");
    row.child_column = stmt.column(3).value_or("");
    row.parent_column = stmt.column(4).value_or("");
    fks.push_back(std::move(row));
  }
  return fks;
}

std::map<std::string, std::vector<std::string>> Database::schema_map() const {
  std::map<std::string, std::vector<std::string>> schema;
  for (const auto& table : table_names()) {
    std::vector<std::string> names;
    for (const auto& col : columns(table)) names.push_back(col.name);
    schema[table] = std::move(names);
  }
  return schema;
}

namespace {
struct Deadline {
  std::chrono::steady_clock::time_point end;
};
int progress_callback(void* ctx) {
  auto* deadline = static_cast<Deadline*>(ctx);
  return std::chrono::steady_clock::now() > deadline->end ? 1 : 0;
}
}  // namespace

std::vector<std::vector<Cell>> Database::query_all(const std::string& sql,
                                                   std::int64_t timeout_ms) const {
  Deadline deadline{std::chrono::steady_clock::now() + std::chrono::milliseconds(timeout_ms)};
  sqlite3_progress_handler(db_, 1000, progress_callback, &deadline);
  std::vector<std::vector<Cell>> rows;
  try {
    auto stmt = prepare(sql);
    while (stmt.step()) {
      std::vector<Cell> row;
      int n = stmt.column_count();
      row.reserve(static_cast<std::size_t>(n));
      for (int i = 0; i < n; ++i) row.push_back(stmt.column(i));
      rows.push_back(std::move(row));
    }
  } catch (...) {
    sqlite3_progress_handler(db_, 0, nullptr, nullptr);
    throw;
  }
  sqlite3_progress_handler(db_, 0, nullptr, nullptr);
  return rows;
}

std::string quote_sql_identifier(std::string_view name) {
  std::string out = "\"";
  for (char c : name) {
    out += c;
    if (c == '"') out += '"';
  }
  out += '"';
  return out;
}

}  // namespace metaforge::db
