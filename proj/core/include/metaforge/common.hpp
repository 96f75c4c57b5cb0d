#pragma once

#include <compare>
#include <stdexcept>
#include <string>
#include <string_view>

namespace metaforge {

enum class ErrorKind {
  not_found,
  incompatible_sketch,
  cassette_miss,
  transport,
  config,
  parse,
  resolution,
  ambiguity,
  summarization_failed,
  masking_failed,
  generation_failed,
  linking_failed,
  vote,
  io,
};

std::string_view to_string(ErrorKind kind);

/// Exception carrying a machine-readable kind next to the human message.
class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& message)
      : std::runtime_error(std::string(to_string(kind)) + ": " + message), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

/// A column addressed as table.field. Comparisons are case-sensitive on the
/// declared spelling; callers normalize before comparing across sources.
struct FieldRef {
  std::string table;
  std::string field;

  auto operator<=>(const FieldRef&) const = default;

  /// "table.field" with back-quotes around parts that are not plain identifiers.
  std::string qualified() const;
  /// "table.field" without quoting, lowercased; used as a normalization key.
  std::string key() const;
};

/// True when an identifier can appear bare in SQL and in rendered contexts.
bool is_plain_identifier(std::string_view ident);

/// Back-quotes the identifier when needed.
std::string quote_identifier(std::string_view ident);

}  // namespace metaforge
