#include "metaforge/util/strings.hpp"

#include <array>
#include <cctype>
#include <charconv>
#include <cstdio>

#include "metaforge/common.hpp"

namespace metaforge {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::not_found: return "not-found";
    case ErrorKind::incompatible_sketch: return "incompatible-sketch";
    case ErrorKind::cassette_miss: return "cassette-miss";
    case ErrorKind::transport: return "transport";
    case ErrorKind::config: return "config";
    case ErrorKind::parse: return "parse";
    case ErrorKind::resolution: return "resolution";
    case ErrorKind::ambiguity: return "ambiguity";
    case ErrorKind::summarization_failed: return "summarization-failed";
    case ErrorKind::masking_failed: return "masking-failed";
    case ErrorKind::generation_failed: return "generation-failed";
    case ErrorKind::linking_failed: return "linking-failed";
    case ErrorKind::vote: return "vote";
    case ErrorKind::io: return "io";
  }
  return "error";
}

bool is_plain_identifier(std::string_view ident) {
  if (ident.empty()) return false;
  if (!(std::isalpha(static_cast<unsigned char>(ident[0])) || ident[0] == '_')) return false;
  for (char c : ident) {
    if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '_')) return false;
  }
  return true;
}

std::string quote_identifier(std::string_view ident) {
  if (is_plain_identifier(ident)) return std::string(ident);
  std::string out = "`";
  for (char c : ident) {
    out += c;
    if (c == '`') out += '`';
  }
  out += '`';
  return out;
}

std::string FieldRef::qualified() const {
  return quote_identifier(table) + "." + quote_identifier(field);
}

std::string FieldRef::key() const {
  return strings::to_lower(table) + "." + strings::to_lower(field);
}

}  // namespace metaforge

namespace metaforge::strings {

std::string canonical_real(double value) {
  std::array<char, 64> buf{};
  auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), value);
  if (ec != std::errc()) return "0";
  return std::string(buf.data(), ptr);
}

std::string canonical_int(long long value) {
  std::array<char, 32> buf{};
  auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), value);
  (void)ec;
  return std::string(buf.data(), ptr);
}

std::string hex_encode(std::string_view bytes) {
  static const char* digits = "0123456789abcdef";
  std::string out;
  out.reserve(bytes.size() * 2);
  for (unsigned char b : bytes) {
    out += digits[b >> 4];
    out += digits[b & 0xf];
  }
  return out;
}

std::string to_lower(std::string_view text) {
  std::string out(text);
  for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

bool iequals(std::string_view a, std::string_view b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (std::tolower(static_cast<unsigned char>(a[i])) !=
        std::tolower(static_cast<unsigned char>(b[i])))
      return false;
  }
  return true;
}

std::string normalize_whitespace(std::string_view text) {
  std::string out;
  out.reserve(text.size());
  bool in_space = true;  // trims leading space
  for (char c : text) {
    if (std::isspace(static_cast<unsigned char>(c))) {
      if (!in_space) out += ' ';
      in_space = true;
    } else {
      out += c;
      in_space = false;
    }
  }
  while (!out.empty() && out.back() == ' ') out.pop_back();
  return out;
}

std::string normalize_for_match(std::string_view text) {
  return to_lower(normalize_whitespace(text));
}

bool looks_numeric(std::string_view text) {
  std::size_t i = 0;
  if (i < text.size() && (text[i] == '+' || text[i] == '-')) ++i;
  std::size_t digits = 0;
  while (i < text.size() && std::isdigit(static_cast<unsigned char>(text[i]))) ++i, ++digits;
  if (digits == 0) return false;
  if (i == text.size()) return true;
  if (text[i] != '.') return false;
  ++i;
  std::size_t frac = 0;
  while (i < text.size() && std::isdigit(static_cast<unsigned char>(text[i]))) ++i, ++frac;
  return frac > 0 && i == text.size();
}

std::string trim(std::string_view text) {
  std::size_t b = 0, e = text.size();
  while (b < e && std::isspace(static_cast<unsigned char>(text[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(text[e - 1]))) --e;
  return std::string(text.substr(b, e - b));
}

std::vector<std::string> split_whitespace(std::string_view text) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : text) {
    if (std::isspace(static_cast<unsigned char>(c))) {
      if (!cur.empty()) out.push_back(std::move(cur)), cur.clear();
    } else {
      cur += c;
    }
  }
  if (!cur.empty()) out.push_back(std::move(cur));
  return out;
}

bool starts_with(std::string_view text, std::string_view prefix) {
  return text.size() >= prefix.size() && text.substr(0, prefix.size()) == prefix;
}

std::string sanitize_utf8(std::string_view bytes) {
  std::string out;
  out.reserve(bytes.size());
  std::size_t i = 0;
  auto is_cont = [&](std::size_t j) {
    return j < bytes.size() && (static_cast<unsigned char>(bytes[j]) & 0xc0) == 0x80;
  };
  while (i < bytes.size()) {
    unsigned char b = bytes[i];
    std::size_t len = 0;
    if (b < 0x80) len = 1;
    else if ((b & 0xe0) == 0xc0) len = 2;
    else if ((b & 0xf0) == 0xe0) len = 3;
    else if ((b & 0xf8) == 0xf0) len = 4;
    bool ok = len > 0;
    for (std::size_t j = 1; ok && j < len; ++j) ok = is_cont(i + j);
    if (ok) {
      out.append(bytes.substr(i, len));
      i += len;
    } else {
      out += "\xef\xbf\xbd";  // U+FFFD
      ++i;
    }
  }
  return out;
}

std::string join(const std::vector<std::string>& parts, std::string_view sep) {
  std::string out;
  for (std::size_t i = 0; i < parts.size(); ++i) {
    if (i) out += sep;
    out += parts[i];
  }
  return out;
}

namespace {

bool is_connective(std::string_view word) {
  static const std::array<std::string_view, 10> kWords = {
      "of", "the", "and", "in", "for", "on", "at", "de", "la", "du"};
  for (auto w : kWords)
    if (iequals(w, word)) return true;
  return false;
}

bool is_capitalized(std::string_view word) {
  return !word.empty() && std::isupper(static_cast<unsigned char>(word[0]));
}

std::string strip_punct(std::string_view word) {
  std::size_t b = 0, e = word.size();
  auto is_word_char = [](unsigned char c) { return std::isalnum(c) || c == '\'' || c == '-'; };
  while (b < e && !is_word_char(static_cast<unsigned char>(word[b]))) ++b;
  while (e > b && !is_word_char(static_cast<unsigned char>(word[e - 1]))) --e;
  return std::string(word.substr(b, e - b));
}

}  // namespace

std::vector<std::string> extract_literals(std::string_view text) {
  std::vector<std::string> out;
  auto push = [&](std::string value) {
    value = trim(value);
    if (value.empty()) return;
    for (const auto& seen : out)
      if (seen == value) return;
    out.push_back(std::move(value));
  };

  // Quoted spans.
  for (char quote : {'\'', '"'}) {
    std::size_t pos = 0;
    while (true) {
      std::size_t open = text.find(quote, pos);
      if (open == std::string_view::npos) break;
      std::size_t close = text.find(quote, open + 1);
      if (close == std::string_view::npos) break;
      push(std::string(text.substr(open + 1, close - open - 1)));
      pos = close + 1;
    }
  }

  // Capitalized multi-word spans: >=2 capitalized words, connectives allowed
  // inside. Trailing connectives are dropped.
  std::vector<std::string> words;
  for (auto& raw : split_whitespace(text)) {
    words.push_back(strip_punct(raw));
  }
  std::size_t i = 0;
  while (i < words.size()) {
    if (!is_capitalized(words[i])) {
      ++i;
      continue;
    }
    std::size_t j = i + 1;
    std::size_t last_cap = i;
    while (j < words.size() && !words[j].empty() &&
           (is_capitalized(words[j]) || is_connective(words[j]))) {
      if (is_capitalized(words[j])) last_cap = j;
      ++j;
    }
    std::size_t caps = 0;
    for (std::size_t k = i; k <= last_cap; ++k)
      if (is_capitalized(words[k])) ++caps;
    if (caps >= 2) {
      std::string span;
      for (std::size_t k = i; k <= last_cap; ++k) {
        if (k > i) span += ' ';
        span += words[k];
      }
      push(std::move(span));
    }
    i = std::max(j, i + 1);
  }
  return out;
}

}  // namespace metaforge::strings
