#include "metaforge/util/csv.hpp"

#include "metaforge/util/io.hpp"
#include "metaforge/util/strings.hpp"

namespace metaforge::csv {

std::vector<std::vector<std::string>> read_rows(const std::filesystem::path& path) {
  std::string text = io::read_file(path);
  if (strings::starts_with(text, "\xef\xbb\xbf")) text.erase(0, 3);

  std::vector<std::vector<std::string>> rows;
  std::vector<std::string> row;
  std::string cell;
  bool quoted = false;
  std::size_t i = 0;
  auto end_cell = [&] {
    row.push_back(strings::sanitize_utf8(cell));
    cell.clear();
  };
  auto end_row = [&] {
    end_cell();
    rows.push_back(std::move(row));
    row.clear();
  };
  while (i < text.size()) {
    char c = text[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < text.size() && text[i + 1] == '"') {
          cell += '"';
          ++i;
        } else {
          quoted = false;
        }
      } else {
        cell += c;
      }
    } else if (c == '"' && cell.empty()) {
      quoted = true;
    } else if (c == ',') {
      end_cell();
    } else if (c == '\n') {
      if (!cell.empty() && cell.back() == '\r') cell.pop_back();
      end_row();
    } else {
      cell += c;
    }
    ++i;
  }
  if (!cell.empty() || !row.empty()) {
    if (!cell.empty() && cell.back() == '\r') cell.pop_back();
    end_row();
  }
  return rows;
}

}  // namespace metaforge::csv
