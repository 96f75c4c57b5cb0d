#pragma once

#include <filesystem>
#include <map>
#include <string>

namespace metaforge::llm {

/// Prompt templates live as versioned files, one per operation, with
/// {name} slots. Missing files or unresolved slots are configuration
/// errors so template drift is caught immediately.
class PromptSet {
 public:
  static PromptSet load(const std::filesystem::path& dir);

  /// Renders a named template, substituting every {slot}.
  std::string render(const std::string& name,
                     const std::map<std::string, std::string>& slots) const;

  const std::string& raw(const std::string& name) const;

 private:
  std::map<std::string, std::string> templates_;
};

std::string render_template(const std::string& text,
                            const std::map<std::string, std::string>& slots);

}  // namespace metaforge::llm
