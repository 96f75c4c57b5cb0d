#include "metaforge/llm/prompts.hpp"

#include "metaforge/common.hpp"
#include "metaforge/util/io.hpp"

namespace metaforge::llm {

namespace {
const char* kTemplateNames[] = {
    "summarize_field", "mask_question",  "link_generate", "link_revise",
    "generate_sql",    "correct_sql",    "sql2text",
};
}

PromptSet PromptSet::load(const std::filesystem::path& dir) {
  PromptSet set;
  for (const char* name : kTemplateNames) {
    auto path = dir / (std::string(name) + ".txt");
    if (!std::filesystem::exists(path)) {
      throw Error(ErrorKind::config, "missing prompt template: " + path.string());
    }
    set.templates_[name] = io::read_file(path);
  }
  return set;
}

const std::string& PromptSet::raw(const std::string& name) const {
  auto it = templates_.find(name);
  if (it == templates_.end()) {
    throw Error(ErrorKind::config, "unknown prompt template: " + name);
  }
  return it->second;
}

std::string render_template(const std::string& text,
                            const std::map<std::string, std::string>& slots) {
  std::string out;
  out.reserve(text.size());
  std::size_t i = 0;
  while (i < text.size()) {
    if (text[i] == '{') {
      auto close = text.find('}', i);
      if (close != std::string::npos) {
        auto name = text.substr(i + 1, close - i - 1);
        auto it = slots.find(name);
        if (it != slots.end()) {
          out += it->second;
          i = close + 1;
          continue;
        }
        throw Error(ErrorKind::config, "unresolved template slot: {" + name + "}");
      }
    }
    out += text[i++];
  }
  return out;
}

std::string PromptSet::render(const std::string& name,
                              const std::map<std::string, std::string>& slots) const {
  return render_template(raw(name), slots);
}

}  // namespace metaforge::llm
