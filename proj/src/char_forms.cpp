#include "kanbun/char_forms.hpp"

#include <fmt/format.h>

#include <fstream>
#include <sstream>

#include "kanbun/error.hpp"
#include "kanbun/utf8.hpp"

namespace kanbun {

void CharFormTable::add(char32_t old_form, char32_t new_form) {
  auto describe = [](char32_t c) {
    return fmt::format("{} (U+{:04X})", utf8::encode(c), static_cast<std::uint32_t>(c));
  };
  if (old_form == new_form) return;
  if (auto it = mapping_.find(old_form); it != mapping_.end()) {
    if (it->second == new_form) return;
    throw Error(ErrorCode::BadCharTable,
                fmt::format("{} mapped twice", describe(old_form)));
  }
  if (inverse_.count(new_form)) {
    throw Error(ErrorCode::BadCharTable,
                fmt::format("{} is the target of two old forms", describe(new_form)));
  }
  if (mapping_.count(new_form) || inverse_.count(old_form)) {
    throw Error(ErrorCode::BadCharTable,
                fmt::format("chained mapping through {}", describe(new_form)));
  }
  mapping_.emplace(old_form, new_form);
  inverse_.emplace(new_form, old_form);
}

char32_t CharFormTable::map(char32_t c) const {
  auto it = mapping_.find(c);
  return it == mapping_.end() ? c : it->second;
}

CharFormTable CharFormTable::parse(std::string_view text) {
  CharFormTable table;
  std::size_t line_no = 0;
  std::size_t start = 0;
  while (start <= text.size()) {
    auto end = text.find('\n', start);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(start, end - start);
    start = end + 1;
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    if (line.empty() || line.front() == '#') continue;
    auto tab = line.find('\t');
    if (tab == std::string_view::npos) {
      throw Error(ErrorCode::BadCharTable, fmt::format("line {}: expected <old>\\t<new>", line_no));
    }
    std::u32string old_form, new_form;
    try {
      old_form = utf8::decode(line.substr(0, tab));
      new_form = utf8::decode(line.substr(tab + 1));
    } catch (const Error& e) {
      throw Error(ErrorCode::BadCharTable, fmt::format("line {}: {}", line_no, e.what()));
    }
    if (old_form.size() != 1 || new_form.size() != 1) {
      throw Error(ErrorCode::BadCharTable,
                  fmt::format("line {}: each side must be a single character", line_no));
    }
    try {
      table.add(old_form[0], new_form[0]);
    } catch (const Error& e) {
      throw Error(ErrorCode::BadCharTable, fmt::format("line {}: {}", line_no, e.what()));
    }
  }
  return table;
}

CharFormTable CharFormTable::load(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::Io, fmt::format("cannot open {}", path.string()));
  std::ostringstream buf;
  buf << in.rdbuf();
  try {
    return parse(buf.str());
  } catch (const Error& e) {
    throw Error(e.code(), fmt::format("{}: {}", path.string(), e.what()));
  }
}

const CharFormTable& CharFormTable::builtin() {
  static const CharFormTable table = parse(default_char_forms_text());
  return table;
}

std::u32string normalize_forms(std::u32string_view s, const CharFormTable& table) {
  std::u32string out(s);
  for (char32_t& c : out) c = table.map(c);
  return out;
}

}  // namespace kanbun
