#pragma once

#include <filesystem>
#include <string_view>
#include <unordered_map>

namespace kanbun {

/// Old-form to new-form character mapping. Injective, and new forms are
/// never themselves keys, so normalization is idempotent.
class CharFormTable {
 public:
  CharFormTable() = default;

  /// Parses `<old>\t<new>` lines; `#` starts a comment. Throws
  /// Error(BadCharTable) naming the line on any violation.
  static CharFormTable parse(std::string_view text);
  static CharFormTable load(const std::filesystem::path& path);
  /// The table compiled into the library.
  static const CharFormTable& builtin();

  void add(char32_t old_form, char32_t new_form);
  char32_t map(char32_t c) const;
  std::size_t size() const { return mapping_.size(); }

 private:
  std::unordered_map<char32_t, char32_t> mapping_;
  std::unordered_map<char32_t, char32_t> inverse_;
};

std::u32string normalize_forms(std::u32string_view s, const CharFormTable& table);

std::string_view default_char_forms_text();

}  // namespace kanbun
