#pragma once

#include <string>
#include <string_view>

namespace kanbun::utf8 {

/// Decodes UTF-8 into scalar values. Throws Error(InvalidUtf8) on malformed
/// input, including surrogates and overlong forms.
std::u32string decode(std::string_view bytes);

std::string encode(std::u32string_view text);
std::string encode(char32_t c);

}  // namespace kanbun::utf8
