#pragma once

#include <string>
#include <string_view>

namespace slrkit::unicode {

/// NFKC-normalize UTF-8 text. Invalid sequences become U+FFFD.
std::string nfkc(std::string_view utf8);

/// Full Unicode lowercase (root locale).
std::string lower(std::string_view utf8);

/// nfkc followed by lower.
std::string fold(std::string_view utf8);

/// Number of code points.
std::size_t length(std::string_view utf8);

/// Replace every code point that is not a letter, mark, decimal digit,
/// hyphen or underscore with a space.
std::string keep_word_chars(std::string_view utf8);

/// Replace every code point that is not a letter, mark or decimal digit with a space.
std::string keep_alnum(std::string_view utf8);

bool has_letter(std::string_view utf8);

/// True if the text has at least `min_letters` letters and none of them is lowercase.
bool is_all_caps(std::string_view utf8, std::size_t min_letters);

/// Drops punctuation and symbol code points, keeping letters, digits, marks and whitespace.
std::string strip_punctuation(std::string_view utf8);

/// Decodes UTF-8 into code points.
std::u32string to_code_points(std::string_view utf8);

std::string from_code_points(std::u32string_view cps);

char32_t lower_cp(char32_t c);
bool is_alpha_cp(char32_t c);
bool is_alnum_cp(char32_t c);
bool is_upper_cp(char32_t c);
bool is_space_cp(char32_t c);

/// Transliterates to ASCII (e.g. "Über" -> "Uber"); characters without an
/// ASCII form are dropped.
std::string to_ascii(std::string_view utf8);

bool is_valid_utf8(std::string_view bytes);

}  // namespace slrkit::unicode
