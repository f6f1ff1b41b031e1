#include "slrkit/unicode.hpp"

#include <unicode/normalizer2.h>
#include <unicode/uchar.h>
#include <unicode/unistr.h>
#include <unicode/utf8.h>
#include <unicode/locid.h>

#include <unicode/translit.h>

#include <memory>
#include <mutex>
#include <stdexcept>

namespace slrkit::unicode {
namespace {

icu::UnicodeString from_utf8(std::string_view s) {
  return icu::UnicodeString::fromUTF8(icu::StringPiece(s.data(), static_cast<int32_t>(s.size())));
}

std::string to_utf8(const icu::UnicodeString& u) {
  std::string out;
  u.toUTF8String(out);
  return out;
}

bool is_word_cp(UChar32 c) {
  const int8_t type = u_charType(c);
  switch (type) {
    case U_UPPERCASE_LETTER:
    case U_LOWERCASE_LETTER:
    case U_TITLECASE_LETTER:
    case U_MODIFIER_LETTER:
    case U_OTHER_LETTER:
    case U_NON_SPACING_MARK:
    case U_COMBINING_SPACING_MARK:
    case U_ENCLOSING_MARK:
    case U_DECIMAL_DIGIT_NUMBER:
      return true;
    default:
      return false;
  }
}

template <typename Keep>
std::string filter(std::string_view utf8, Keep keep) {
  const icu::UnicodeString in = from_utf8(utf8);
  icu::UnicodeString out;
  for (int32_t i = 0; i < in.length();) {
    const UChar32 c = in.char32At(i);
    out.append(keep(c) ? c : static_cast<UChar32>(' '));
    i += U16_LENGTH(c);
  }
  return to_utf8(out);
}

}  // namespace

std::string nfkc(std::string_view utf8) {
  UErrorCode status = U_ZERO_ERROR;
  const icu::Normalizer2* norm = icu::Normalizer2::getNFKCInstance(status);
  if (U_FAILURE(status)) throw std::runtime_error("ICU NFKC normalizer unavailable");
  icu::UnicodeString result = norm->normalize(from_utf8(utf8), status);
  if (U_FAILURE(status)) throw std::runtime_error("NFKC normalization failed");
  return to_utf8(result);
}

std::string lower(std::string_view utf8) {
  icu::UnicodeString u = from_utf8(utf8);
  u.toLower(icu::Locale::getRoot());
  return to_utf8(u);
}

std::string fold(std::string_view utf8) { return lower(nfkc(utf8)); }

std::size_t length(std::string_view utf8) {
  const icu::UnicodeString u = from_utf8(utf8);
  return static_cast<std::size_t>(u.countChar32());
}

std::string keep_word_chars(std::string_view utf8) {
  return filter(utf8, [](UChar32 c) { return is_word_cp(c) || c == '-' || c == '_'; });
}

std::string keep_alnum(std::string_view utf8) { return filter(utf8, is_word_cp); }

bool has_letter(std::string_view utf8) {
  const icu::UnicodeString u = from_utf8(utf8);
  for (int32_t i = 0; i < u.length();) {
    const UChar32 c = u.char32At(i);
    if (u_isalpha(c)) return true;
    i += U16_LENGTH(c);
  }
  return false;
}

bool is_all_caps(std::string_view utf8, std::size_t min_letters) {
  const icu::UnicodeString u = from_utf8(utf8);
  std::size_t letters = 0;
  for (int32_t i = 0; i < u.length();) {
    const UChar32 c = u.char32At(i);
    if (u_isalpha(c)) {
      if (u_islower(c)) return false;
      ++letters;
    }
    i += U16_LENGTH(c);
  }
  return letters >= min_letters;
}

std::string strip_punctuation(std::string_view utf8) {
  const icu::UnicodeString in = from_utf8(utf8);
  icu::UnicodeString out;
  for (int32_t i = 0; i < in.length();) {
    const UChar32 c = in.char32At(i);
    if (is_word_cp(c) || u_isUWhiteSpace(c)) out.append(c);
    i += U16_LENGTH(c);
  }
  return to_utf8(out);
}

std::u32string to_code_points(std::string_view utf8) {
  std::u32string out;
  int32_t i = 0;
  const auto n = static_cast<int32_t>(utf8.size());
  const auto* s = reinterpret_cast<const uint8_t*>(utf8.data());
  while (i < n) {
    UChar32 c;
    U8_NEXT(s, i, n, c);
    out.push_back(c < 0 ? U'\uFFFD' : static_cast<char32_t>(c));
  }
  return out;
}

std::string from_code_points(std::u32string_view cps) {
  icu::UnicodeString u;
  for (char32_t c : cps) u.append(static_cast<UChar32>(c));
  return to_utf8(u);
}

char32_t lower_cp(char32_t c) { return static_cast<char32_t>(u_tolower(static_cast<UChar32>(c))); }
bool is_alpha_cp(char32_t c) { return u_isalpha(static_cast<UChar32>(c)); }
bool is_alnum_cp(char32_t c) { return is_word_cp(static_cast<UChar32>(c)); }
bool is_upper_cp(char32_t c) { return u_isupper(static_cast<UChar32>(c)); }
bool is_space_cp(char32_t c) { return u_isUWhiteSpace(static_cast<UChar32>(c)); }

std::string to_ascii(std::string_view utf8) {
  UErrorCode status = U_ZERO_ERROR;
  static std::unique_ptr<icu::Transliterator> translit(
      icu::Transliterator::createInstance("Any-Latin; Latin-ASCII", UTRANS_FORWARD, status));
  if (U_FAILURE(status) || !translit) throw std::runtime_error("ICU transliterator unavailable");
  icu::UnicodeString u = from_utf8(utf8);
  {
    static std::mutex mu;
    std::lock_guard lock(mu);
    translit->transliterate(u);
  }
  std::string out;
  for (char c : to_utf8(u)) {
    if (static_cast<unsigned char>(c) < 0x80) out += c;
  }
  return out;
}

bool is_valid_utf8(std::string_view bytes) {
  int32_t i = 0;
  const auto n = static_cast<int32_t>(bytes.size());
  const auto* s = reinterpret_cast<const uint8_t*>(bytes.data());
  while (i < n) {
    UChar32 c;
    U8_NEXT(s, i, n, c);
    if (c < 0) return false;
  }
  return true;
}

}  // namespace slrkit::unicode
