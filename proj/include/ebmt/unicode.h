// UTF-8 helpers shared by the tokenizer, the expression parser and the bank
// loader. Backed by ICU.

#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace ebmt::unicode {

/// NFC-normalizes a UTF-8 string. Invalid sequences are replaced with U+FFFD.
std::string nfc(std::string_view text);

/// Simple (locale-independent) lowercase followed by NFC.
std::string fold_case(std::string_view text);

/// Decodes UTF-8 into code points.
std::u32string decode(std::string_view text);
std::string encode(std::u32string_view cps);

/// Byte offset of every code point in `text`, plus a final entry equal to
/// text.size(). Offsets are indexed by code point position.
std::vector<std::size_t> codepoint_offsets(std::string_view text);

bool is_space(char32_t cp);
bool is_punct(char32_t cp);
/// Letters, digits and combining marks.
bool is_word_char(char32_t cp);
bool is_apostrophe(char32_t cp);

/// Trims ASCII and Unicode whitespace on both ends.
std::string trim(std::string_view text);

/// Whitespace runs collapsed to one ASCII space, trimmed, NFC.
std::string normalize_sentence(std::string_view text);

}  // namespace ebmt::unicode
