// Word-level tokenization of French text and the lenient token comparison
// used by every matching step.

#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

namespace ebmt {

struct Token {
  std::string surface;
  std::string normalized;  // lowercase, NFC
  bool is_punct = false;
  bool is_article = false;
};

struct CharSpan {
  std::size_t begin;  // byte offsets into the tokenized string
  std::size_t end;
};

struct TokenizedText {
  std::vector<Token> tokens;
  std::vector<CharSpan> char_spans;

  std::size_t size() const { return tokens.size(); }
  bool empty() const { return tokens.empty(); }
  std::size_t content_size() const;

  /// Tokens [begin, end) with spans rebased on the first kept token.
  TokenizedText slice(std::size_t begin, std::size_t end) const;
  /// Normalized forms joined by single spaces.
  std::string joined() const;
};

/// Splits on whitespace; punctuation characters become their own tokens
/// (apostrophes included, so "l'écologie" gives "l", "'", "écologie").
/// Hyphens and digit separators between word characters stay inside the word
/// ("couvre-feu", "stations-service", "3,5").
TokenizedText tokenize(std::string_view text);

/// Key under which two tokens compare flexibly equal: the normalized form,
/// a shared key for articles of the same role, and one key for all
/// punctuation.
std::string match_key(const Token& token);

bool tokens_flexibly_equal(const Token& a, const Token& b);

/// Match keys of the non-punctuation tokens, as one string. Two token
/// sequences are flexibly equal when their keys are equal.
std::string content_key(const TokenizedText& text);

bool sequences_flexibly_equal(const TokenizedText& a, const TokenizedText& b);

/// Size of the multiset intersection of non-punctuation match keys.
int common_token_count(const TokenizedText& q, const TokenizedText& t);

}  // namespace ebmt
