#include "ebmt/tokenizer.h"

#include <algorithm>
#include <array>
#include <map>
#include <string_view>
#include <utility>

#include <unicode/uchar.h>

#include "ebmt/unicode.h"

namespace ebmt {

namespace {

// Closed list: definite, indefinite and partitive articles. The elided
// definite form appears as "l" because the apostrophe is split off.
struct ArticleGroup {
  std::string_view key;
  std::array<std::string_view, 4> forms;
};

constexpr std::array<ArticleGroup, 3> kArticleGroups = {{
    {"\x01" "art:def", {"le", "la", "les", "l"}},
    {"\x01" "art:indef", {"un", "une", "des", ""}},
    {"\x01" "art:part", {"du", "", "", ""}},
}};

constexpr std::string_view kPunctKey = "\x01" "punct";

const ArticleGroup* article_group(std::string_view normalized) {
  for (const auto& group : kArticleGroups) {
    for (auto form : group.forms) {
      if (!form.empty() && form == normalized) return &group;
    }
  }
  return nullptr;
}

bool is_hyphen(char32_t cp) { return cp == U'-' || cp == U'‐' || cp == U'‑'; }

bool is_digit(char32_t cp) { return u_isdigit(static_cast<UChar32>(cp)); }

}  // namespace

std::size_t TokenizedText::content_size() const {
  return static_cast<std::size_t>(
      std::count_if(tokens.begin(), tokens.end(), [](const Token& t) { return !t.is_punct; }));
}

TokenizedText TokenizedText::slice(std::size_t begin, std::size_t end) const {
  TokenizedText out;
  end = std::min(end, tokens.size());
  if (begin >= end) return out;
  out.tokens.assign(tokens.begin() + static_cast<std::ptrdiff_t>(begin),
                    tokens.begin() + static_cast<std::ptrdiff_t>(end));
  const std::size_t base = char_spans[begin].begin;
  for (std::size_t i = begin; i < end; ++i) {
    out.char_spans.push_back({char_spans[i].begin - base, char_spans[i].end - base});
  }
  return out;
}

std::string TokenizedText::joined() const {
  std::string out;
  for (const auto& t : tokens) {
    if (!out.empty()) out += ' ';
    out += t.normalized;
  }
  return out;
}

TokenizedText tokenize(std::string_view text) {
  TokenizedText out;
  const std::u32string cps = unicode::decode(text);
  const std::vector<std::size_t> offs = unicode::codepoint_offsets(text);
  const std::size_t n = cps.size();

  auto emit = [&](std::size_t b, std::size_t e, bool punct) {
    Token tok;
    tok.surface = std::string(text.substr(offs[b], offs[e] - offs[b]));
    tok.normalized = unicode::fold_case(tok.surface);
    tok.is_punct = punct;
    tok.is_article = !punct && article_group(tok.normalized) != nullptr;
    out.tokens.push_back(std::move(tok));
    out.char_spans.push_back({offs[b], offs[e]});
  };

  std::size_t i = 0;
  while (i < n) {
    const char32_t cp = cps[i];
    if (unicode::is_space(cp)) {
      ++i;
      continue;
    }
    if (!unicode::is_word_char(cp)) {
      emit(i, i + 1, true);
      ++i;
      continue;
    }
    const std::size_t start = i++;
    while (i < n) {
      if (unicode::is_word_char(cps[i])) {
        ++i;
        continue;
      }
      const bool next_is_word = i + 1 < n && unicode::is_word_char(cps[i + 1]);
      if (next_is_word && is_hyphen(cps[i])) {
        i += 2;
        continue;
      }
      // 3,5 or 1.000 stay whole; "1 000" does not (whitespace splits).
      if (next_is_word && (cps[i] == U',' || cps[i] == U'.') && is_digit(cps[i - 1]) &&
          is_digit(cps[i + 1])) {
        i += 2;
        continue;
      }
      break;
    }
    emit(start, i, false);
  }
  return out;
}

std::string match_key(const Token& token) {
  if (token.is_punct) return std::string(kPunctKey);
  if (token.is_article) {
    if (const auto* group = article_group(token.normalized)) return std::string(group->key);
  }
  return token.normalized;
}

bool tokens_flexibly_equal(const Token& a, const Token& b) {
  return match_key(a) == match_key(b);
}

std::string content_key(const TokenizedText& text) {
  std::string key;
  for (const auto& t : text.tokens) {
    if (t.is_punct) continue;
    if (!key.empty()) key += '\x1f';
    key += match_key(t);
  }
  return key;
}

bool sequences_flexibly_equal(const TokenizedText& a, const TokenizedText& b) {
  return content_key(a) == content_key(b);
}

int common_token_count(const TokenizedText& q, const TokenizedText& t) {
  std::map<std::string, int> counts;
  for (const auto& tok : q.tokens) {
    if (!tok.is_punct) ++counts[match_key(tok)];
  }
  int common = 0;
  for (const auto& tok : t.tokens) {
    if (tok.is_punct) continue;
    auto it = counts.find(match_key(tok));
    if (it != counts.end() && it->second > 0) {
      --it->second;
      ++common;
    }
  }
  return common;
}

}  // namespace ebmt
