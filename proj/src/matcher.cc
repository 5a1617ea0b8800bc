#include "ebmt/matcher.h"

#include <algorithm>
#include <string>
#include <utility>

namespace ebmt {

MatchScore score(const TokenizedText& segment, const TokenizedText& query) {
  MatchScore s;
  s.common = common_token_count(query, segment);
  s.length = static_cast<int>(segment.size());
  s.ratio = s.length > 0 ? static_cast<double>(s.common) / s.length : 0.0;
  return s;
}

bool rank_before(const MatchCandidate& a, const MatchCandidate& b, const RankConfig& cfg) {
  if (a.common != b.common) return a.common > b.common;
  if (cfg.tie_break == RankTieBreak::kRatioThenLength) {
    if (a.ratio != b.ratio) return a.ratio > b.ratio;
    if (a.length != b.length) return a.length < b.length;
  } else {
    if (a.length != b.length) return a.length < b.length;
    if (a.ratio != b.ratio) return a.ratio > b.ratio;
  }
  return a.alignment_id < b.alignment_id;
}

std::vector<MatchCandidate> rank(std::vector<MatchCandidate> candidates, const RankConfig& cfg) {
  std::stable_sort(candidates.begin(), candidates.end(),
                   [&](const MatchCandidate& a, const MatchCandidate& b) {
                     return rank_before(a, b, cfg);
                   });
  return candidates;
}

namespace {

// (matched tokens, unmatched regions); larger matches win, then fewer gaps.
struct Objective {
  int matches = 0;
  int gaps = 0;

  bool better_than(const Objective& o) const {
    if (matches != o.matches) return matches > o.matches;
    return gaps < o.gaps;
  }
  friend bool operator==(const Objective&, const Objective&) = default;
};

std::vector<std::string> keys_of(const TokenizedText& text) {
  std::vector<std::string> keys;
  keys.reserve(text.size());
  for (const auto& t : text.tokens) keys.push_back(match_key(t));
  return keys;
}

bool all_of_kind(const TokenizedText& text, TokenRange r, bool (*pred)(const Token&)) {
  for (std::size_t i = r.begin; i < r.end; ++i) {
    if (!pred(text.tokens[i])) return false;
  }
  return true;
}

TokenRange trim_punct(const TokenizedText& text, TokenRange r) {
  while (r.begin < r.end && text.tokens[r.begin].is_punct) ++r.begin;
  while (r.end > r.begin && text.tokens[r.end - 1].is_punct) --r.end;
  if (r.empty()) r = {r.begin, r.begin};
  return r;
}

}  // namespace

std::vector<std::pair<std::size_t, std::size_t>> align_tokens(const TokenizedText& segment,
                                                              const TokenizedText& query) {
  const auto s = keys_of(segment);
  const auto q = keys_of(query);
  const std::size_t n = s.size();
  const std::size_t m = q.size();

  // best[i][j][open]: optimum over suffixes s[i..], q[j..]; `open` means a
  // gap region is already being counted.
  const std::size_t w = m + 1;
  std::vector<Objective> best(2 * (n + 1) * w);
  auto at = [&](std::size_t i, std::size_t j, int open) -> Objective& {
    return best[(i * w + j) * 2 + static_cast<std::size_t>(open)];
  };
  for (std::size_t i = n + 1; i-- > 0;) {
    for (std::size_t j = m + 1; j-- > 0;) {
      for (int open = 0; open < 2; ++open) {
        if (i == n && j == m) {
          at(i, j, open) = {};
          continue;
        }
        Objective v{-1, 0};
        const int opens = open ? 0 : 1;
        if (i < n && j < m && s[i] == q[j]) {
          Objective c = at(i + 1, j + 1, 0);
          c.matches += 1;
          if (v.matches < 0 || c.better_than(v)) v = c;
        }
        if (i < n) {
          Objective c = at(i + 1, j, 1);
          c.gaps += opens;
          if (v.matches < 0 || c.better_than(v)) v = c;
        }
        if (j < m) {
          Objective c = at(i, j + 1, 1);
          c.gaps += opens;
          if (v.matches < 0 || c.better_than(v)) v = c;
        }
        at(i, j, open) = v;
      }
    }
  }

  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  std::size_t i = 0;
  std::size_t j = 0;
  while (true) {
    const Objective target = at(i, j, 0);
    if (target.matches == 0) break;
    bool advanced = false;
    for (std::size_t a = i; a < n && !advanced; ++a) {
      for (std::size_t b = j; b < m; ++b) {
        if (s[a] != q[b]) continue;
        Objective c = at(a + 1, b + 1, 0);
        c.matches += 1;
        if (a > i || b > j) c.gaps += 1;
        if (c == target) {
          pairs.emplace_back(a, b);
          i = a + 1;
          j = b + 1;
          advanced = true;
          break;
        }
      }
    }
    if (!advanced) break;  // unreachable when the table is consistent
  }
  return pairs;
}

std::vector<AntiSpan> gaps_from_alignment(
    const TokenizedText& segment, const TokenizedText& query,
    const std::vector<std::pair<std::size_t, std::size_t>>& pairs) {
  struct Region {
    bool matched;
    TokenRange seg;
    TokenRange qry;
  };
  std::vector<Region> regions;
  std::size_t pi = 0;
  std::size_t pj = 0;
  for (auto [i, j] : pairs) {
    if (i > pi || j > pj) regions.push_back({false, {pi, i}, {pj, j}});
    if (!regions.empty() && regions.back().matched && regions.back().seg.end == i &&
        regions.back().qry.end == j) {
      ++regions.back().seg.end;
      ++regions.back().qry.end;
    } else {
      regions.push_back({true, {i, i + 1}, {j, j + 1}});
    }
    pi = i + 1;
    pj = j + 1;
  }
  if (pi < segment.size() || pj < query.size()) {
    regions.push_back({false, {pi, segment.size()}, {pj, query.size()}});
  }

  // Article-only runs attach to the gap after them.
  for (std::size_t k = 0; k + 1 < regions.size(); ++k) {
    if (regions[k].matched &&
        all_of_kind(segment, regions[k].seg, [](const Token& t) { return t.is_article; })) {
      regions[k].matched = false;
    }
  }

  std::vector<AntiSpan> spans;
  for (std::size_t k = 0; k < regions.size();) {
    if (regions[k].matched) {
      ++k;
      continue;
    }
    TokenRange seg = regions[k].seg;
    TokenRange qry = regions[k].qry;
    while (++k < regions.size() && !regions[k].matched) {
      seg.end = regions[k].seg.end;
      qry.end = regions[k].qry.end;
    }
    seg = trim_punct(segment, seg);
    qry = trim_punct(query, qry);
    if (seg.empty() && qry.empty()) continue;
    spans.push_back({seg, qry});
  }
  return spans;
}

AntimatchResult compute_antimatch(const TokenizedText& segment, const TokenizedText& query) {
  AntimatchResult result;
  result.spans = gaps_from_alignment(segment, query, align_tokens(segment, query));
  if (result.spans.size() > kMaxAntiSpans) {
    result.failure = AntimatchFailure::kTooManyGaps;
    return result;
  }
  const std::size_t query_content = query.content_size();
  for (const auto& span : result.spans) {
    const TokenizedText corr = query.slice(span.correction.begin, span.correction.end);
    if (corr.content_size() >= query_content) {
      result.failure = AntimatchFailure::kDegenerateCorrection;
      return result;
    }
  }
  return result;
}

TokenizedText splice_corrections(const TokenizedText& segment, const TokenizedText& query,
                                 const std::vector<AntiSpan>& spans) {
  TokenizedText out;
  std::size_t cursor = 0;
  std::size_t offset = 0;
  auto push = [&](const Token& t) {
    out.tokens.push_back(t);
    out.char_spans.push_back({offset, offset + t.surface.size()});
    offset += t.surface.size() + 1;
  };
  for (const auto& span : spans) {
    for (; cursor < span.anti.begin; ++cursor) push(segment.tokens[cursor]);
    for (std::size_t j = span.correction.begin; j < span.correction.end; ++j) {
      push(query.tokens[j]);
    }
    cursor = span.anti.end;
  }
  for (; cursor < segment.size(); ++cursor) push(segment.tokens[cursor]);
  return out;
}

std::string_view to_string(AntimatchFailure failure) {
  switch (failure) {
    case AntimatchFailure::kNone:
      return "ok";
    case AntimatchFailure::kTooManyGaps:
      return "too many gaps";
    case AntimatchFailure::kDegenerateCorrection:
      return "correction not shorter than query";
  }
  return "unknown";
}

}  // namespace ebmt
