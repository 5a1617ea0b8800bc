// Scoring and ranking of near-matching bank segments, and the decomposition
// of a segment/query pair into anti-match/correction spans.

#pragma once

#include <cstddef>
#include <string_view>
#include <vector>

#include "ebmt/tokenizer.h"

namespace ebmt {

struct TokenRange {
  std::size_t begin = 0;
  std::size_t end = 0;

  std::size_t size() const { return end - begin; }
  bool empty() const { return begin == end; }
  friend bool operator==(const TokenRange&, const TokenRange&) = default;
};

/// anti: tokens of the bank segment that differ from the query.
/// correction: the query tokens standing in their place.
struct AntiSpan {
  TokenRange anti;
  TokenRange correction;
  friend bool operator==(const AntiSpan&, const AntiSpan&) = default;
};

struct MatchScore {
  int common = 0;
  int length = 0;  // all segment tokens, punctuation included
  double ratio = 0.0;
};

struct MatchCandidate {
  std::size_t alignment_id = 0;
  int common = 0;
  int length = 0;
  double ratio = 0.0;
  std::vector<AntiSpan> anti_spans;
};

MatchScore score(const TokenizedText& segment, const TokenizedText& query);

/// Tie-breaker applied after "most tokens in common".
enum class RankTieBreak {
  kRatioThenLength,
  kLengthThenRatio,
};

struct RankConfig {
  RankTieBreak tie_break = RankTieBreak::kRatioThenLength;
};

/// Strict weak order used by rank(); total on distinct alignment ids.
bool rank_before(const MatchCandidate& a, const MatchCandidate& b, const RankConfig& cfg = {});

std::vector<MatchCandidate> rank(std::vector<MatchCandidate> candidates,
                                 const RankConfig& cfg = {});

enum class AntimatchFailure {
  kNone,
  kTooManyGaps,
  kDegenerateCorrection,
};

struct AntimatchResult {
  std::vector<AntiSpan> spans;
  AntimatchFailure failure = AntimatchFailure::kNone;

  bool ok() const { return failure == AntimatchFailure::kNone; }
};

inline constexpr std::size_t kMaxAntiSpans = 2;

/// Monotone token matching between two sequences, as (segment, query) index
/// pairs. Chosen to maximise matched tokens, then minimise the number of
/// unmatched regions, then to be lexicographically smallest.
std::vector<std::pair<std::size_t, std::size_t>> align_tokens(const TokenizedText& segment,
                                                              const TokenizedText& query);

/// Turns a monotone matching into anti/correction span pairs:
///  - each unmatched region between matched runs is one pair;
///  - a matched run made only of articles is folded into the gap that
///    follows it, so "le ministre" vs "la présidente" is one pair;
///  - punctuation is trimmed from the edges of both sides, and pairs left
///    empty on both sides are dropped.
std::vector<AntiSpan> gaps_from_alignment(
    const TokenizedText& segment, const TokenizedText& query,
    const std::vector<std::pair<std::size_t, std::size_t>>& pairs);

/// align_tokens + gaps_from_alignment, then fails with kTooManyGaps above
/// kMaxAntiSpans pairs, or kDegenerateCorrection when a correction is not
/// shorter than the query.
AntimatchResult compute_antimatch(const TokenizedText& segment, const TokenizedText& query);

/// Replaces each anti span of `segment` by its correction from `query`.
TokenizedText splice_corrections(const TokenizedText& segment, const TokenizedText& query,
                                 const std::vector<AntiSpan>& spans);

std::string_view to_string(AntimatchFailure failure);

}  // namespace ebmt
