// Candidate partitions of a query into contiguous chunks, for the fallback
// path of the translator. Chunk boundaries follow a dependency parse when
// one is available, and a punctuation/function-word heuristic otherwise.

#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "ebmt/matcher.h"
#include "ebmt/tokenizer.h"

namespace ebmt {

class PartitionError : public std::runtime_error {
 public:
  enum class Kind { kMalformedConllu, kCycleDetected, kTooShort };

  PartitionError(Kind kind, int line, const std::string& what);

  Kind kind() const { return kind_; }
  int line() const { return line_; }

 private:
  Kind kind_;
  int line_;
};

struct DepToken {
  std::string form;
  int head = -1;  // 0-based index of the governor, -1 for the root
  std::string deprel;
};

struct DepTree {
  std::vector<DepToken> tokens;
  std::string sentence_id;
  std::string text;  // from "# text =", may be empty

  std::size_t root() const;
  /// True if `node` lies in the subtree of `top` (inclusive).
  bool dominates(std::size_t top, std::size_t node) const;
};

/// One tree per sentence. Multiword-token ranges and empty nodes are skipped.
std::vector<DepTree> load_parse(std::string_view conllu_text);

struct Partition {
  std::vector<TokenRange> chunks;

  friend bool operator==(const Partition&, const Partition&) = default;
};

/// Chunks are non-empty, ordered, adjacent, cover [0, n) and there are >= 2.
bool is_valid_partition(const Partition& p, std::size_t n);

inline constexpr std::size_t kDefaultMaxPartitions = 8;

/// Partitions over the tree's own tokens. Each partition cuts one complete,
/// contiguous subtree out of the sentence; what lies on either side of it
/// forms the other chunks. Fewest chunks first, then larger subtree, then
/// leftmost.
std::vector<Partition> enumerate_partitions(const DepTree& tree,
                                            std::size_t max_partitions = kDefaultMaxPartitions);

/// A parse mapped onto tokenizer output by comparing characters, so that
/// "n'" in the parse may cover the two tokens "n" and "'".
class AlignedParse {
 public:
  /// nullopt when the parse and the query do not spell the same text.
  static std::optional<AlignedParse> make(const DepTree& tree, const TokenizedText& query);

  /// Partitions of query range `range`, in query token positions. nullopt
  /// when the range edges fall inside a parse token.
  std::optional<std::vector<Partition>> partitions(
      TokenRange range, std::size_t max_partitions = kDefaultMaxPartitions) const;

 private:
  AlignedParse() = default;

  DepTree tree_;
  std::vector<bool> query_punct_;
  std::vector<std::optional<std::size_t>> query_to_parse_;  // boundary -> boundary
  std::vector<std::optional<std::size_t>> parse_to_query_;
};

/// Heuristic partitions used without a parse: cut after punctuation and
/// before auxiliaries/negation first, then before prepositions and
/// conjunctions, then balanced bi- and tripartitions.
/// Throws PartitionError(kTooShort) below two content tokens.
std::vector<Partition> fallback_chunks(const TokenizedText& query,
                                       std::size_t max_partitions = kDefaultMaxPartitions);

/// File stem used for the parse of `sentence`: the first 16 hex digits of
/// SHA-256 over the whitespace-normalised NFC text.
std::string text_hash(std::string_view sentence);

/// Directory of `<text_hash>.conllu` files.
class ParseIndex {
 public:
  explicit ParseIndex(std::filesystem::path dir) : dir_(std::move(dir)) {}

  std::filesystem::path path_for(std::string_view sentence) const;
  /// First tree of the matching file, if any. Malformed files throw.
  std::optional<DepTree> lookup(std::string_view sentence) const;

 private:
  std::filesystem::path dir_;
};

/// First tree of a CoNLL-U file. Throws PartitionError, or runtime_error if
/// the file cannot be read or holds no sentence.
DepTree load_parse_file(const std::filesystem::path& path);

}  // namespace ebmt
