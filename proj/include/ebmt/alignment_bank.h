// The bank of text segment <-> AZee node alignments.
//
// Alignment records are one per line:
//
//   TEXT_ID START LEN AZ_FILE LINE
//
// START and LEN are code-point offsets into the file named TEXT_ID in the
// corpus directory, LINE is the 1-based line of the aligned node in AZ_FILE.
// A JSON array of {text_id, segment, az_file, az_line} objects is accepted
// as well; there the segment text is taken verbatim.

#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <unordered_map>
#include <vector>

#include "ebmt/azee_expr.h"
#include "ebmt/matcher.h"
#include "ebmt/tokenizer.h"

namespace ebmt {

struct Alignment {
  std::size_t id = 0;
  std::string text_file_id;
  std::size_t char_start = 0;
  std::size_t char_len = 0;
  std::string az_file_id;
  int az_line = 0;
  std::string segment_text;
  TokenizedText segment_tokens;
  AzNodePtr az_subtree;
  NodeAddress az_address;  // position of az_subtree in its source expression
};

class BankError : public std::runtime_error {
 public:
  enum class Kind {
    kMissingFile,
    kOffsetOutOfRange,
    kNoNodeAtLine,
    kParseError,
    kMalformedRecord,
  };

  BankError(Kind kind, std::string subject, int line, const std::string& what);

  Kind kind() const { return kind_; }
  /// File id or record description the error refers to.
  const std::string& subject() const { return subject_; }
  int line() const { return line_; }

 private:
  Kind kind_;
  std::string subject_;
  int line_;
};

std::string_view to_string(BankError::Kind kind);

/// Immutable once built; safe for concurrent reads.
class Bank {
 public:
  const std::vector<Alignment>& alignments() const { return alignments_; }
  const Alignment& alignment(std::size_t id) const { return alignments_.at(id); }
  std::size_t size() const { return alignments_.size(); }

  const std::map<std::string, AzExpr>& source_expressions() const { return sources_; }
  const AzExpr& source_expression(const std::string& az_file_id) const;

  /// content_key(segment) -> alignment ids, ascending.
  const std::unordered_map<std::string, std::vector<std::size_t>>& exact_index() const {
    return exact_index_;
  }
  /// match_key(token) -> alignment ids, ascending, for every content token.
  const std::unordered_map<std::string, std::vector<std::size_t>>& token_index() const {
    return token_index_;
  }

  /// Number of input records folded into an earlier identical alignment.
  std::size_t collapsed_duplicates() const { return collapsed_; }

 private:
  friend class BankBuilder;

  std::vector<Alignment> alignments_;
  std::map<std::string, AzExpr> sources_;
  std::unordered_map<std::string, std::vector<std::size_t>> exact_index_;
  std::unordered_map<std::string, std::vector<std::size_t>> token_index_;
  std::size_t collapsed_ = 0;
};

/// Assembles a Bank from in-memory expressions and segments.
class BankBuilder {
 public:
  /// Registers an expression under `az_file_id`; replaces any previous one.
  BankBuilder& add_expression(std::string az_file_id, AzExpr expr);

  /// Aligns `segment` with the node starting at `az_line` of a registered
  /// expression. Throws BankError(kNoNodeAtLine / kMissingFile).
  BankBuilder& add(std::string segment, const std::string& az_file_id, int az_line,
                   std::string text_file_id = {}, std::size_t char_start = 0);

  /// Same, with the node given by address.
  BankBuilder& add_at(std::string segment, const std::string& az_file_id,
                      const NodeAddress& address, std::string text_file_id = {},
                      std::size_t char_start = 0);

  Bank build() &&;

 private:
  Bank bank_;
};

Bank load_bank(const std::filesystem::path& corpus_dir,
               const std::filesystem::path& alignment_file);

struct Violation {
  enum class Kind { kUniqueness, kMaximisation };
  Kind kind;
  bool is_warning;
  std::vector<std::size_t> alignment_ids;
  std::string message;
};

std::vector<Violation> validate(const Bank& bank);

/// Alignment ids whose segment is flexibly equal to `query`; one id per
/// distinct subtree, ascending.
std::vector<std::size_t> exact_alignments(const Bank& bank, const TokenizedText& query);

/// Distinct subtrees aligned with segments flexibly equal to `query`.
std::vector<AzNodePtr> exact_lookup(const Bank& bank, const TokenizedText& query);

/// Every non-exact alignment sharing at least one content token with
/// `query`, scored, in alignment order (unranked).
std::vector<MatchCandidate> antimatchable(const Bank& bank, const TokenizedText& query);

}  // namespace ebmt
