// Recursive translation of a French query into AZee expressions: exact
// match, then substitution inside a close example, then partition into
// chunks joined by `sign-supported-spoken`.

#pragma once

#include <cstddef>
#include <memory>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "ebmt/alignment_bank.h"
#include "ebmt/azee_expr.h"
#include "ebmt/matcher.h"
#include "ebmt/partitioner.h"
#include "ebmt/tokenizer.h"

namespace ebmt {

struct TranslateConfig {
  std::size_t max_results = 12;
  int max_depth = 6;
  std::size_t max_partitions = kDefaultMaxPartitions;
  std::size_t max_combinations = 32;  // per anti-match alignment or partition
  RankConfig ranking;
  /// Run every strategy at every level instead of stopping at the first
  /// one that yields something.
  bool exhaustive = false;
};

class TranslateError : public std::runtime_error {
 public:
  enum class Kind { kEmptyQuery, kNoTranslation, kTooFewUnits, kBadConfig };

  TranslateError(Kind kind, const std::string& what) : std::runtime_error(what), kind_(kind) {}
  Kind kind() const { return kind_; }

 private:
  Kind kind_;
};

struct Derivation;
using DerivationPtr = std::shared_ptr<const Derivation>;

struct Substitution {
  NodeAddress address;
  std::string anti_text;
  DerivationPtr replacement;
};

struct Derivation {
  enum class Kind { kExactMatch, kAntiMatch, kFallback };

  Kind kind = Kind::kExactMatch;
  std::string text;                  // the (sub-)query this step translated
  std::size_t alignment_id = 0;      // ExactMatch, AntiMatch
  std::vector<Substitution> substitutions;  // AntiMatch
  Partition partition;               // Fallback; ranges over the root query
  std::vector<DerivationPtr> units;  // Fallback
};

std::string_view to_string(Derivation::Kind kind);

/// Number of steps of `kind` in the whole derivation tree.
int count_steps(const Derivation& d, Derivation::Kind kind);
/// Longest chain of nested steps; an exact match has height 0.
int derivation_height(const Derivation& d);

/// Rebuilds the expression a derivation describes.
AzExpr replay(const Bank& bank, const Derivation& d);

struct TranslationCandidate {
  AzExpr expr;
  DerivationPtr derivation;
  int fallback_count = 0;
  int substitution_count = 0;
  int depth = 0;
};

/// `:sign-supported-spoken 'units list [...]`. Throws kTooFewUnits below 2.
AzExpr make_sss(const std::vector<AzExpr>& units);
AzNodePtr make_sss_node(std::vector<AzNodePtr> units);

class Translator {
 public:
  explicit Translator(const Bank& bank, TranslateConfig cfg = {});

  /// Ranked candidates. `parse`, when given and consistent with the query,
  /// guides partitioning. Throws kEmptyQuery, kNoTranslation.
  std::vector<TranslationCandidate> translate(std::string_view query,
                                              const DepTree* parse = nullptr) const;

  std::vector<AzExpr> translate_exact(const TokenizedText& query) const;
  std::vector<TranslationCandidate> translate_by_antimatch(const TokenizedText& query) const;
  std::vector<TranslationCandidate> translate_by_partition(const TokenizedText& query,
                                                           const DepTree* parse = nullptr) const;

  const TranslateConfig& config() const { return cfg_; }

 private:
  const Bank& bank_;
  TranslateConfig cfg_;
};

inline std::vector<TranslationCandidate> translate(const Bank& bank, std::string_view query,
                                                   const DepTree* parse = nullptr,
                                                   const TranslateConfig& cfg = {}) {
  return Translator(bank, cfg).translate(query, parse);
}

}  // namespace ebmt
