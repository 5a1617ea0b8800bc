#include "ebmt/alignment_bank.h"

#include <filesystem>
#include <fstream>

#include <gtest/gtest.h>

#include "support.h"

namespace ebmt {
namespace {

namespace ts = testing_support;
using ts::fixture;

Bank alsace(const std::string& file = "alignments.txt") {
  return load_bank(fixture("alsace"), fixture("alsace/" + file));
}

BankError::Kind load_error(const std::string& file) {
  try {
    alsace(file);
  } catch (const BankError& e) {
    return e.kind();
  }
  ADD_FAILURE() << "no error for " << file;
  return BankError::Kind::kMalformedRecord;
}

TEST(LoadBank, ResolvesRecords) {
  Bank b = alsace();
  ASSERT_EQ(b.size(), 7u);
  const Alignment& bordeaux = b.alignment(5);
  EXPECT_EQ(bordeaux.segment_text, "Bordeaux");
  EXPECT_EQ(bordeaux.text_file_id, "RO1_F0005.Titre1");
  EXPECT_EQ(bordeaux.az_line, 17);
  EXPECT_EQ(bordeaux.az_subtree->rule()->name, "Bordeaux");
  EXPECT_EQ(b.alignment(4).segment_text, "comme ici dans la banlieue de Bordeaux");
  EXPECT_TRUE(b.alignment(4).az_address.is_root());
  EXPECT_EQ(b.source_expressions().size(), 6u);
}

TEST(LoadBank, SubtreeMatchesParsedFile) {
  Bank b = alsace();
  for (const auto& a : b.alignments()) {
    AzExpr e = parse_az(ts::read_file(fixture("alsace/" + a.az_file_id)));
    EXPECT_TRUE(subtree_equal(*a.az_subtree, *resolve(e, node_at_line(e, a.az_line))));
  }
}

TEST(LoadBank, Errors) {
  EXPECT_EQ(load_error("missing_az.txt"), BankError::Kind::kMissingFile);
  EXPECT_EQ(load_error("bad_offset.txt"), BankError::Kind::kOffsetOutOfRange);
  EXPECT_EQ(load_error("bad_line.txt"), BankError::Kind::kNoNodeAtLine);
  EXPECT_EQ(load_error("no_such_alignments.txt"), BankError::Kind::kMissingFile);
}

class TempDir {
 public:
  TempDir() {
    path_ = std::filesystem::temp_directory_path() /
            ("ebmt_bank_test_" + std::to_string(::testing::UnitTest::GetInstance()->random_seed()) +
             "_" + ::testing::UnitTest::GetInstance()->current_test_info()->name());
    std::filesystem::create_directories(path_);
  }
  ~TempDir() { std::filesystem::remove_all(path_); }
  std::string write(const std::string& name, const std::string& text) const {
    std::ofstream(path_ / name, std::ios::binary) << text;
    return (path_ / name).string();
  }
  std::string dir() const { return path_.string(); }

 private:
  std::filesystem::path path_;
};

TEST(LoadBank, MalformedRecordsAndParseErrors) {
  TempDir t;
  t.write("T", "une phrase\n");
  t.write("bad.az", ":a\n  'x\n");
  t.write("ok.az", ":a\n");
  auto kind = [&](const std::string& content) {
    try {
      load_bank(t.dir(), t.write("al.txt", content));
    } catch (const BankError& e) {
      return e.kind();
    }
    ADD_FAILURE() << content;
    return BankError::Kind::kMissingFile;
  };
  EXPECT_EQ(kind("T 0 3 ok.az\n"), BankError::Kind::kMalformedRecord);
  EXPECT_EQ(kind("T zero 3 ok.az 1\n"), BankError::Kind::kMalformedRecord);
  EXPECT_EQ(kind("T 0 3 ok.az 0\n"), BankError::Kind::kMalformedRecord);
  EXPECT_EQ(kind("T 0 0 ok.az 1\n"), BankError::Kind::kOffsetOutOfRange);
  EXPECT_EQ(kind("T 0 3 bad.az 1\n"), BankError::Kind::kParseError);
  EXPECT_EQ(kind("U 0 3 ok.az 1\n"), BankError::Kind::kMissingFile);
  EXPECT_EQ(load_bank(t.dir(), t.write("empty.txt", "# nothing\n\n")).size(), 0u);
}

TEST(LoadBank, OffsetsCountCodePoints) {
  TempDir t;
  t.write("T", "Inondations à Gerstheim\n");
  t.write("g.az", ":Gerstheim\n");
  Bank b = load_bank(t.dir(), t.write("al.txt", "T 14 9 g.az 1\n"));
  EXPECT_EQ(b.alignment(0).segment_text, "Gerstheim");
}

TEST(LoadBank, JsonFormat) {
  TempDir t;
  t.write("g.az", ":category\n  'cat\n  :ville\n");
  Bank b = load_bank(t.dir(), t.write("al.json",
                                      R"([{"text_id": "X", "segment": "Gerstheim",
                                          "az_file": "g.az", "az_line": 1},
                                          {"segment": "une ville", "az_file": "g.az", "az_line": 3}])"));
  ASSERT_EQ(b.size(), 2u);
  EXPECT_EQ(b.alignment(1).az_subtree->rule()->name, "ville");
  EXPECT_THROW(load_bank(t.dir(), t.write("bad.json", R"({"segment": 1})")), BankError);
  EXPECT_THROW(load_bank(t.dir(), t.write("bad2.json", R"([{"segment": "x"}])")), BankError);
}

TEST(BankBuilder, CollapsesIdenticalPairs) {
  BankBuilder bb;
  bb.add_expression("e", parse_az(":a\n  'x\n  :b\n"));
  bb.add("B", "e", 3).add("b.", "e", 3).add("b", "e", 1);
  Bank b = std::move(bb).build();
  EXPECT_EQ(b.size(), 2u);
  EXPECT_EQ(b.collapsed_duplicates(), 1u);
  EXPECT_THROW(BankBuilder().add("x", "nope", 1), BankError);
}

TEST(Validate, CleanBankHasNoViolations) { EXPECT_TRUE(validate(alsace()).empty()); }

TEST(Validate, UniquenessViolationReportedOnce) {
  const auto v = validate(alsace("uniqueness.txt"));
  ASSERT_EQ(v.size(), 1u);
  EXPECT_EQ(v[0].kind, Violation::Kind::kUniqueness);
  EXPECT_FALSE(v[0].is_warning);
  EXPECT_EQ(v[0].alignment_ids, (std::vector<std::size_t>{0, 7}));
}

TEST(Validate, MaximisationIsAWarning) {
  BankBuilder bb;
  bb.add_expression("e", parse_az(":side-info\n  'focus\n  :Bordeaux\n  'info\n  :banlieue\n"));
  bb.add("bordeaux", "e", 1).add("Bordeaux", "e", 3);
  const auto v = validate(std::move(bb).build());
  ASSERT_EQ(v.size(), 2u);  // same text on two nodes is also a Uniqueness error
  int warnings = 0;
  for (const auto& x : v) warnings += x.kind == Violation::Kind::kMaximisation && x.is_warning;
  EXPECT_EQ(warnings, 1);
}

TEST(MaximisationThroughList, NearestRuleIsUsed) {
  BankBuilder bb;
  bb.add_expression("e", parse_az(":all-of\n  'items\n  list\n    :assiette\n    :verre\n"));
  bb.add_expression("f", parse_az(":assiette\n"));
  bb.add("assiette", "e", 4).add("vaisselle", "e", 1);
  EXPECT_TRUE(validate(std::move(bb).build()).empty());
}

TEST(ExactLookup, FlexibleMatch) {
  Bank b = alsace();
  EXPECT_EQ(exact_alignments(b, tokenize("Alsace :")), (std::vector<std::size_t>{0}));
  EXPECT_EQ(exact_alignments(b, tokenize("pour la plus modestes")), (std::vector<std::size_t>{3}));
  EXPECT_TRUE(exact_alignments(b, tokenize("Strasbourg")).empty());
  EXPECT_TRUE(exact_alignments(b, tokenize(":")).empty());
  EXPECT_EQ(exact_lookup(b, tokenize("gerstheim")).size(), 1u);
}

TEST(Antimatchable, BanlieueBank) {
  Bank b = load_bank(fixture("banlieue"), fixture("banlieue/alignments.txt"));
  const auto q = tokenize("dans la banlieue de Gerstheim");
  auto cands = antimatchable(b, q);
  std::vector<std::size_t> ids;
  for (const auto& c : cands) ids.push_back(c.alignment_id);
  EXPECT_EQ(ids, (std::vector<std::size_t>{0, 1, 2, 3, 4, 6}));
  EXPECT_EQ(rank(cands).front().alignment_id, 1u);
}

// Random banks over a small vocabulary against a linear scan.
TEST(AntimatchableOracle, EqualsBruteForceScan) {
  ts::Rng rng(42);
  for (int round = 0; round < 250; ++round) {
    BankBuilder bb;
    bb.add_expression("e", parse_az(":a\n  'x\n  :b\n  'y\n  list\n    :c\n    .D\n"));
    const int n = ts::uniform(rng, 0, 12);
    for (int i = 0; i < n; ++i) {
      const std::string s = ts::random_sentence(rng, 1, 6);
      if (tokenize(s).content_size() == 0) continue;
      bb.add(s, "e", ts::pick(rng, std::vector<int>{1, 3, 5, 6, 7}));
    }
    Bank b = std::move(bb).build();
    const auto q = tokenize(ts::random_sentence(rng, 1, 6));

    std::vector<std::tuple<std::size_t, int, int>> expected;
    for (const auto& a : b.alignments()) {
      if (ts::oracle_same_content(a.segment_tokens, q)) continue;
      const int common = ts::oracle_common(q, a.segment_tokens);
      if (common > 0) {
        expected.emplace_back(a.id, common, static_cast<int>(a.segment_tokens.size()));
      }
    }
    std::vector<std::tuple<std::size_t, int, int>> got;
    for (const auto& c : antimatchable(b, q)) {
      got.emplace_back(c.alignment_id, c.common, c.length);
      EXPECT_DOUBLE_EQ(c.ratio, static_cast<double>(c.common) / c.length);
    }
    ASSERT_EQ(got, expected) << q.joined();
  }
}

}  // namespace
}  // namespace ebmt
