#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include "otp/corpus.hpp"
#include "otp/synthetic.hpp"
#include "test_support.hpp"

namespace otp {
namespace {

using test::quad;
using test::sp;

namespace fs = std::filesystem;

fs::path scratch_dir(const std::string& name) {
  auto dir = fs::temp_directory_path() / ("otp_test_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

TEST(Corpus, CanonicalLine) {
  CorpusRecord r{test::words("the pizza was great"),
                 {quad(sp(1, 2), "FOOD#QUALITY", sp(3, 4), Polarity::Positive),
                  quad(std::nullopt, "RESTAURANT#GENERAL", std::nullopt, Polarity::Neutral)},
                 Split::Test,
                 7};
  const std::string line = "test\t7\tthe pizza was great\t1,2;FOOD#QUALITY;positive;3,4\t-;RESTAURANT#GENERAL;neutral;-";
  EXPECT_EQ(format_record(r), line);
  EXPECT_EQ(parse_record(line, 1), r);
}

TEST(Corpus, RoundTripIsByteIdentical) {
  auto records = synthetic_corpus(60, 3);
  records[4].split = Split::Validation;
  std::ostringstream first;
  write_corpus(first, records);
  std::istringstream in(first.str());
  auto back = read_corpus(in);
  EXPECT_EQ(back, records);
  std::ostringstream second;
  write_corpus(second, back);
  EXPECT_EQ(second.str(), first.str());
}

TEST(Corpus, BlankLinesAndDevAlias) {
  std::istringstream in("\ndev\t1\tgood food\t-;FOOD#QUALITY;positive;0,1\n\r\n");
  auto r = read_corpus(in);
  ASSERT_EQ(r.size(), 1u);
  EXPECT_EQ(r[0].split, Split::Validation);
}

TEST(Corpus, MalformedLinesNameTheLine) {
  const std::vector<std::string> bad = {
      "train\t1",                                               // too few fields
      "holdout\t1\ta b",                                        // unknown split
      "train\tx\ta b",                                          // non-numeric source line
      "train\t1\ta b\t0,1;FOOD#QUALITY;positive",               // three quad fields
      "train\t1\ta b\t0,1;FOOD#QUALITY;glad;1,2",               // unknown polarity
      "train\t1\ta b\t0,3;FOOD#QUALITY;positive;1,2",           // span past the end
      "train\t1\ta b\t1,1;FOOD#QUALITY;positive;1,2",           // empty span
      "train\t1\ta b\t0-1;FOOD#QUALITY;positive;1,2",           // bad span syntax
      "train\t1\ta b\t0,1;;positive;1,2",                       // empty category
  };
  for (const auto& line : bad) {
    std::istringstream in("train\t1\tfine\n\n" + line + "\n");
    try {
      read_corpus(in);
      ADD_FAILURE() << "accepted: " << line;
    } catch (const FormatError& e) {
      EXPECT_EQ(std::string(e.what()).rfind("line 3:", 0), 0u) << e.what();
    }
  }
}

TEST(Corpus, AcosImport) {
  std::istringstream in(
      "The pizza was great\t1,2 food#quality 2 3,4\n"
      "\n"
      "Nice !\t-1,-1 RESTAURANT#GENERAL 1 0,1\t-1,-1 RESTAURANT#GENERAL 0 -1,-1\n");
  auto r = import_acos_tsv(in, Split::Train);
  EXPECT_EQ(r.lines, 2u);
  ASSERT_EQ(r.records.size(), 2u);
  EXPECT_EQ(r.records[0].source_line, 1);
  EXPECT_EQ(r.records[0].quads, (std::vector{quad(sp(1, 2), "FOOD#QUALITY", sp(3, 4), Polarity::Positive)}));
  EXPECT_EQ(r.records[1].source_line, 3);
  EXPECT_EQ(r.records[1].quads[0], quad(std::nullopt, "RESTAURANT#GENERAL", sp(0, 1), Polarity::Neutral));
  EXPECT_EQ(r.records[1].quads[1], quad(std::nullopt, "RESTAURANT#GENERAL", std::nullopt, Polarity::Negative));
  EXPECT_EQ(r.skip_rate(), 0.0);
}

TEST(Corpus, AcosPolarityCodesAreConfigurable) {
  AcosOptions opt;
  opt.polarity_codes = {Polarity::Positive, Polarity::Neutral, Polarity::Negative};
  std::istringstream in("bad food\t1,2 FOOD#QUALITY 0 0,1\n");
  EXPECT_EQ(import_acos_tsv(in, Split::Train, opt).records[0].quads[0].polarity, Polarity::Positive);
}

TEST(Corpus, AcosSkipReport) {
  std::ostringstream file;
  std::set<int> nested = {17, 90, 163};
  for (int line = 1; line <= 200; ++line) {
    if (nested.count(line)) file << "the battery life is long\t1,3 LAPTOP#GENERAL 2 2,3\n";
    else file << "the pizza was great\t1,2 FOOD#QUALITY 2 3,4\n";
  }
  std::istringstream in(file.str());
  auto r = import_acos_tsv(in, Split::Train);
  EXPECT_EQ(r.records.size(), 197u);
  ASSERT_EQ(r.skipped.size(), 3u);
  for (const auto& s : r.skipped) {
    EXPECT_TRUE(nested.count(s.source_line));
    EXPECT_EQ(s.reason, UnparseableReason::NestedSpans);
  }
  EXPECT_DOUBLE_EQ(r.skip_rate(), 0.015);
}

TEST(Corpus, AcosMalformed) {
  for (const std::string bad : {"a b\t0,1 X 3 1,2", "a b\t0,1 X 1", "\t0,1 X 1 1,2", "a b\t0,1 X 1 2,9"}) {
    std::istringstream in("ok\t0,1 X 1 -1,-1\n" + bad + "\n");
    try {
      import_acos_tsv(in, Split::Train);
      ADD_FAILURE() << "accepted: " << bad;
    } catch (const FormatError& e) {
      EXPECT_EQ(std::string(e.what()).rfind("line 2:", 0), 0u) << e.what();
    }
  }
}

TEST(Corpus, ToSentenceAugments) {
  CorpusRecord r{test::words("nice"), {quad(sp(0, 1), "X", std::nullopt, Polarity::Positive)}, Split::Train, 1};
  EXPECT_FALSE(to_sentence(r, false).augmented);
  auto s = to_sentence(r, true);
  EXPECT_TRUE(s.augmented);
  EXPECT_EQ(s.tokens, test::words("FA FO nice"));
  r.quads.push_back(quad(std::nullopt, "X", std::nullopt, Polarity::Negative));
  EXPECT_TRUE(to_sentence(r, false).augmented);
}

TEST(Corpus, VocabularyAndExamples) {
  auto records = synthetic_corpus(10, 5);
  auto vocab = build_vocabulary(records);
  EXPECT_EQ(vocab.word(0), "<unk>");
  EXPECT_EQ(vocab.word(1), "FA");
  EXPECT_EQ(vocab.word(2), "FO");
  auto g = build_grammar(synthetic_categories(), all_families());
  auto ex = make_examples(records, g, vocab);
  ASSERT_EQ(ex.size(), 10u);
  for (std::size_t i = 0; i < ex.size(); ++i) {
    EXPECT_EQ(ex[i].ids.size(), records[i].tokens.size() + 2);
    EXPECT_EQ(std::count(ex[i].ids.begin(), ex[i].ids.end(), Vocabulary::kUnk), 0);
  }
  EXPECT_EQ(corpus_categories(records).front() <= corpus_categories(records).back(), true);
}

TEST(Synthetic, CoversEveryTagAndValidates) {
  auto records = synthetic_corpus(500, 1);
  std::map<SituationTag, int> tags;
  for (const auto& r : records) {
    auto s = validate_parseable(to_sentence(r, false));
    ASSERT_TRUE(s.parseable());
    ++tags[s.tag];
    EXPECT_EQ(r.tokens.back(), ".");
  }
  for (auto t : {SituationTag::Basic, SituationTag::OneToMany, SituationTag::MonoImplicit, SituationTag::BiImplicit,
                 SituationTag::CrossMapping})
    EXPECT_EQ(tags[t], 100) << to_string(t);
}

TEST(Synthetic, Seeded) {
  EXPECT_EQ(synthetic_corpus(20, 8), synthetic_corpus(20, 8));
  EXPECT_NE(synthetic_corpus(20, 8), synthetic_corpus(20, 9));
  EXPECT_THROW(synthetic_record(SituationTag::Unparseable, 1), ContractViolation);
}

TEST(RunConfig, Defaults) {
  auto c = parse_run_config("{}");
  EXPECT_EQ(c.d, 64);
  EXPECT_EQ(c.hidden, 128);
  EXPECT_EQ(c.train.learning_rate, 0.05);
  EXPECT_EQ(c.train.batch_size, 8);
  EXPECT_EQ(c.families, all_families());
}

TEST(RunConfig, ParsesKnownKeys) {
  auto dir = scratch_dir("config");
  std::ofstream(dir / "cats.txt") << "FOOD#QUALITY\nSERVICE#GENERAL\n";
  std::ofstream(dir / "train.tsv") << "";
  auto c = parse_run_config(R"({
    "categories_file": "cats.txt", "families": ["one_to_many"], "d": 16, "hidden": 24, "seed": 9,
    "train": {"learning_rate": 0.1, "epochs": 3, "batch_size": 2, "optimizer": "adam"},
    "acos_polarity_codes": ["positive", "neutral", "negative"],
    "train_path": "train.tsv", "checkpoint_path": "model.bin"})",
                            dir.string());
  EXPECT_EQ(c.categories, (std::vector<std::string>{"FOOD#QUALITY", "SERVICE#GENERAL"}));
  EXPECT_EQ(c.families, (std::set<RuleFamily>{RuleFamily::OneToMany}));
  EXPECT_EQ(c.d, 16);
  EXPECT_EQ(c.train.seed, 9u);
  EXPECT_EQ(c.train.optimizer, Optimizer::Adam);
  EXPECT_EQ(c.acos.polarity_codes[0], Polarity::Positive);
  EXPECT_EQ(*c.train_path, (dir / "train.tsv").string());
  EXPECT_EQ(*c.checkpoint_path, (dir / "model.bin").string());
}

TEST(RunConfig, Rejections) {
  for (const std::string bad : {R"({"depth": 3})", R"({"train": {"lr": 0.1}})", R"({"d": "big"})", R"([1])",
                                R"({"families": ["fancy"]})", R"({"train": {"optimizer": "rmsprop"}})",
                                R"({"train_path": "does/not/exist.tsv"})", R"({"d": 0})",
                                R"({"train": {"learning_rate": -1}})", "{", R"({"acos_polarity_codes": ["positive"]})"}) {
    EXPECT_THROW(parse_run_config(bad), ConfigError) << bad;
  }
  EXPECT_THROW(load_run_config("/nonexistent/config.json"), ConfigError);
}

}  // namespace
}  // namespace otp
