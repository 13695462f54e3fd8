#include <gtest/gtest.h>

#include <json.hpp>
#include <sstream>

#include "otp/eval.hpp"
#include "otp/recovery.hpp"
#include "test_support.hpp"

namespace otp {
namespace {

using test::quad;
using test::sp;

const SentimentQuadruple kA = quad(sp(0, 1), "FOOD#QUALITY", sp(2, 3), Polarity::Positive);
const SentimentQuadruple kB = quad(sp(4, 5), "SERVICE#GENERAL", std::nullopt, Polarity::Negative);
const SentimentQuadruple kC = quad(std::nullopt, "FOOD#QUALITY", sp(2, 3), Polarity::Positive);

TEST(Eval, HalfOverlap) {
  auto c = eval_quads({kA, kB}, {kA, kC});
  EXPECT_EQ(c.tp, 1u);
  EXPECT_EQ(c.fp, 1u);
  EXPECT_EQ(c.fn, 1u);
  EXPECT_DOUBLE_EQ(c.precision(), 0.5);
  EXPECT_DOUBLE_EQ(c.recall(), 0.5);
  EXPECT_DOUBLE_EQ(c.f1(), 0.5);
}

TEST(Eval, EdgeCases) {
  EXPECT_EQ(eval_quads({}, {}).f1(), 0.0);
  auto c = eval_quads({kA}, {});
  EXPECT_EQ(c.fp, 1u);
  EXPECT_EQ(c.precision(), 0.0);
  c = eval_quads({kA, kB}, {kA, kB});
  EXPECT_EQ(c.f1(), 1.0);
  // Polarity alone differs.
  auto flipped = kA;
  flipped.polarity = Polarity::Negative;
  EXPECT_EQ(eval_quads({flipped}, {kA}).tp, 0u);
}

TEST(Eval, MultisetMatching) {
  auto c = eval_quads({kA, kA, kA}, {kA, kA});
  EXPECT_EQ(c.tp, 2u);
  EXPECT_EQ(c.fp, 1u);
  EXPECT_EQ(c.fn, 0u);
  EXPECT_EQ(eval_quads({kB, kA}, {kA, kB}).tp, 2u);
}

TEST(Eval, CorpusSumsCounts) {
  auto c = eval_corpus({{kA}, {kB, kC}}, {{kA}, {kB}});
  EXPECT_EQ(c.tp, 2u);
  EXPECT_EQ(c.fp, 1u);
  EXPECT_EQ(c.fn, 0u);
  EXPECT_DOUBLE_EQ(c.f1(), 0.8);
  EXPECT_THROW(eval_corpus({{kA}}, {}), ContractViolation);
}

TEST(Eval, Completeness) {
  const auto g = test::full_grammar();
  const auto cg = compile_chart_grammar(g);
  const auto tables = random_tables({3, 4, 5, 6, 7}, 2, static_cast<int>(cg.labels.scored_size()), 4);
  std::vector<OpinionTree> trees;
  for (const auto& t : tables) trees.push_back(decode(t, cg).tree);
  trees.pop_back();
  EXPECT_EQ(completeness(trees, cg, {}), 1.0);
  auto broken = trees.front();
  broken.label = Symbol::of(SymbolKind::Q);  // root must be S
  trees.push_back(broken);
  EXPECT_EQ(trees.size(), 10u);
  EXPECT_DOUBLE_EQ(completeness(trees, cg, {}), 0.9);
  EXPECT_EQ(completeness({}, cg, {}), 1.0);
}

TEST(Eval, IncompleteWhenRecoveryFails) {
  const auto cg = compile_chart_grammar(test::full_grammar());
  // Valid under the grammar but with an aspect inside the fake prefix, which
  // recovery rejects for augmented sentences.
  const auto at = Symbol::of(SymbolKind::AT);
  const auto ot = Symbol::of(SymbolKind::OT);
  OpinionTree q = make_node(Symbol::of(SymbolKind::Q),
                            {make_node(Symbol::aspect("FOOD#QUALITY"), {make_leaf(at, 0, 1)}),
                             make_node(Symbol::opinion(Polarity::Positive), {make_leaf(ot, 1, 3)})});
  OpinionTree s = make_node(Symbol::of(SymbolKind::S), {q});
  ASSERT_TRUE(is_valid_tree(s, cg));
  EXPECT_TRUE(is_complete(s, cg, false));
  EXPECT_FALSE(is_complete(s, cg, true));
}

TEST(Eval, TimingStats) {
  auto s = timing_stats({5, 1, 4, 2, 3});
  EXPECT_EQ(s.samples, 5u);
  EXPECT_DOUBLE_EQ(s.mean, 3.0);
  EXPECT_EQ(s.p50, 3.0);
  EXPECT_EQ(s.p95, 5.0);
  std::vector<double> hundred;
  for (int i = 1; i <= 100; ++i) hundred.push_back(i);
  s = timing_stats(hundred);
  EXPECT_EQ(s.p50, 50.0);
  EXPECT_EQ(s.p95, 95.0);
  EXPECT_EQ(timing_stats({}).samples, 0u);
}

TEST(Eval, LogLogSlope) {
  std::vector<double> x = {8, 16, 32, 64}, y;
  for (double v : x) y.push_back(0.25 * v * v * v);
  EXPECT_NEAR(loglog_slope(x, y), 3.0, 1e-12);
  EXPECT_THROW(loglog_slope({4}, {1}), ContractViolation);
  EXPECT_THROW(loglog_slope({4, 4}, {1, 2}), ContractViolation);
}

TEST(Eval, BenchShape) {
  const auto cg = compile_chart_grammar(build_grammar({"X"}, all_families()));
  const int labels = static_cast<int>(cg.labels.scored_size());
  EXPECT_TRUE(bench_decode({}, cg).rows.empty());
  EXPECT_FALSE(bench_decode({}, cg).exponent);
  auto r = bench_decode(random_tables({4, 8}, 3, labels, 1), cg, 2);
  ASSERT_EQ(r.rows.size(), 2u);
  EXPECT_EQ(r.rows[0].length, 4);
  EXPECT_EQ(r.rows[0].per_sentence.samples, 6u);
  EXPECT_EQ(r.rows[0].run_means.size(), 2u);
  EXPECT_EQ(r.overall.samples, 12u);
  EXPECT_TRUE(r.exponent);
  std::ostringstream text, json;
  write_bench_text(text, r);
  write_bench_json(json, r);
  EXPECT_NE(text.str().find("exponent\t"), std::string::npos);
  auto j = nlohmann::json::parse(json.str());
  EXPECT_EQ(j["rows"].size(), 2u);
  EXPECT_EQ(j["overall"]["samples"], 12);
}

TEST(Eval, RandomTablesAreSeeded) {
  auto a = random_tables({3, 5}, 2, 4, 9), b = random_tables({3, 5}, 2, 4, 9);
  ASSERT_EQ(a.size(), 4u);
  EXPECT_EQ(a[3].length(), 5);
  for (std::size_t k = 0; k < a.size(); ++k) EXPECT_EQ(a[k](0, a[k].length(), 3), b[k](0, b[k].length(), 3));
}

TEST(Eval, ReportFormats) {
  EvalReport r;
  r.counts = eval_quads({kA, kB}, {kA, kC});
  r.completeness = 0.9;
  r.situations[SituationTag::Basic] = 3;
  r.by_situation[SituationTag::Basic] = r.counts;
  r.timing = timing_stats({0.5, 1.5});
  std::ostringstream text, json;
  r.write_text(text);
  r.write_json(json);
  EXPECT_NE(text.str().find("f1\t0.5000\n"), std::string::npos);
  EXPECT_NE(text.str().find("completeness\t0.9000\n"), std::string::npos);
  auto j = nlohmann::json::parse(json.str());
  EXPECT_DOUBLE_EQ(j["f1"].get<double>(), 0.5);
  EXPECT_EQ(j["tp"], 1);
  EXPECT_DOUBLE_EQ(j["completeness"].get<double>(), 0.9);
  EXPECT_EQ(j["situations"]["basic"], 3);
  EXPECT_DOUBLE_EQ(j["timing"]["mean"].get<double>(), 1.0);
}

}  // namespace
}  // namespace otp
