// Exact-match quadruple scoring, tree completeness and decode timing.

#ifndef OTP_EVAL_HPP
#define OTP_EVAL_HPP

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "otp/decoder.hpp"
#include "otp/scorer.hpp"
#include "otp/tree_builder.hpp"

namespace otp {

struct QuadCounts {
  std::size_t tp = 0;
  std::size_t fp = 0;
  std::size_t fn = 0;

  double precision() const { return tp + fp == 0 ? 0.0 : static_cast<double>(tp) / static_cast<double>(tp + fp); }
  double recall() const { return tp + fn == 0 ? 0.0 : static_cast<double>(tp) / static_cast<double>(tp + fn); }
  double f1() const;
  QuadCounts& operator+=(const QuadCounts& o);
};

/// Multiset matching of one sentence's predicted and gold quadruples.
QuadCounts eval_quads(const std::vector<SentimentQuadruple>& pred, const std::vector<SentimentQuadruple>& gold);

/// Corpus-level counts; both lists are aligned by sentence.
QuadCounts eval_corpus(const std::vector<std::vector<SentimentQuadruple>>& pred,
                       const std::vector<std::vector<SentimentQuadruple>>& gold);

/// A tree counts when the chart grammar accepts it and quadruples can be
/// read off it.
bool is_complete(const OpinionTree& tree, const ChartGrammar& g, bool augmented);

/// Fraction of complete trees; 1.0 for an empty list.
double completeness(const std::vector<OpinionTree>& trees, const ChartGrammar& g, const std::vector<bool>& augmented);

struct TimingStats {
  std::size_t samples = 0;
  double mean = 0.0;
  double p50 = 0.0;
  double p95 = 0.0;
};

TimingStats timing_stats(std::vector<double> seconds);

struct BenchRow {
  int length = 0;
  TimingStats per_sentence;
  std::vector<double> run_means;  // one per repetition
};

struct BenchReport {
  std::vector<BenchRow> rows;
  TimingStats overall;
  std::optional<double> exponent;  // least-squares slope of log time on log length
  double run_spread = 0.0;         // largest (max - min) / mean of run means over rows
};

/// Least-squares slope of log(y) against log(x).
double loglog_slope(const std::vector<double>& x, const std::vector<double>& y);

/// Decode-only wall clock over the given tables, `repetitions` times each.
BenchReport bench_decode(const std::vector<SpanScoreTable>& tables, const ChartGrammar& g, int repetitions = 3,
                         const std::vector<bool>& fake_tokens = {});

/// Random tables over the given lengths; `per_length` sentences each.
std::vector<SpanScoreTable> random_tables(const std::vector<int>& lengths, int per_length, int labels,
                                          std::uint64_t seed);

struct Prediction {
  Sentence sentence;  // always augmented
  OpinionTree tree;
  std::vector<SentimentQuadruple> quads;  // raw token coordinates
  double decode_seconds = 0.0;
};

/// Scores, decodes and reads quadruples off one tokenized sentence.
Prediction predict(const Model& m, const ChartGrammar& g, const std::vector<std::string>& tokens);

struct EvalReport {
  QuadCounts counts;
  std::optional<double> completeness;  // only when trees were decoded
  std::map<SituationTag, std::size_t> situations;
  std::map<SituationTag, QuadCounts> by_situation;
  std::optional<TimingStats> timing;

  void write_text(std::ostream& os) const;
  void write_json(std::ostream& os) const;
};

void write_bench_text(std::ostream& os, const BenchReport& r);
void write_bench_json(std::ostream& os, const BenchReport& r);

}  // namespace otp

#endif  // OTP_EVAL_HPP
