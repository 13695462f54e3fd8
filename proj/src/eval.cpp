#include "otp/eval.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <iomanip>
#include <ostream>
#include <random>

#include <json.hpp>

#include "otp/recovery.hpp"

namespace otp {

double QuadCounts::f1() const {
  const double p = precision(), r = recall();
  return p + r == 0.0 ? 0.0 : 2.0 * p * r / (p + r);
}

QuadCounts& QuadCounts::operator+=(const QuadCounts& o) {
  tp += o.tp;
  fp += o.fp;
  fn += o.fn;
  return *this;
}

QuadCounts eval_quads(const std::vector<SentimentQuadruple>& pred, const std::vector<SentimentQuadruple>& gold) {
  auto p = pred, g = gold;
  std::sort(p.begin(), p.end());
  std::sort(g.begin(), g.end());
  std::vector<SentimentQuadruple> common;
  std::set_intersection(p.begin(), p.end(), g.begin(), g.end(), std::back_inserter(common));
  QuadCounts c;
  c.tp = common.size();
  c.fp = p.size() - c.tp;
  c.fn = g.size() - c.tp;
  return c;
}

QuadCounts eval_corpus(const std::vector<std::vector<SentimentQuadruple>>& pred,
                       const std::vector<std::vector<SentimentQuadruple>>& gold) {
  if (pred.size() != gold.size()) throw ContractViolation("prediction and gold sentence counts differ");
  QuadCounts c;
  for (std::size_t i = 0; i < pred.size(); ++i) c += eval_quads(pred[i], gold[i]);
  return c;
}

bool is_complete(const OpinionTree& tree, const ChartGrammar& g, bool augmented) {
  if (!is_valid_tree(tree, g)) return false;
  try {
    recover_quads(tree, augmented);
  } catch (const MalformedTree&) {
    return false;
  }
  return true;
}

double completeness(const std::vector<OpinionTree>& trees, const ChartGrammar& g, const std::vector<bool>& augmented) {
  if (trees.empty()) return 1.0;
  std::size_t ok = 0;
  for (std::size_t i = 0; i < trees.size(); ++i) {
    ok += is_complete(trees[i], g, i < augmented.size() && augmented[i]);
  }
  return static_cast<double>(ok) / static_cast<double>(trees.size());
}

TimingStats timing_stats(std::vector<double> seconds) {
  TimingStats s;
  s.samples = seconds.size();
  if (seconds.empty()) return s;
  std::sort(seconds.begin(), seconds.end());
  double sum = 0.0;
  for (double x : seconds) sum += x;
  s.mean = sum / static_cast<double>(seconds.size());
  auto quantile = [&](double q) {
    const auto k = static_cast<std::size_t>(std::ceil(q * static_cast<double>(seconds.size()))) - 1;
    return seconds[std::min(k, seconds.size() - 1)];
  };
  s.p50 = quantile(0.50);
  s.p95 = quantile(0.95);
  return s;
}

double loglog_slope(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.size() != y.size() || x.size() < 2) throw ContractViolation("slope needs at least two points");
  double mx = 0, my = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += std::log(x[i]);
    my += std::log(y[i]);
  }
  mx /= static_cast<double>(x.size());
  my /= static_cast<double>(x.size());
  double sxy = 0, sxx = 0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double dx = std::log(x[i]) - mx;
    sxy += dx * (std::log(y[i]) - my);
    sxx += dx * dx;
  }
  if (sxx == 0.0) throw ContractViolation("slope needs at least two distinct lengths");
  return sxy / sxx;
}

BenchReport bench_decode(const std::vector<SpanScoreTable>& tables, const ChartGrammar& g, int repetitions,
                         const std::vector<bool>& fake_tokens) {
  BenchReport report;
  if (tables.empty() || repetitions <= 0) return report;
  using Clock = std::chrono::steady_clock;

  // Per-length samples, and per-length mean of each repetition.
  std::map<int, std::vector<double>> samples;
  std::map<int, std::vector<std::vector<double>>> per_run;
  std::vector<double> all;
  for (int rep = 0; rep < repetitions; ++rep) {
    for (std::size_t t = 0; t < tables.size(); ++t) {
      DecodeOptions opt;
      opt.fake_tokens = t < fake_tokens.size() && fake_tokens[t];
      const auto start = Clock::now();
      auto result = decode(tables[t], g, opt);
      const double secs = std::chrono::duration<double>(Clock::now() - start).count();
      if (result.tree.label.kind != SymbolKind::S) throw ContractViolation("decoder returned a non-S root");
      const int n = tables[t].length();
      samples[n].push_back(secs);
      auto& runs = per_run[n];
      runs.resize(static_cast<std::size_t>(repetitions));
      runs[static_cast<std::size_t>(rep)].push_back(secs);
      all.push_back(secs);
    }
  }
  std::vector<double> xs, ys;
  for (auto& [n, secs] : samples) {
    BenchRow row;
    row.length = n;
    row.per_sentence = timing_stats(secs);
    for (const auto& run : per_run[n]) row.run_means.push_back(timing_stats(run).mean);
    const auto [lo, hi] = std::minmax_element(row.run_means.begin(), row.run_means.end());
    if (row.per_sentence.mean > 0) report.run_spread = std::max(report.run_spread, (*hi - *lo) / row.per_sentence.mean);
    if (n > 0 && row.per_sentence.mean > 0) {
      xs.push_back(n);
      ys.push_back(row.per_sentence.mean);
    }
    report.rows.push_back(std::move(row));
  }
  report.overall = timing_stats(all);
  if (xs.size() >= 2) report.exponent = loglog_slope(xs, ys);
  return report;
}

std::vector<SpanScoreTable> random_tables(const std::vector<int>& lengths, int per_length, int labels,
                                          std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<SpanScoreTable> out;
  for (int n : lengths) {
    for (int k = 0; k < per_length; ++k) {
      SpanScoreTable t(n, labels);
      for (int i = 0; i < n; ++i) {
        for (int j = i + 1; j <= n; ++j) {
          for (int l = 0; l < labels; ++l) t.at(i, j, l) = u(rng);
        }
      }
      out.push_back(std::move(t));
    }
  }
  return out;
}

Prediction predict(const Model& m, const ChartGrammar& g, const std::vector<std::string>& tokens) {
  Prediction p;
  p.sentence = augment_tokens(tokens, {}, true);
  const auto table = score_all_spans(m.vocab.ids(p.sentence.tokens), m.params);
  DecodeOptions opt;
  opt.fake_tokens = true;
  const auto start = std::chrono::steady_clock::now();
  p.tree = decode(table, g, opt).tree;
  p.decode_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  p.quads = recover_quads(p.tree, true);
  return p;
}

namespace {

nlohmann::json counts_json(const QuadCounts& c) {
  return {{"precision", c.precision()}, {"recall", c.recall()}, {"f1", c.f1()},
          {"tp", c.tp},                 {"fp", c.fp},           {"fn", c.fn}};
}

nlohmann::json timing_json(const TimingStats& t) {
  return {{"samples", t.samples}, {"mean", t.mean}, {"p50", t.p50}, {"p95", t.p95}};
}

}  // namespace

void EvalReport::write_text(std::ostream& os) const {
  os << std::fixed << std::setprecision(4);
  os << "precision\t" << counts.precision() << '\n';
  os << "recall\t" << counts.recall() << '\n';
  os << "f1\t" << counts.f1() << '\n';
  os << "tp\t" << counts.tp << '\n' << "fp\t" << counts.fp << '\n' << "fn\t" << counts.fn << '\n';
  if (completeness) os << "completeness\t" << *completeness << '\n';
  for (const auto& [tag, n] : situations) os << "situation\t" << to_string(tag) << '\t' << n << '\n';
  for (const auto& [tag, c] : by_situation) os << "f1_by_situation\t" << to_string(tag) << '\t' << c.f1() << '\n';
  if (timing) {
    os << std::setprecision(6);
    os << "decode_seconds_mean\t" << timing->mean << '\n';
    os << "decode_seconds_p50\t" << timing->p50 << '\n';
    os << "decode_seconds_p95\t" << timing->p95 << '\n';
  }
}

void EvalReport::write_json(std::ostream& os) const {
  nlohmann::json j = counts_json(counts);
  if (completeness) j["completeness"] = *completeness;
  j["situations"] = nlohmann::json::object();
  for (const auto& [tag, n] : situations) j["situations"][std::string(to_string(tag))] = n;
  j["by_situation"] = nlohmann::json::object();
  for (const auto& [tag, c] : by_situation) j["by_situation"][std::string(to_string(tag))] = counts_json(c);
  if (timing) j["timing"] = timing_json(*timing);
  os << j.dump(2) << '\n';
}

void write_bench_text(std::ostream& os, const BenchReport& r) {
  os << "length\tsamples\tmean_s\tp50_s\tp95_s\n";
  os << std::setprecision(6);
  for (const auto& row : r.rows) {
    os << row.length << '\t' << row.per_sentence.samples << '\t' << row.per_sentence.mean << '\t'
       << row.per_sentence.p50 << '\t' << row.per_sentence.p95 << '\n';
  }
  os << "overall\t" << r.overall.samples << '\t' << r.overall.mean << '\t' << r.overall.p50 << '\t' << r.overall.p95
     << '\n';
  if (r.exponent) os << "exponent\t" << *r.exponent << '\n';
  os << "run_spread\t" << r.run_spread << '\n';
}

void write_bench_json(std::ostream& os, const BenchReport& r) {
  nlohmann::json j;
  j["rows"] = nlohmann::json::array();
  for (const auto& row : r.rows) {
    auto jr = timing_json(row.per_sentence);
    jr["length"] = row.length;
    jr["run_means"] = row.run_means;
    j["rows"].push_back(jr);
  }
  j["overall"] = timing_json(r.overall);
  if (r.exponent) j["exponent"] = *r.exponent;
  j["run_spread"] = r.run_spread;
  os << j.dump(2) << '\n';
}

}  // namespace otp
