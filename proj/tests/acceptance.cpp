// Acceptance run: one PASS/FAIL/SKIP line per criterion.
//
//   acceptance [--only 1,3,5] [--strict] [--acos-restaurant DIR] [--acos-laptop DIR]
//
// ACOS directories may also come from OTP_ACOS_RESTAURANT / OTP_ACOS_LAPTOP.
// Each holds the train/dev/test TSV files of one domain.

#include <algorithm>
#include <chrono>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <iomanip>
#include <iostream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "otp/corpus.hpp"
#include "otp/decoder.hpp"
#include "otp/eval.hpp"
#include "otp/oracle.hpp"
#include "otp/recovery.hpp"
#include "otp/synthetic.hpp"
#include "otp/trainer.hpp"
#include "otp/tree_builder.hpp"

namespace fs = std::filesystem;
using namespace otp;

namespace {

// Tolerances and limits.
constexpr int kTablesPerLength = 100;
constexpr int kRoundTripSentences = 600;
constexpr int kRandomDecodes = 1000;
constexpr int kGradientInstances = 10;
constexpr double kGradientTolerance = 1e-4;
constexpr int kOverfitSentences = 50;
constexpr int kOverfitEpochs = 500;
constexpr int kPruneTrees = 1000;
constexpr double kExponentLow = 2.5;
constexpr double kExponentHigh = 3.5;
constexpr double kSkipRateTarget = 0.015;
constexpr double kSkipRateSlack = 0.010;
constexpr double kBasicLow = 0.40;
constexpr double kBasicHigh = 0.60;

// Criteria that are known not to pass at desk scale; README explains each.
const std::set<int> kKnownShortfalls = {6, 8};

enum class Status { Pass, Fail, Skip };

struct Outcome {
  Status status = Status::Fail;
  std::string detail;
};

struct Criterion {
  int id;
  std::string name;
  double time_limit;  // seconds; 0 means none
  std::function<Outcome()> run;
};

Outcome verdict(bool ok, std::string detail) { return {ok ? Status::Pass : Status::Fail, std::move(detail)}; }

std::vector<std::string> categories(int count) {
  std::vector<std::string> out;
  for (int c = 0; c < count; ++c) out.push_back("C" + std::to_string(c));
  return out;
}

// 1 and 2 share the protocol; only the cost term differs.
Outcome cky_against_enumeration(bool loss_augmented) {
  std::mt19937_64 rng(loss_augmented ? 2 : 1);
  const int lo = loss_augmented ? 1 : 3;
  const int hi = loss_augmented ? 6 : 7;
  int compared = 0, mismatched = 0, tied = 0;
  for (int n = lo; n <= hi; ++n) {
    const Grammar g = build_grammar(categories(n <= 5 ? 2 : 1), all_families());
    const ChartGrammar cg = compile_chart_grammar(g);
    const int labels = static_cast<int>(cg.labels.scored_size());
    std::vector<SpanScoreTable> tables;
    std::vector<LabeledSpanSet> golds;
    for (int k = 0; k < kTablesPerLength; ++k) {
      tables.push_back(oracle::dyadic_table(n, labels, rng));
      if (loss_augmented) golds.push_back(tree_to_spans(decode(oracle::dyadic_table(n, labels, rng), cg).tree, cg.labels));
    }
    // Gold membership by direct lookup on (i, j, label).
    auto cell = [&](const LabeledSpan& s) {
      return (static_cast<std::size_t>(s.begin) * static_cast<std::size_t>(n + 1) + static_cast<std::size_t>(s.end)) *
                 static_cast<std::size_t>(labels + 1) +
             static_cast<std::size_t>(s.label);
    };
    std::vector<std::vector<char>> in_gold(golds.size(),
                                           std::vector<char>(static_cast<std::size_t>((n + 1) * (n + 1) * (labels + 1))));
    for (std::size_t t = 0; t < golds.size(); ++t) {
      for (const auto& s : golds[t]) in_gold[t][cell(s)] = 1;
    }
    oracle::TreeEnumerator e(g, false);
    const auto best = oracle::exhaustive_best(e, n, tables, [&](std::size_t t, const LabeledSpanSet& s) {
      if (!loss_augmented) return 0.0;
      int miss = 0;
      for (const auto& span : s) miss += !in_gold[t][cell(span)];
      return static_cast<double>(miss);
    });
    for (std::size_t t = 0; t < tables.size(); ++t) {
      const auto r = loss_augmented ? loss_augmented_decode(tables[t], cg, golds[t]) : decode(tables[t], cg);
      bool ok = r.score == best[t].score;
      if (best[t].ties == 0) {
        ok = ok && oracle::sorted_spans(tree_to_spans(r.tree, cg.labels)) == oracle::sorted_spans(best[t].spans);
      } else {
        ++tied;
      }
      ++compared;
      mismatched += !ok;
    }
  }
  std::ostringstream d;
  d << compared << " tables over n=" << lo << ".." << hi << ", " << mismatched << " mismatches, " << tied
    << " with tied optima (score compared only)";
  return verdict(mismatched == 0, d.str());
}

Outcome round_trip() {
  const auto records = synthetic_corpus(kRoundTripSentences, 7);
  const Grammar g = build_grammar(synthetic_categories(), all_families());
  std::map<SituationTag, int> seen;
  int bad = 0;
  for (const auto& r : records) {
    auto want = r.quads;
    std::sort(want.begin(), want.end());
    for (bool always : {false, true}) {
      const auto s = to_sentence(r, always);
      if (!always) ++seen[validate_parseable(s).tag];
      auto got = recover_quads(prune_tree(build_tree(s, g)), s.augmented);
      std::sort(got.begin(), got.end());
      bad += got != want;
    }
  }
  std::ostringstream d;
  d << records.size() << " sentences x 2 augmentation modes, " << bad << " mismatches; tags";
  for (const auto& [tag, count] : seen) d << ' ' << to_string(tag) << '=' << count;
  const bool covered = seen.size() == 5 && !seen.count(SituationTag::Unparseable);
  return verdict(bad == 0 && covered, d.str());
}

Outcome completeness_of_random_decodes() {
  const auto records = synthetic_corpus(200, 3);
  const Grammar g = build_grammar(synthetic_categories(), all_families());
  const ChartGrammar cg = compile_chart_grammar(g);
  const Vocabulary vocab = build_vocabulary(records);
  const int labels = static_cast<int>(cg.labels.scored_size());
  std::vector<OpinionTree> trees;
  std::vector<bool> augmented;
  std::set<std::string> shapes;
  const double scales[] = {1.0, 10.0, 100.0};
  for (int k = 0; k < kRandomDecodes; ++k) {
    const auto s = to_sentence(records[static_cast<std::size_t>(k) % records.size()], true);
    auto p = ScorerParams::init(vocab.size(), 16, 32, labels, 1000 + static_cast<std::uint64_t>(k));
    p.scale(scales[k % 3]);
    DecodeOptions opt;
    opt.fake_tokens = true;
    trees.push_back(decode(score_all_spans(vocab.ids(s.tokens), p), cg, opt).tree);
    augmented.push_back(true);
    shapes.insert(to_bracketed(trees.back(), s.tokens));
  }
  const double c = completeness(trees, cg, augmented);
  std::ostringstream d;
  d << trees.size() << " decodes, " << shapes.size() << " distinct trees, completeness " << c;
  return verdict(c == 1.0, d.str());
}

Outcome gradients() {
  const auto records = synthetic_corpus(20, 5);
  const Grammar g = build_grammar(synthetic_categories(), all_families());
  const ChartGrammar cg = compile_chart_grammar(g);
  const Vocabulary vocab = build_vocabulary(records);
  const auto examples = make_examples(records, g, vocab);
  std::mt19937_64 rng(5);
  oracle::FdReport span_total, hinge_total;
  int span_instances = 0, hinge_instances = 0;
  auto add = [](oracle::FdReport& into, const oracle::FdReport& r) {
    into.worst = std::max(into.worst, r.worst);
    into.compared += r.compared;
    into.straddled += r.straddled;
  };
  for (std::size_t k = 0; k < examples.size(); ++k) {
    const auto& ex = examples[k];
    const auto p = ScorerParams::init(vocab.size(), 4, 6, static_cast<int>(cg.labels.scored_size()), 50 + k);
    const int n = static_cast<int>(ex.ids.size());
    std::vector<SpanGradient> cells;
    for (int t = 0; t < 6; ++t) {
      const int i = static_cast<int>(rng() % static_cast<unsigned>(n));
      const int j = i + 1 + static_cast<int>(rng() % static_cast<unsigned>(n - i));
      cells.push_back({i, j, static_cast<int>(rng() % static_cast<unsigned>(p.labels)), rng() % 2 ? 1.0 : -1.0});
    }
    auto grad = ScorerParams::zeros_like(p);
    accumulate_gradient(encode(ex.ids, p), p, cells, grad);
    add(span_total, oracle::fd_check(p, grad, ex.ids, [&](const ScorerParams& q) {
      const auto t = score_all_spans(ex.ids, q);
      double s = 0.0;
      for (const auto& c : cells) s += c.coef * t(c.begin, c.end, c.label);
      return s;
    }, rng, 40));
    ++span_instances;

    auto hgrad = ScorerParams::zeros_like(p);
    if (loss_gradient(p, ex, cg, hgrad) <= 0.0) continue;
    DecodeOptions opt;
    opt.fake_tokens = true;
    const auto viol =
        tree_to_spans(hinge_loss(score_all_spans(ex.ids, p), cg, ex.gold_spans, opt).violating.tree, cg.labels);
    const double ham = hamming(viol, ex.gold_spans);
    add(hinge_total, oracle::fd_check(p, hgrad, ex.ids, [&](const ScorerParams& q) {
      const auto t = score_all_spans(ex.ids, q);
      return score_spans(viol, t) + ham - score_spans(ex.gold_spans, t);
    }, rng, 40));
    ++hinge_instances;
  }
  std::ostringstream d;
  d << "span scores: " << span_instances << " instances, max rel err " << span_total.worst << " ("
    << span_total.compared << " probes, " << span_total.straddled << " at ReLU kinks); hinge: " << hinge_instances
    << " instances, max rel err " << hinge_total.worst << " (" << hinge_total.compared << " probes, "
    << hinge_total.straddled << " at ReLU kinks)";
  const bool ok = span_instances >= kGradientInstances && hinge_instances >= kGradientInstances &&
                  span_total.worst <= kGradientTolerance && hinge_total.worst <= kGradientTolerance &&
                  span_total.compared > 0 && hinge_total.compared > 0;
  return verdict(ok, d.str());
}

Outcome overfit() {
  const auto records = synthetic_corpus(kOverfitSentences, 1);
  const Grammar g = build_grammar(synthetic_categories(), all_families());
  const ChartGrammar cg = compile_chart_grammar(g);
  const Vocabulary vocab = build_vocabulary(records);
  const auto examples = make_examples(records, g, vocab);
  const RunConfig defaults;
  TrainConfig cfg = defaults.train;
  cfg.epochs = kOverfitEpochs;
  cfg.stop_when_fit = true;
  const auto init =
      ScorerParams::init(vocab.size(), defaults.d, defaults.hidden, static_cast<int>(cg.labels.scored_size()), cfg.seed);
  const auto r = fit(examples, cg, init, cfg);
  const auto& last = r.metrics.back();
  std::ostringstream d;
  d << "d=" << defaults.d << " H=" << defaults.hidden << " lr=" << cfg.learning_rate << " batch=" << cfg.batch_size
    << ": after epoch " << last.epoch << " loss " << last.loss << " f1 " << last.f1;
  return verdict(last.loss == 0.0 && last.f1 == 1.0, d.str());
}

Outcome pruning() {
  const Grammar g = build_grammar(synthetic_categories(), all_families());
  const SituationTag tags[] = {SituationTag::Basic, SituationTag::OneToMany, SituationTag::MonoImplicit,
                               SituationTag::BiImplicit, SituationTag::CrossMapping};
  int bad = 0;
  for (int k = 0; k < kPruneTrees; ++k) {
    const auto r = synthetic_record(tags[k % 5], 9000 + static_cast<std::uint64_t>(k));
    const auto once = prune_tree(build_tree(to_sentence(r, k % 2 == 0), g));
    bad += !(prune_tree(once) == once);
  }
  const Grammar bar = build_grammar({"RESTAURANT#GENERAL"}, all_families());
  std::vector<std::string> tokens = {"So", "happy", "to", "have", "a", "great", "bar"};
  const auto s = augment_tokens(tokens, {{Span{6, 7}, "RESTAURANT#GENERAL", Span{1, 2}, Polarity::Positive},
                                         {Span{6, 7}, "RESTAURANT#GENERAL", Span{5, 6}, Polarity::Positive}});
  const std::string golden =
      "(S (I So) (Q (O:positive (OT happy)) (I to have a) (O:positive (OT great)) (A:RESTAURANT#GENERAL (AT bar))))";
  const std::string got = to_bracketed(build_pruned_tree(s, bar), s.tokens);
  std::ostringstream d;
  d << kPruneTrees << " trees, " << bad << " not idempotent; golden tree " << (got == golden ? "matches" : "differs: " + got);
  return verdict(bad == 0 && got == golden, d.str());
}

Outcome scaling() {
  const Grammar g = build_grammar(synthetic_categories(), all_families());
  const ChartGrammar cg = compile_chart_grammar(g);
  const auto tables = random_tables({8, 16, 32, 64}, 5, static_cast<int>(cg.labels.scored_size()), 8);
  const auto report = bench_decode(tables, cg, 3);
  const double b = report.exponent.value_or(0.0);
  std::ostringstream d;
  d << std::setprecision(3) << "exponent " << b << " (mean s:";
  for (const auto& row : report.rows) d << " n=" << row.length << ' ' << row.per_sentence.mean;
  d << ')';
  return verdict(report.exponent && b >= kExponentLow && b <= kExponentHigh, d.str());
}

std::optional<std::string> env(const char* name) {
  const char* v = std::getenv(name);
  if (v == nullptr || *v == '\0') return std::nullopt;
  return std::string(v);
}

std::optional<fs::path> split_file(const fs::path& dir, const std::string& key) {
  for (const auto& entry : fs::directory_iterator(dir)) {
    const auto name = entry.path().filename().string();
    if (entry.is_regular_file() && name.find(key) != std::string::npos && entry.path().extension() == ".tsv") {
      return entry.path();
    }
  }
  return std::nullopt;
}

Outcome acos(const std::optional<std::string>& restaurant, const std::optional<std::string>& laptop) {
  struct Domain {
    std::string name;
    std::optional<std::string> dir;
    std::array<std::size_t, 3> expected;
  };
  const std::vector<Domain> domains = {{"restaurant", restaurant, {1529, 171, 582}},
                                       {"laptop", laptop, {2929, 326, 816}}};
  if (!restaurant && !laptop) return {Status::Skip, "no ACOS corpus supplied"};
  std::ostringstream d;
  bool ok = true;
  std::size_t lines = 0, skipped = 0;
  for (const auto& dom : domains) {
    if (!dom.dir) {
      d << dom.name << ": not supplied; ";
      ok = false;
      continue;
    }
    std::array<std::size_t, 3> counts{};
    std::map<SituationTag, std::size_t> hist;
    std::size_t records = 0;
    const std::pair<const char*, Split> splits[] = {{"train", Split::Train}, {"dev", Split::Validation},
                                                    {"test", Split::Test}};
    for (std::size_t k = 0; k < 3; ++k) {
      const auto file = split_file(*dom.dir, splits[k].first);
      if (!file) {
        d << dom.name << ": no " << splits[k].first << " file; ";
        ok = false;
        continue;
      }
      const auto imported = import_acos_tsv(file->string(), splits[k].second);
      counts[k] = imported.records.size();
      lines += imported.lines;
      skipped += imported.skipped.size();
      for (const auto& r : imported.records) ++hist[validate_parseable(to_sentence(r, false)).tag];
      records += imported.records.size();
    }
    const double basic = records == 0 ? 0.0 : static_cast<double>(hist[SituationTag::Basic]) / static_cast<double>(records);
    const bool counts_ok = counts == dom.expected;
    const bool basic_ok = basic >= kBasicLow && basic <= kBasicHigh;
    ok = ok && counts_ok && basic_ok;
    d << dom.name << ": " << counts[0] << '/' << counts[1] << '/' << counts[2] << (counts_ok ? "" : " (expected ")
      << (counts_ok ? "" : std::to_string(dom.expected[0]) + "/" + std::to_string(dom.expected[1]) + "/" +
                               std::to_string(dom.expected[2]) + ")")
      << ", basic fraction " << basic << "; ";
  }
  const double rate = lines == 0 ? 0.0 : static_cast<double>(skipped) / static_cast<double>(lines);
  const bool rate_ok = std::abs(rate - kSkipRateTarget) <= kSkipRateSlack;
  d << "skip rate " << rate;
  return verdict(ok && rate_ok, d.str());
}

std::set<int> parse_ids(const std::string& text) {
  std::set<int> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) out.insert(std::stoi(item));
  }
  return out;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Acceptance criteria"};
  std::string only;
  bool strict = false;
  std::optional<std::string> restaurant = env("OTP_ACOS_RESTAURANT");
  std::optional<std::string> laptop = env("OTP_ACOS_LAPTOP");
  app.add_option("--only", only, "Comma-separated criterion numbers");
  app.add_flag("--strict", strict, "Exit non-zero on any FAIL, including known shortfalls");
  app.add_option("--acos-restaurant", restaurant, "Directory with the restaurant train/dev/test TSV files")
      ->check(CLI::ExistingDirectory);
  app.add_option("--acos-laptop", laptop, "Directory with the laptop train/dev/test TSV files")
      ->check(CLI::ExistingDirectory);
  CLI11_PARSE(app, argc, argv);

  const std::vector<Criterion> criteria = {
      {1, "cky_optimality", 120, [] { return cky_against_enumeration(false); }},
      {2, "loss_augmented_optimality", 120, [] { return cky_against_enumeration(true); }},
      {3, "round_trip", 30, round_trip},
      {4, "completeness", 120, completeness_of_random_decodes},
      {5, "gradients", 60, gradients},
      {6, "overfit", 300, overfit},
      {7, "pruning", 30, pruning},
      {8, "decode_scaling", 180, scaling},
      {9, "acos_statistics", 0, [&] { return acos(restaurant, laptop); }},
  };
  const auto selected = parse_ids(only);
  int unexpected = 0, failures = 0;
  for (const auto& c : criteria) {
    if (!selected.empty() && !selected.count(c.id)) continue;
    const auto start = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = c.run();
    } catch (const std::exception& e) {
      o = {Status::Fail, std::string("error: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    if (o.status == Status::Pass && c.time_limit > 0 && secs > c.time_limit) {
      o.status = Status::Fail;
      o.detail += "; over the " + std::to_string(static_cast<int>(c.time_limit)) + " s limit";
    }
    const char* word = o.status == Status::Pass ? "PASS" : o.status == Status::Fail ? "FAIL" : "SKIP";
    std::cout << word << ' ' << c.id << ' ' << c.name << ": " << o.detail << " [" << std::fixed << std::setprecision(1)
              << secs << " s]" << std::defaultfloat;
    if (o.status == Status::Fail) {
      ++failures;
      if (kKnownShortfalls.count(c.id)) std::cout << " (known shortfall)";
      else ++unexpected;
    }
    std::cout << std::endl;
  }
  return (strict ? failures : unexpected) == 0 ? 0 : 1;
}
