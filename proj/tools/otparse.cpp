// otparse: corpus normalization, training, parsing, evaluation and timing.

#include <CLI11.hpp>
#include <json.hpp>

#include <chrono>
#include <cmath>
#include <fstream>
#include <iostream>
#include <map>
#include <random>
#include <sstream>

#include "otp/corpus.hpp"
#include "otp/eval.hpp"
#include "otp/oracle.hpp"
#include "otp/recovery.hpp"
#include "otp/synthetic.hpp"
#include "otp/trainer.hpp"

namespace {

using namespace otp;
using nlohmann::json;

constexpr SituationTag kTags[] = {SituationTag::Basic, SituationTag::OneToMany, SituationTag::MonoImplicit,
                                  SituationTag::BiImplicit, SituationTag::CrossMapping, SituationTag::Unparseable};

// Writes to a file when a path is given, otherwise to stdout.
class Sink {
 public:
  explicit Sink(const std::string& path) {
    if (path.empty() || path == "-") return;
    file_.open(path);
    if (!file_) throw ConfigError("cannot write '" + path + "'");
  }
  std::ostream& os() { return file_.is_open() ? file_ : std::cout; }

 private:
  std::ofstream file_;
};

std::string quad_field(const SentimentQuadruple& q) {
  CorpusRecord r{{"x"}, {q}, Split::Train, 0};
  auto line = format_record(r);
  return line.substr(line.rfind('\t') + 1);
}

json quads_json(const std::vector<SentimentQuadruple>& quads) {
  json out = json::array();
  for (const auto& q : quads) out.push_back(quad_field(q));
  return out;
}

std::vector<std::string> split_words(const std::string& line) {
  std::istringstream is(line);
  std::vector<std::string> out;
  for (std::string w; is >> w;) out.push_back(w);
  return out;
}

Split parse_split(const std::string& s) {
  auto split = split_from_string(s);
  if (!split) throw ConfigError("unknown split '" + s + "'");
  return *split;
}

// ---- normalize ----

struct NormalizeArgs {
  std::string input, split = "train", trees, corpus_out;
  bool acos = false, json = false;
};

int run_normalize(const NormalizeArgs& a) {
  ImportResult imported;
  if (a.acos) {
    imported = import_acos_tsv(a.input, parse_split(a.split));
  } else {
    for (auto& r : read_corpus(a.input)) {
      ++imported.lines;
      auto s = validate_parseable(to_sentence(r, false));
      if (s.parseable()) imported.records.push_back(std::move(r));
      else imported.skipped.push_back({r.source_line, *s.reason});
    }
  }
  std::map<SituationTag, std::size_t> hist;
  for (auto t : kTags) hist[t] = 0;
  std::map<UnparseableReason, std::size_t> reasons;
  for (const auto& s : imported.skipped) {
    ++hist[SituationTag::Unparseable];
    ++reasons[s.reason];
  }
  std::optional<Sink> trees;
  if (!a.trees.empty()) trees.emplace(a.trees);
  if (!imported.records.empty()) {
    const auto g = build_grammar(corpus_categories(imported.records), all_families());
    for (const auto& r : imported.records) {
      auto s = to_sentence(r, false);
      const auto tag = validate_parseable(s).tag;
      ++hist[tag];
      if (trees) trees->os() << r.source_line << '\t' << to_string(tag) << '\t' << to_bracketed(build_pruned_tree(s, g), s.tokens) << '\n';
    }
  }
  if (!a.corpus_out.empty()) {
    Sink out(a.corpus_out);
    write_corpus(out.os(), imported.records);
  }

  if (a.json) {
    json j;
    j["lines"] = imported.lines;
    j["records"] = imported.records.size();
    j["skipped"] = imported.skipped.size();
    j["skip_rate"] = imported.skip_rate();
    for (const auto& [t, n] : hist) j["situations"][std::string(to_string(t))] = n;
    j["skip_reasons"] = json::object();
    for (const auto& [r, n] : reasons) j["skip_reasons"][std::string(to_string(r))] = n;
    j["skip_lines"] = json::array();
    for (const auto& s : imported.skipped) j["skip_lines"].push_back({{"line", s.source_line}, {"reason", to_string(s.reason)}});
    std::cout << j.dump(2) << '\n';
  } else {
    std::cout << "lines\t" << imported.lines << "\nrecords\t" << imported.records.size() << "\nskipped\t"
              << imported.skipped.size() << '\n';
    std::cout << std::fixed << std::setprecision(4) << "skip_rate\t" << imported.skip_rate() << '\n';
    const double total = static_cast<double>(std::max<std::size_t>(1, imported.lines));
    for (const auto& [t, n] : hist) {
      std::cout << "situation\t" << to_string(t) << '\t' << n << '\t' << static_cast<double>(n) / total << '\n';
    }
    for (const auto& [r, n] : reasons) std::cout << "skip_reason\t" << to_string(r) << '\t' << n << '\n';
    for (const auto& s : imported.skipped) std::cout << "skip_line\t" << s.source_line << '\t' << to_string(s.reason) << '\n';
  }
  return 0;
}

// ---- train ----

struct TrainArgs {
  std::string config, train, checkpoint, metrics, split = "train";
  std::optional<std::uint64_t> seed;
  std::optional<int> epochs, batch_size, d, hidden;
  std::optional<double> lr;
  bool json = false, quiet = false;
};

int run_train(const TrainArgs& a) {
  RunConfig cfg = a.config.empty() ? RunConfig{} : load_run_config(a.config);
  if (!a.train.empty()) cfg.train_path = a.train;
  if (!a.checkpoint.empty()) cfg.checkpoint_path = a.checkpoint;
  if (!a.metrics.empty()) cfg.metrics_path = a.metrics;
  if (a.seed) cfg.train.seed = *a.seed;
  if (a.epochs) cfg.train.epochs = *a.epochs;
  if (a.batch_size) cfg.train.batch_size = *a.batch_size;
  if (a.lr) cfg.train.learning_rate = *a.lr;
  if (a.d) cfg.d = *a.d;
  if (a.hidden) cfg.hidden = *a.hidden;
  if (!cfg.train_path) throw ConfigError("no training corpus (set train_path or --train)");
  if (!cfg.checkpoint_path) throw ConfigError("no checkpoint path (set checkpoint_path or --checkpoint)");
  if (cfg.d <= 0 || cfg.hidden <= 0) throw ConfigError("d and hidden must be positive");
  cfg.train.validate();

  const Split split = parse_split(a.split);
  std::vector<CorpusRecord> records;
  std::size_t skipped = 0;
  for (auto& r : read_corpus(*cfg.train_path)) {
    if (r.split != split) continue;
    if (!validate_parseable(to_sentence(r, false)).parseable()) {
      ++skipped;
      continue;
    }
    records.push_back(std::move(r));
  }
  if (records.empty()) throw ConfigError("no parseable '" + std::string(to_string(split)) + "' records in " + *cfg.train_path);
  if (!a.quiet && skipped) std::cerr << "skipped " << skipped << " unparseable records\n";

  Model m;
  m.categories = cfg.categories.empty() ? corpus_categories(records) : cfg.categories;
  m.families = cfg.families;
  const Grammar g = m.grammar();
  m.categories = g.categories;
  const ChartGrammar cg = compile_chart_grammar(g);
  m.vocab = build_vocabulary(records);
  const auto examples = make_examples(records, g, m.vocab);
  auto init = ScorerParams::init(m.vocab.size(), cfg.d, cfg.hidden, static_cast<int>(cg.labels.scored_size()), cfg.train.seed);
  auto result = fit(examples, cg, std::move(init), cfg.train, [&](const EpochMetrics& e) {
    if (!a.quiet) std::cerr << "epoch " << e.epoch << " loss " << e.loss << " f1 " << e.f1 << '\n';
  });
  m.params = std::move(result.params);
  save_model(*cfg.checkpoint_path, m);
  if (cfg.metrics_path) {
    Sink out(*cfg.metrics_path);
    write_metrics(out.os(), result.metrics);
  }
  const EpochMetrics last = result.metrics.empty() ? EpochMetrics{} : result.metrics.back();
  if (a.json) {
    json j = {{"records", records.size()}, {"skipped", skipped}, {"epochs", result.metrics.size()},
              {"loss", last.loss},         {"f1", last.f1},        {"checkpoint", *cfg.checkpoint_path}};
    std::cout << j.dump(2) << '\n';
  } else {
    std::cout << "records\t" << records.size() << "\nskipped\t" << skipped << "\nepochs\t" << result.metrics.size()
              << "\nloss\t" << last.loss << "\nf1\t" << last.f1 << "\ncheckpoint\t" << *cfg.checkpoint_path << '\n';
  }
  return 0;
}

// ---- parse ----

struct ParseArgs {
  std::string checkpoint, input, output, trees;
  bool corpus = false, json = false;
};

std::vector<CorpusRecord> input_records(const std::string& path, bool corpus) {
  if (corpus) return read_corpus(path);
  std::ifstream is(path);
  if (!is) throw ConfigError("cannot read '" + path + "'");
  std::vector<CorpusRecord> out;
  int line_no = 0;
  for (std::string line; std::getline(is, line);) {
    ++line_no;
    auto tokens = split_words(line);
    if (tokens.empty()) continue;
    out.push_back({std::move(tokens), {}, Split::Test, line_no});
  }
  return out;
}

int run_parse(const ParseArgs& a) {
  const Model m = load_model(a.checkpoint);
  const ChartGrammar cg = compile_chart_grammar(m.grammar());
  std::optional<Sink> trees;
  if (!a.trees.empty()) trees.emplace(a.trees);
  Sink out(a.output);
  json all = json::array();
  for (auto r : input_records(a.input, a.corpus)) {
    auto p = predict(m, cg, r.tokens);
    r.quads = p.quads;
    const auto bracketed = to_bracketed(p.tree, p.sentence.tokens);
    if (trees) trees->os() << r.source_line << '\t' << bracketed << '\n';
    if (a.json) {
      all.push_back({{"source_line", r.source_line}, {"tokens", r.tokens}, {"tree", bracketed}, {"quads", quads_json(r.quads)}});
    } else {
      out.os() << format_record(r) << '\n';
    }
  }
  if (a.json) out.os() << all.dump(2) << '\n';
  return 0;
}

// ---- eval ----

struct EvalArgs {
  std::string gold, pred, checkpoint;
  bool json = false;
};

int run_eval(const EvalArgs& a) {
  if (a.pred.empty() == a.checkpoint.empty()) throw ConfigError("give exactly one of --pred and --checkpoint");
  const auto gold = read_corpus(a.gold);
  EvalReport report;
  std::vector<std::vector<SentimentQuadruple>> predicted;
  if (!a.pred.empty()) {
    const auto pred = read_corpus(a.pred);
    if (pred.size() != gold.size()) {
      throw FormatError("prediction file has " + std::to_string(pred.size()) + " records, gold has " +
                        std::to_string(gold.size()));
    }
    for (std::size_t i = 0; i < pred.size(); ++i) {
      if (pred[i].tokens != gold[i].tokens) {
        throw FormatError("record " + std::to_string(i + 1) + ": prediction tokens differ from gold");
      }
      predicted.push_back(pred[i].quads);
    }
  } else {
    const Model m = load_model(a.checkpoint);
    const ChartGrammar cg = compile_chart_grammar(m.grammar());
    std::vector<OpinionTree> trees;
    std::vector<double> secs;
    for (const auto& r : gold) {
      auto p = predict(m, cg, r.tokens);
      predicted.push_back(p.quads);
      trees.push_back(std::move(p.tree));
      secs.push_back(p.decode_seconds);
    }
    report.completeness = completeness(trees, cg, std::vector<bool>(trees.size(), true));
    report.timing = timing_stats(secs);
  }
  for (std::size_t i = 0; i < gold.size(); ++i) {
    const auto c = eval_quads(predicted[i], gold[i].quads);
    report.counts += c;
    const auto tag = validate_parseable(to_sentence(gold[i], false)).tag;
    ++report.situations[tag];
    report.by_situation[tag] += c;
  }
  if (a.json) report.write_json(std::cout);
  else report.write_text(std::cout);
  return 0;
}

// ---- bench ----

struct BenchArgs {
  std::string checkpoint, corpus, lengths;
  int per_length = 5, repetitions = 3;
  std::uint64_t seed = 1;
  bool json = false;
};

std::vector<int> parse_lengths(const std::string& text) {
  std::vector<int> out;
  std::stringstream ss(text);
  for (std::string item; std::getline(ss, item, ',');) {
    try {
      std::size_t used = 0;
      const int n = std::stoi(item, &used);
      if (used != item.size() || n < 1) throw std::invalid_argument(item);
      out.push_back(n);
    } catch (const std::logic_error&) {
      throw ConfigError("bad length '" + item + "' in --lengths");
    }
  }
  return out;
}

int run_bench(const BenchArgs& a) {
  if (a.corpus.empty() == a.lengths.empty()) throw ConfigError("give either a corpus or --lengths");
  if (a.per_length < 1 || a.repetitions < 1) throw ConfigError("--per-length and --repetitions must be positive");
  std::optional<Model> model;
  if (!a.checkpoint.empty()) model = load_model(a.checkpoint);
  const Grammar g = model ? model->grammar() : build_grammar(synthetic_categories(), all_families());
  const ChartGrammar cg = compile_chart_grammar(g);
  const int labels = static_cast<int>(cg.labels.scored_size());

  std::vector<SpanScoreTable> tables;
  std::vector<bool> fake;
  if (!a.corpus.empty()) {
    if (!model) throw ConfigError("timing a corpus needs --checkpoint");
    for (const auto& r : read_corpus(a.corpus)) {
      auto s = augment_tokens(r.tokens, {}, true);
      tables.push_back(score_all_spans(model->vocab.ids(s.tokens), model->params));
      fake.push_back(true);
    }
  } else if (model) {
    std::mt19937_64 rng(a.seed);
    for (int n : parse_lengths(a.lengths)) {
      for (int k = 0; k < a.per_length; ++k) {
        std::vector<int> ids(static_cast<std::size_t>(n));
        for (auto& id : ids) id = static_cast<int>(rng() % model->vocab.size());
        tables.push_back(score_all_spans(ids, model->params));
      }
    }
  } else {
    tables = random_tables(parse_lengths(a.lengths), a.per_length, labels, a.seed);
  }
  const auto report = bench_decode(tables, cg, a.repetitions, fake);
  if (a.json) write_bench_json(std::cout, report);
  else write_bench_text(std::cout, report);
  return 0;
}

// ---- oracle-check ----

struct Check {
  std::string name;
  bool pass = true;
  std::string detail;
};

Check check_cky(std::uint64_t seed, bool loss_augmented) {
  Check c{loss_augmented ? "loss_augmented_optimality" : "cky_optimality", true, ""};
  const Grammar g = build_grammar({"C0", "C1"}, all_families());
  const ChartGrammar cg = compile_chart_grammar(g);
  const int labels = static_cast<int>(cg.labels.scored_size());
  std::mt19937_64 rng(seed);
  int compared = 0, mismatched = 0;
  for (int n = 1; n <= (loss_augmented ? 4 : 5); ++n) {
    for (bool fake : {false, true}) {
      if (fake && n < 2) continue;
      std::vector<SpanScoreTable> tables;
      std::vector<LabeledSpanSet> golds;
      for (int k = 0; k < 10; ++k) {
        tables.push_back(oracle::dyadic_table(n, labels, rng));
        if (loss_augmented) {
          DecodeOptions opt;
          opt.fake_tokens = fake;
          golds.push_back(tree_to_spans(decode(oracle::dyadic_table(n, labels, rng), cg, opt).tree, cg.labels));
        }
      }
      oracle::TreeEnumerator e(g, fake);
      const auto best = oracle::exhaustive_best(e, n, tables, [&](std::size_t t, const LabeledSpanSet& s) {
        return loss_augmented ? static_cast<double>(oracle::oracle_hamming(s, golds[t])) : 0.0;
      });
      for (std::size_t t = 0; t < tables.size(); ++t) {
        DecodeOptions opt;
        opt.fake_tokens = fake;
        const auto r = loss_augmented ? loss_augmented_decode(tables[t], cg, golds[t], opt) : decode(tables[t], cg, opt);
        bool ok = r.score == best[t].score;
        if (ok && best[t].ties == 0) {
          ok = oracle::sorted_spans(tree_to_spans(r.tree, cg.labels)) == oracle::sorted_spans(best[t].spans);
        }
        ++compared;
        mismatched += !ok;
      }
    }
  }
  c.pass = mismatched == 0;
  c.detail = std::to_string(compared) + " tables, " + std::to_string(mismatched) + " mismatches";
  return c;
}

Check check_gradients(std::uint64_t seed) {
  Check c{"gradients", true, ""};
  const auto records = synthetic_corpus(10, seed);
  const Grammar g = build_grammar(synthetic_categories(), all_families());
  const ChartGrammar cg = compile_chart_grammar(g);
  const Vocabulary vocab = build_vocabulary(records);
  const auto examples = make_examples(records, g, vocab);
  std::mt19937_64 rng(seed);
  oracle::FdReport total;
  auto add = [&](const oracle::FdReport& r) {
    total.worst = std::max(total.worst, r.worst);
    total.compared += r.compared;
    total.straddled += r.straddled;
  };
  for (std::size_t k = 0; k < examples.size(); ++k) {
    const auto& ex = examples[k];
    const auto p = ScorerParams::init(vocab.size(), 4, 5, static_cast<int>(cg.labels.scored_size()), seed + k);
    // Span scores under random coefficients.
    std::vector<SpanGradient> cells;
    const int n = static_cast<int>(ex.ids.size());
    for (int t = 0; t < 6; ++t) {
      const int i = static_cast<int>(rng() % static_cast<unsigned>(n));
      const int j = i + 1 + static_cast<int>(rng() % static_cast<unsigned>(n - i));
      cells.push_back({i, j, static_cast<int>(rng() % static_cast<unsigned>(p.labels)), rng() % 2 ? 1.0 : -1.0});
    }
    auto grad = ScorerParams::zeros_like(p);
    accumulate_gradient(encode(ex.ids, p), p, cells, grad);
    add(oracle::fd_check(p, grad, ex.ids, [&](const ScorerParams& q) {
      const auto t = score_all_spans(ex.ids, q);
      double s = 0.0;
      for (const auto& cell : cells) s += cell.coef * t(cell.begin, cell.end, cell.label);
      return s;
    }, rng, 50));
    // Hinge with the violating tree held fixed.
    auto hgrad = ScorerParams::zeros_like(p);
    if (loss_gradient(p, ex, cg, hgrad) <= 0.0) continue;
    DecodeOptions opt;
    opt.fake_tokens = true;
    const auto viol = tree_to_spans(hinge_loss(score_all_spans(ex.ids, p), cg, ex.gold_spans, opt).violating.tree, cg.labels);
    const double ham = hamming(viol, ex.gold_spans);
    add(oracle::fd_check(p, hgrad, ex.ids, [&](const ScorerParams& q) {
      const auto t = score_all_spans(ex.ids, q);
      return score_spans(viol, t) + ham - score_spans(ex.gold_spans, t);
    }, rng, 50));
  }
  c.pass = total.worst <= 1e-4 && total.compared > 0;
  std::ostringstream d;
  d << "max relative error " << total.worst << " over " << total.compared << " probes (" << total.straddled
    << " straddled a ReLU kink)";
  c.detail = d.str();
  return c;
}

Check check_round_trip(std::uint64_t seed) {
  Check c{"round_trip", true, ""};
  const auto records = synthetic_corpus(100, seed);
  const Grammar g = build_grammar(synthetic_categories(), all_families());
  int bad = 0;
  for (const auto& r : records) {
    const auto s = to_sentence(r, true);
    auto got = recover_quads(build_pruned_tree(s, g), true);
    auto want = r.quads;
    std::sort(got.begin(), got.end());
    std::sort(want.begin(), want.end());
    bad += got != want;
  }
  c.pass = bad == 0;
  c.detail = std::to_string(records.size()) + " sentences, " + std::to_string(bad) + " mismatches";
  return c;
}

Check check_golden() {
  Check c{"golden_tree", true, ""};
  const Grammar g = build_grammar({"RESTAURANT#GENERAL"}, all_families());
  const auto s = augment_tokens(split_words("So happy to have a great bar"),
                                {{Span{6, 7}, "RESTAURANT#GENERAL", Span{1, 2}, Polarity::Positive},
                                 {Span{6, 7}, "RESTAURANT#GENERAL", Span{5, 6}, Polarity::Positive}});
  const auto t = build_pruned_tree(s, g);
  c.detail = to_bracketed(t, s.tokens);
  c.pass = c.detail ==
               "(S (I So) (Q (O:positive (OT happy)) (I to have a) (O:positive (OT great)) "
               "(A:RESTAURANT#GENERAL (AT bar))))" &&
           prune_tree(t) == t;
  return c;
}

int run_oracle_check(std::uint64_t seed, bool as_json) {
  const auto start = std::chrono::steady_clock::now();
  std::vector<Check> checks = {check_cky(seed, false), check_cky(seed, true), check_gradients(seed),
                               check_round_trip(seed), check_golden()};
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  bool all = true;
  json j = json::array();
  for (const auto& c : checks) {
    all = all && c.pass;
    if (as_json) j.push_back({{"check", c.name}, {"pass", c.pass}, {"detail", c.detail}});
    else std::cout << (c.pass ? "PASS " : "FAIL ") << c.name << ": " << c.detail << '\n';
  }
  if (as_json) std::cout << json{{"checks", j}, {"pass", all}, {"seconds", secs}}.dump(2) << '\n';
  else std::cout << (all ? "all checks passed" : "some checks failed") << " in " << secs << " s\n";
  return all ? 0 : 2;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Opinion-tree parsing for aspect sentiment quadruples"};
  app.require_subcommand(1);

  NormalizeArgs na;
  auto* normalize = app.add_subcommand("normalize", "Validate a corpus, print the situation histogram, write trees");
  normalize->add_option("input", na.input, "Canonical corpus, or ACOS TSV with --acos")->required()->check(CLI::ExistingFile);
  normalize->add_flag("--acos", na.acos, "Input is ACOS-style TSV");
  normalize->add_option("--split", na.split, "Split assigned to imported ACOS records")->capture_default_str();
  normalize->add_option("--trees", na.trees, "Write 'line TAB situation TAB bracketed tree' here");
  normalize->add_option("--corpus-out", na.corpus_out, "Write parseable records in canonical form here");
  normalize->add_flag("--json", na.json, "Machine-readable histogram");

  TrainArgs ta;
  auto* train = app.add_subcommand("train", "Fit the span scorer and write a checkpoint");
  train->add_option("--config", ta.config, "JSON run configuration")->check(CLI::ExistingFile);
  train->add_option("--train", ta.train, "Canonical training corpus")->check(CLI::ExistingFile);
  train->add_option("--split", ta.split, "Records of this split are used")->capture_default_str();
  train->add_option("--checkpoint", ta.checkpoint, "Output checkpoint path");
  train->add_option("--metrics", ta.metrics, "Per-epoch metrics log");
  train->add_option("--seed", ta.seed, "Seed for initialization and shuffling");
  train->add_option("--epochs", ta.epochs);
  train->add_option("--batch-size", ta.batch_size);
  train->add_option("--lr", ta.lr, "Learning rate");
  train->add_option("--d", ta.d, "Model width");
  train->add_option("--hidden", ta.hidden, "Span MLP width");
  train->add_flag("--json", ta.json);
  train->add_flag("--quiet", ta.quiet, "No per-epoch progress on stderr");

  ParseArgs pa;
  auto* parse = app.add_subcommand("parse", "Decode sentences with a trained checkpoint");
  parse->add_option("--checkpoint", pa.checkpoint)->required()->check(CLI::ExistingFile);
  parse->add_option("input", pa.input, "One whitespace-tokenized sentence per line")->required()->check(CLI::ExistingFile);
  parse->add_flag("--corpus", pa.corpus, "Input is a canonical corpus; its gold quads are ignored");
  parse->add_option("--output", pa.output, "Predictions in canonical form (default stdout)");
  parse->add_option("--trees", pa.trees, "Write 'line TAB bracketed tree' here");
  parse->add_flag("--json", pa.json);

  EvalArgs ea;
  auto* eval = app.add_subcommand("eval", "Exact-match quadruple scores against gold");
  eval->add_option("--gold", ea.gold)->required()->check(CLI::ExistingFile);
  eval->add_option("--pred", ea.pred, "Canonical predictions aligned with gold")->check(CLI::ExistingFile);
  eval->add_option("--checkpoint", ea.checkpoint, "Decode gold sentences with this model")->check(CLI::ExistingFile);
  eval->add_flag("--json", ea.json);

  BenchArgs ba;
  auto* bench = app.add_subcommand("bench", "Decode timing per sentence length");
  bench->add_option("--checkpoint", ba.checkpoint)->check(CLI::ExistingFile);
  bench->add_option("corpus", ba.corpus, "Canonical corpus to time")->check(CLI::ExistingFile);
  bench->add_option("--lengths", ba.lengths, "Comma-separated lengths of random sentences, e.g. 8,16,32,64");
  bench->add_option("--per-length", ba.per_length)->capture_default_str();
  bench->add_option("--repetitions", ba.repetitions)->capture_default_str();
  bench->add_option("--seed", ba.seed)->capture_default_str();
  bench->add_flag("--json", ba.json);

  std::uint64_t oracle_seed = 1;
  bool oracle_json = false;
  auto* oracle_check = app.add_subcommand("oracle-check", "Brute-force checks of decoding, gradients and round trips");
  oracle_check->add_option("--seed", oracle_seed)->capture_default_str();
  oracle_check->add_flag("--json", oracle_json);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;
  }

  try {
    if (*normalize) return run_normalize(na);
    if (*train) return run_train(ta);
    if (*parse) return run_parse(pa);
    if (*eval) return run_eval(ea);
    if (*bench) return run_bench(ba);
    if (*oracle_check) return run_oracle_check(oracle_seed, oracle_json);
  } catch (const ConfigError& e) {
    std::cerr << "otparse: " << e.what() << '\n';
    return 1;
  } catch (const FormatError& e) {
    std::cerr << "otparse: " << e.what() << '\n';
    return 1;
  } catch (const TrainingDiverged& e) {
    std::cerr << "otparse: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "otparse: internal error: " << e.what() << '\n';
    return 2;
  }
  return 2;
}
