#include "otp/trainer.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <numeric>
#include <ostream>
#include <random>

#include "otp/eval.hpp"
#include "otp/recovery.hpp"

namespace otp {

void TrainConfig::validate() const {
  if (!(learning_rate > 0.0) || !std::isfinite(learning_rate)) throw ConfigError("learning rate must be positive");
  if (epochs < 0) throw ConfigError("epochs must be non-negative");
  if (batch_size < 1) throw ConfigError("batch size must be at least 1");
  if (weight_decay < 0.0) throw ConfigError("weight decay must be non-negative");
  if (optimizer == Optimizer::Adam) {
    if (!(beta1 >= 0.0 && beta1 < 1.0) || !(beta2 >= 0.0 && beta2 < 1.0) || !(epsilon > 0.0)) {
      throw ConfigError("adam moments need beta in [0,1) and epsilon > 0");
    }
  }
}

TrainExample make_example(const Sentence& augmented, const Grammar& g, const Vocabulary& vocab) {
  TrainExample ex;
  ex.sentence = augmented;
  ex.ids = vocab.ids(augmented.tokens);
  ex.gold = build_pruned_tree(augmented, g);
  ex.gold_spans = tree_to_spans(ex.gold, build_label_set(g));
  return ex;
}

HingeResult hinge_loss(const SpanScoreTable& table, const ChartGrammar& g, const LabeledSpanSet& gold,
                       const DecodeOptions& opt) {
  HingeResult r;
  r.violating = loss_augmented_decode(table, g, gold, opt);
  r.gold_score = score_spans(gold, table);
  r.loss = std::max(0.0, r.violating.score - r.gold_score);
  return r;
}

std::vector<SpanGradient> hinge_cells(const LabeledSpanSet& violating, const LabeledSpanSet& gold) {
  std::map<LabeledSpan, double> coef;
  for (const auto& s : violating) coef[s] += 1.0;
  for (const auto& s : gold) coef[s] -= 1.0;
  std::vector<SpanGradient> out;
  for (const auto& [s, c] : coef) {
    if (c != 0.0) out.push_back({s.begin, s.end, s.label, c});
  }
  return out;
}

double loss_gradient(const ScorerParams& params, const TrainExample& ex, const ChartGrammar& g, ScorerParams& grad) {
  const Encoding enc = encode(ex.ids, params);
  const SpanScoreTable table = score_all_spans(enc, params);
  DecodeOptions opt;
  opt.fake_tokens = ex.sentence.augmented;
  const HingeResult h = hinge_loss(table, g, ex.gold_spans, opt);
  if (h.loss <= 0.0) return h.loss;
  const auto cells = hinge_cells(tree_to_spans(h.violating.tree, g.labels), ex.gold_spans);
  accumulate_gradient(enc, params, cells, grad);
  return h.loss;
}

double training_f1(const std::vector<TrainExample>& data, const ChartGrammar& g, const ScorerParams& params) {
  QuadCounts c;
  for (const auto& ex : data) {
    DecodeOptions opt;
    opt.fake_tokens = ex.sentence.augmented;
    auto tree = decode(score_all_spans(ex.ids, params), g, opt).tree;
    c += eval_quads(recover_quads(tree, ex.sentence.augmented), strip_augmentation(ex.sentence.quads, ex.sentence.augmented));
  }
  return c.f1();
}

FitResult fit(const std::vector<TrainExample>& data, const ChartGrammar& g, ScorerParams init, const TrainConfig& cfg,
              const std::function<void(const EpochMetrics&)>& on_epoch) {
  cfg.validate();
  FitResult out;
  out.params = std::move(init);
  auto& params = out.params;
  if (data.empty()) return out;

  std::mt19937_64 rng(cfg.seed);
  std::vector<std::size_t> order(data.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  ScorerParams m = ScorerParams::zeros_like(params), v = m;
  long step = 0;

  for (int epoch = 1; epoch <= cfg.epochs; ++epoch) {
    if (cfg.shuffle) std::shuffle(order.begin(), order.end(), rng);
    double total = 0.0;
    for (std::size_t b = 0; b < order.size(); b += static_cast<std::size_t>(cfg.batch_size)) {
      const std::size_t e = std::min(order.size(), b + static_cast<std::size_t>(cfg.batch_size));
      ScorerParams grad = ScorerParams::zeros_like(params);
      for (std::size_t k = b; k < e; ++k) {
        const double loss = loss_gradient(params, data[order[k]], g, grad);
        if (!std::isfinite(loss)) {
          throw TrainingDiverged("non-finite hinge loss at epoch " + std::to_string(epoch) +
                                 "; lower the learning rate");
        }
        total += loss;
      }
      grad.scale(1.0 / static_cast<double>(e - b));
      if (cfg.weight_decay > 0.0) grad.axpy(cfg.weight_decay, params);
      ++step;
      if (cfg.optimizer == Optimizer::Sgd) {
        params.axpy(-cfg.learning_rate, grad);
      } else {
        const double c1 = 1.0 - std::pow(cfg.beta1, static_cast<double>(step));
        const double c2 = 1.0 - std::pow(cfg.beta2, static_cast<double>(step));
        auto update = [&](auto& p, auto& mm, auto& vv, const auto& gg) {
          mm = cfg.beta1 * mm + (1.0 - cfg.beta1) * gg;
          vv = (cfg.beta2 * vv.array() + (1.0 - cfg.beta2) * gg.array().square()).matrix();
          p.array() -= cfg.learning_rate * (mm.array() / c1) / ((vv.array() / c2).sqrt() + cfg.epsilon);
        };
        update(params.embedding, m.embedding, v.embedding, grad.embedding);
        update(params.boundary, m.boundary, v.boundary, grad.boundary);
        update(params.wq, m.wq, v.wq, grad.wq);
        update(params.wk, m.wk, v.wk, grad.wk);
        update(params.wv, m.wv, v.wv, grad.wv);
        update(params.w1, m.w1, v.w1, grad.w1);
        update(params.b1, m.b1, v.b1, grad.b1);
        update(params.w2, m.w2, v.w2, grad.w2);
        update(params.b2, m.b2, v.b2, grad.b2);
      }
      if (!params.all_finite()) {
        throw TrainingDiverged("non-finite parameters at epoch " + std::to_string(epoch) + "; lower the learning rate");
      }
    }
    EpochMetrics em;
    em.epoch = epoch;
    em.loss = total / static_cast<double>(data.size());
    em.f1 = cfg.train_f1 ? training_f1(data, g, params) : 0.0;
    out.metrics.push_back(em);
    if (on_epoch) on_epoch(em);
    if (cfg.stop_when_fit && cfg.train_f1 && em.loss == 0.0 && em.f1 == 1.0) break;
  }
  return out;
}

void write_metrics(std::ostream& os, const std::vector<EpochMetrics>& metrics) {
  os << "epoch\tloss\tf1\n";
  os << std::setprecision(9);
  for (const auto& m : metrics) os << m.epoch << '\t' << m.loss << '\t' << m.f1 << '\n';
}

}  // namespace otp
