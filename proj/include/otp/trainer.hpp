// Structured hinge training of the span scorer.

#ifndef OTP_TRAINER_HPP
#define OTP_TRAINER_HPP

#include <functional>
#include <iosfwd>
#include <stdexcept>

#include "otp/decoder.hpp"
#include "otp/scorer.hpp"

namespace otp {

enum class Optimizer { Sgd, Adam };

struct TrainConfig {
  double learning_rate = 0.05;
  int epochs = 10;
  int batch_size = 8;
  std::uint64_t seed = 1;
  bool shuffle = true;
  Optimizer optimizer = Optimizer::Sgd;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-8;
  double weight_decay = 0.0;
  /// Decode the training set after each epoch to log quadruple F1.
  bool train_f1 = true;
  /// Stop once an epoch ends with zero loss and F1 of one.
  bool stop_when_fit = false;

  /// Throws ConfigError for non-positive rates, epochs < 0 or batch < 1.
  void validate() const;
};

/// One training sentence: augmented tokens, word ids and the gold pruned tree.
struct TrainExample {
  Sentence sentence;
  std::vector<int> ids;
  OpinionTree gold;
  LabeledSpanSet gold_spans;
};

TrainExample make_example(const Sentence& augmented, const Grammar& g, const Vocabulary& vocab);

struct HingeResult {
  double loss = 0.0;
  double gold_score = 0.0;
  DecodeResult violating;  // score is s(T) + hamming(T, gold)
};

/// max(0, max_T [s(T) + hamming(T, gold)] - s(gold)).
HingeResult hinge_loss(const SpanScoreTable& table, const ChartGrammar& g, const LabeledSpanSet& gold,
                       const DecodeOptions& opt = {});

/// Per-cell coefficients of s(T_viol) - s(gold); shared cells cancel.
std::vector<SpanGradient> hinge_cells(const LabeledSpanSet& violating, const LabeledSpanSet& gold);

/// grad += d(hinge)/d(params) for one example; returns the loss. Zero loss
/// adds nothing.
double loss_gradient(const ScorerParams& params, const TrainExample& ex, const ChartGrammar& g, ScorerParams& grad);

struct EpochMetrics {
  int epoch = 0;
  double loss = 0.0;  // mean hinge over the epoch
  double f1 = 0.0;    // training quadruple F1 after the epoch
};

struct TrainingDiverged : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct FitResult {
  ScorerParams params;
  std::vector<EpochMetrics> metrics;
};

/// Mini-batch training from `init`; deterministic for a given config.
/// Throws TrainingDiverged on a non-finite loss or parameter.
FitResult fit(const std::vector<TrainExample>& data, const ChartGrammar& g, ScorerParams init, const TrainConfig& cfg,
              const std::function<void(const EpochMetrics&)>& on_epoch = {});

/// Training-set F1 of the current parameters.
double training_f1(const std::vector<TrainExample>& data, const ChartGrammar& g, const ScorerParams& params);

/// "epoch<TAB>loss<TAB>f1" lines under a header.
void write_metrics(std::ostream& os, const std::vector<EpochMetrics>& metrics);

}  // namespace otp

#endif  // OTP_TRAINER_HPP
