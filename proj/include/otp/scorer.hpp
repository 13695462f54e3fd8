// Span scorer: learned embeddings with sinusoidal positions, one single-head
// self-attention layer with a residual connection, fencepost differences and
// a two-layer MLP giving one score per non-EMPTY label.

#ifndef OTP_SCORER_HPP
#define OTP_SCORER_HPP

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include <Eigen/Dense>

#include "otp/grammar.hpp"

namespace otp {

/// Word types; id 0 is the reserved unknown word.
class Vocabulary {
 public:
  static constexpr int kUnk = 0;
  static constexpr const char* kUnkToken = "<unk>";

  Vocabulary();
  int add(const std::string& w);
  int id(const std::string& w) const;
  const std::string& word(int id) const { return words_.at(static_cast<std::size_t>(id)); }
  std::size_t size() const { return words_.size(); }
  std::vector<int> ids(const std::vector<std::string>& tokens) const;
  bool operator==(const Vocabulary& o) const { return words_ == o.words_; }

 private:
  std::vector<std::string> words_;
  std::unordered_map<std::string, int> index_;
};

struct ScorerParams {
  int d = 0;
  int hidden = 0;
  int labels = 0;  // non-EMPTY labels
  std::uint64_t seed = 0;

  Eigen::MatrixXd embedding;  // vocab x d
  Eigen::VectorXd boundary;   // d, stands for h_0
  Eigen::MatrixXd wq, wk, wv; // d x d
  Eigen::MatrixXd w1;         // d x hidden
  Eigen::VectorXd b1;         // hidden
  Eigen::MatrixXd w2;         // hidden x labels
  Eigen::VectorXd b2;         // labels

  /// Uniform(-0.1, 0.1) matrices and boundary vector, zero biases.
  static ScorerParams init(std::size_t vocab_size, int d, int hidden, int labels, std::uint64_t seed);
  static ScorerParams zeros_like(const ScorerParams& p);

  std::size_t vocab_size() const { return static_cast<std::size_t>(embedding.rows()); }
  /// this += a * g, block by block.
  void axpy(double a, const ScorerParams& g);
  void scale(double a);
  bool all_finite() const;
  double squared_norm() const;

  /// Visits every parameter block in checkpoint order.
  template <class F>
  void for_each_block(F&& f) {
    f(embedding); f(boundary); f(wq); f(wk); f(wv); f(w1); f(b1); f(w2); f(b2);
  }
  template <class F>
  void for_each_block(F&& f) const {
    f(embedding); f(boundary); f(wq); f(wk); f(wv); f(w1); f(b1); f(w2); f(b2);
  }

  bool operator==(const ScorerParams& o) const;
};

/// Forward activations kept for the backward pass. Row t of `h` is fencepost t.
struct Encoding {
  std::vector<int> ids;
  Eigen::MatrixXd x;        // n x d inputs
  Eigen::MatrixXd q, k, v;  // n x d
  Eigen::MatrixXd attn;     // n x n
  Eigen::MatrixXd h;        // (n+1) x d

  int length() const { return static_cast<int>(ids.size()); }
};

Encoding encode(const std::vector<int>& ids, const ScorerParams& p);

/// Sinusoidal position vector for token position t (1-based).
Eigen::VectorXd position_vector(int t, int d);

/// h_j - h_i; requires 0 <= i < j < rows.
Eigen::VectorXd span_repr(const Eigen::MatrixXd& h, int i, int j);

/// relu(v W1 + b1) W2 + b2.
Eigen::VectorXd score_span(const Eigen::VectorXd& v, const ScorerParams& p);

/// Dense scores for 0 <= i < j <= n over the non-EMPTY labels. Reading the
/// EMPTY id returns 0.
class SpanScoreTable {
 public:
  SpanScoreTable() = default;
  SpanScoreTable(int n, int labels);

  int length() const { return n_; }
  int labels() const { return labels_; }
  double operator()(int i, int j, int l) const {
    if (l == labels_) return 0.0;
    return data_[offset(i, j) + static_cast<std::size_t>(l)];
  }
  double& at(int i, int j, int l) { return data_[offset(i, j) + static_cast<std::size_t>(l)]; }
  bool all_finite() const;
  bool operator==(const SpanScoreTable& o) const = default;

 private:
  std::size_t offset(int i, int j) const {
    return (static_cast<std::size_t>(i) * static_cast<std::size_t>(n_ + 1) + static_cast<std::size_t>(j)) *
           static_cast<std::size_t>(labels_);
  }
  int n_ = 0;
  int labels_ = 0;
  std::vector<double> data_;
};

SpanScoreTable score_all_spans(const Encoding& enc, const ScorerParams& p);
SpanScoreTable score_all_spans(const std::vector<int>& ids, const ScorerParams& p);

/// d(objective)/d s(i,j,l) for one table cell.
struct SpanGradient {
  int begin = 0;
  int end = 0;
  int label = 0;
  double coef = 0.0;
};

/// grad += d/dparams of sum(coef * s(i,j,l)). Entries on the EMPTY label are ignored.
void accumulate_gradient(const Encoding& enc, const ScorerParams& p, std::span<const SpanGradient> cells,
                         ScorerParams& grad);

/// Parameters plus what is needed to score and decode new text.
struct Model {
  ScorerParams params;
  Vocabulary vocab;
  std::vector<std::string> categories;
  std::set<RuleFamily> families;

  Grammar grammar() const { return build_grammar(categories, families); }
  bool operator==(const Model& o) const;
};

inline constexpr std::uint32_t kCheckpointVersion = 1;

/// Little-endian binary checkpoint (layout in docs/formats.md).
void save_model(std::ostream& os, const Model& m);
Model load_model(std::istream& is);
void save_model(const std::string& path, const Model& m);
Model load_model(const std::string& path);

}  // namespace otp

#endif  // OTP_SCORER_HPP
