#include <gtest/gtest.h>

#include <random>
#include <sstream>

#include "otp/scorer.hpp"

namespace otp {
namespace {

ScorerParams small_params(std::uint64_t seed, int vocab = 12, int d = 6, int hidden = 7, int labels = 5) {
  auto p = ScorerParams::init(static_cast<std::size_t>(vocab), d, hidden, labels, seed);
  // Nonzero biases so every block is exercised.
  std::mt19937_64 rng(seed + 1);
  std::uniform_real_distribution<double> u(-0.1, 0.1);
  for (int i = 0; i < p.b1.size(); ++i) p.b1(i) = u(rng);
  for (int i = 0; i < p.b2.size(); ++i) p.b2(i) = u(rng);
  return p;
}

// Reference forward pass written out loop by loop.
Eigen::MatrixXd reference_fenceposts(const std::vector<int>& ids, const ScorerParams& p) {
  const int n = static_cast<int>(ids.size()), d = p.d;
  std::vector<std::vector<double>> x(n, std::vector<double>(d));
  for (int t = 0; t < n; ++t) {
    for (int k = 0; k < d; ++k) {
      double angle = (t + 1) / std::pow(10000.0, (2.0 * (k / 2)) / d);
      x[t][k] = p.embedding(ids[t], k) + (k % 2 == 0 ? std::sin(angle) : std::cos(angle));
    }
  }
  auto proj = [&](const Eigen::MatrixXd& w) {
    std::vector<std::vector<double>> out(n, std::vector<double>(d, 0.0));
    for (int t = 0; t < n; ++t)
      for (int c = 0; c < d; ++c)
        for (int k = 0; k < d; ++k) out[t][c] += x[t][k] * w(k, c);
    return out;
  };
  auto q = proj(p.wq), kk = proj(p.wk), v = proj(p.wv);
  Eigen::MatrixXd h(n + 1, d);
  h.row(0) = p.boundary.transpose();
  for (int t = 0; t < n; ++t) {
    std::vector<double> w(n);
    double mx = -1e300, sum = 0;
    for (int s = 0; s < n; ++s) {
      double dot = 0;
      for (int k = 0; k < d; ++k) dot += q[t][k] * kk[s][k];
      w[s] = dot / std::sqrt(double(d));
      mx = std::max(mx, w[s]);
    }
    for (int s = 0; s < n; ++s) sum += (w[s] = std::exp(w[s] - mx));
    for (int k = 0; k < d; ++k) {
      double z = 0;
      for (int s = 0; s < n; ++s) z += w[s] / sum * v[s][k];
      h(t + 1, k) = x[t][k] + z;
    }
  }
  return h;
}

TEST(Scorer, EmptySentenceHasBoundaryOnly) {
  auto p = small_params(3);
  auto e = encode({}, p);
  ASSERT_EQ(e.h.rows(), 1);
  EXPECT_EQ(Eigen::VectorXd(e.h.row(0).transpose()), p.boundary);
  EXPECT_EQ(score_all_spans(std::vector<int>{}, p).length(), 0);
}

TEST(Scorer, EncodeMatchesReference) {
  auto p = small_params(5);
  std::vector<int> ids = {1, 4, 4, 0, 9, 2};
  auto e = encode(ids, p);
  auto ref = reference_fenceposts(ids, p);
  EXPECT_LT((e.h - ref).cwiseAbs().maxCoeff(), 1e-12);
}

TEST(Scorer, Deterministic) {
  auto p1 = small_params(11), p2 = small_params(11);
  EXPECT_EQ(p1, p2);
  std::vector<int> ids = {3, 1, 4, 1, 5};
  EXPECT_EQ(score_all_spans(ids, p1), score_all_spans(ids, p2));
}

TEST(Scorer, MixingIsGlobal) {
  auto p = small_params(7);
  std::vector<int> a = {1, 2, 3, 4, 5, 6, 7}, b = a;
  std::swap(b[0], b[6]);
  auto ha = encode(a, p).h, hb = encode(b, p).h;
  for (int t : {3, 4}) EXPECT_GT((ha.row(t) - hb.row(t)).norm(), 0.0) << t;
}

TEST(Scorer, SpanReprTelescopes) {
  auto h = encode({1, 2, 3, 4, 5}, small_params(2)).h;
  for (int i = 0; i < 5; ++i)
    for (int j = i + 1; j < 5; ++j)
      for (int k = j + 1; k <= 5; ++k)
        EXPECT_LT((span_repr(h, i, k) - span_repr(h, i, j) - span_repr(h, j, k)).cwiseAbs().maxCoeff(), 1e-15);
  EXPECT_THROW(span_repr(h, 2, 2), ContractViolation);
  EXPECT_THROW(span_repr(h, 3, 9), ContractViolation);
}

TEST(Scorer, DegenerateWeightsGiveBias) {
  auto p = small_params(4);
  p.w1.setZero();
  p.b1.setZero();
  auto t = score_all_spans({1, 2, 3}, p);
  for (int i = 0; i < 3; ++i)
    for (int j = i + 1; j <= 3; ++j)
      for (int l = 0; l < p.labels; ++l) EXPECT_EQ(t(i, j, l), p.b2(l));
  EXPECT_EQ(t(0, 1, p.labels), 0.0);  // EMPTY
}

TEST(Scorer, PositiveHomogeneity) {
  auto p = small_params(8);
  p.b1.setZero();
  Eigen::VectorXd v = Eigen::VectorXd::Constant(p.d, 0.3);
  p.w1 = p.w1.cwiseAbs();
  auto s1 = score_span(v, p), s2 = score_span(2.0 * v, p);
  EXPECT_LT(((s2 - p.b2) - 2.0 * (s1 - p.b2)).cwiseAbs().maxCoeff(), 1e-12);
  EXPECT_THROW(score_span(Eigen::VectorXd::Zero(p.d + 1), p), ContractViolation);
}

TEST(Scorer, TableMatchesPerSpan) {
  auto p = small_params(9);
  std::vector<int> ids = {1, 5, 2, 7, 3, 3, 8};
  auto e = encode(ids, p);
  auto t = score_all_spans(e, p);
  std::mt19937_64 rng(1);
  for (int trial = 0; trial < 20; ++trial) {
    int i = static_cast<int>(rng() % 7), j = i + 1 + static_cast<int>(rng() % (7 - i));
    auto s = score_span(span_repr(e.h, i, j), p);
    for (int l = 0; l < p.labels; ++l) EXPECT_NEAR(t(i, j, l), s(l), 1e-12);
  }
}

// Central differences of sum(coef * s) against accumulate_gradient.
double max_relative_error(std::uint64_t seed) {
  auto p = small_params(seed);
  std::mt19937_64 rng(seed);
  std::vector<int> ids;
  for (int t = 0; t < 5; ++t) ids.push_back(static_cast<int>(rng() % 12));
  std::vector<SpanGradient> cells;
  for (int k = 0; k < 6; ++k) {
    int i = static_cast<int>(rng() % 5), j = i + 1 + static_cast<int>(rng() % (5 - i));
    cells.push_back({i, j, static_cast<int>(rng() % 5), (rng() % 2 ? 1.0 : -1.0)});
  }
  auto objective = [&](const ScorerParams& q) {
    auto t = score_all_spans(ids, q);
    double s = 0;
    for (const auto& c : cells) s += c.coef * t(c.begin, c.end, c.label);
    return s;
  };
  auto grad = ScorerParams::zeros_like(p);
  accumulate_gradient(encode(ids, p), p, cells, grad);

  double worst = 0;
  const double h = 1e-5;
  auto probe = ScorerParams::zeros_like(p);
  std::vector<double*> entries, analytic;
  probe.for_each_block([&](auto& m) {
    for (Eigen::Index i = 0; i < m.size(); ++i) entries.push_back(m.data() + i);
  });
  grad.for_each_block([&](auto& m) {
    for (Eigen::Index i = 0; i < m.size(); ++i) analytic.push_back(m.data() + i);
  });
  for (std::size_t k = 0; k < entries.size(); ++k) {
    *entries[k] = h;
    auto plus = p, minus = p;
    plus.axpy(1.0, probe);
    minus.axpy(-1.0, probe);
    *entries[k] = 0;
    const double fd = (objective(plus) - objective(minus)) / (2 * h);
    const double an = *analytic[k];
    const double err = std::abs(fd - an) / std::max(1e-3, std::abs(fd) + std::abs(an));
    worst = std::max(worst, err);
  }
  return worst;
}

TEST(Scorer, GradientMatchesFiniteDifferences) {
  for (std::uint64_t seed = 1; seed <= 10; ++seed) EXPECT_LT(max_relative_error(seed), 1e-4) << seed;
}

TEST(Scorer, CheckpointRoundTrip) {
  Model m;
  m.categories = {"FOOD#QUALITY", "SERVICE#GENERAL"};
  m.families = all_families();
  for (const char* w : {"great", "pizza", "the"}) m.vocab.add(w);
  m.params = ScorerParams::init(m.vocab.size(), 4, 3, static_cast<int>(build_label_set(m.grammar()).scored_size()), 99);
  std::stringstream ss;
  save_model(ss, m);
  const std::string bytes = ss.str();
  EXPECT_EQ(bytes.substr(0, 8), "OTPARSE1");
  std::stringstream in(bytes);
  EXPECT_EQ(load_model(in), m);
  std::stringstream truncated(bytes.substr(0, bytes.size() / 2));
  EXPECT_THROW(load_model(truncated), FormatError);
  std::string bad = bytes;
  bad[0] = 'X';
  std::stringstream wrong(bad);
  EXPECT_THROW(load_model(wrong), FormatError);
}

TEST(Scorer, UnknownWordsMapToUnk) {
  Vocabulary v;
  v.add("pizza");
  EXPECT_EQ(v.id("pizza"), 1);
  EXPECT_EQ(v.id("sushi"), Vocabulary::kUnk);
  EXPECT_EQ(v.ids({"pizza", "sushi"}), (std::vector<int>{1, 0}));
}

}  // namespace
}  // namespace otp
