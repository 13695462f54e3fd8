#include "otp/scorer.hpp"

#include <bit>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <random>

namespace otp {

Vocabulary::Vocabulary() { add(kUnkToken); }

int Vocabulary::add(const std::string& w) {
  auto [it, inserted] = index_.emplace(w, static_cast<int>(words_.size()));
  if (inserted) words_.push_back(w);
  return it->second;
}

int Vocabulary::id(const std::string& w) const {
  auto it = index_.find(w);
  return it == index_.end() ? kUnk : it->second;
}

std::vector<int> Vocabulary::ids(const std::vector<std::string>& tokens) const {
  std::vector<int> out;
  out.reserve(tokens.size());
  for (const auto& t : tokens) out.push_back(id(t));
  return out;
}

ScorerParams ScorerParams::init(std::size_t vocab_size, int d, int hidden, int labels, std::uint64_t seed) {
  if (d <= 0 || hidden <= 0 || labels <= 0 || vocab_size == 0) {
    throw ConfigError("scorer dimensions must be positive");
  }
  ScorerParams p;
  p.d = d;
  p.hidden = hidden;
  p.labels = labels;
  p.seed = seed;
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> u(-0.1, 0.1);
  auto fill = [&](Eigen::Index rows, Eigen::Index cols) {
    Eigen::MatrixXd m(rows, cols);
    for (Eigen::Index r = 0; r < rows; ++r) {
      for (Eigen::Index c = 0; c < cols; ++c) m(r, c) = u(rng);
    }
    return m;
  };
  p.embedding = fill(static_cast<Eigen::Index>(vocab_size), d);
  p.boundary = fill(d, 1).col(0);
  p.wq = fill(d, d);
  p.wk = fill(d, d);
  p.wv = fill(d, d);
  p.w1 = fill(d, hidden);
  p.b1 = Eigen::VectorXd::Zero(hidden);
  p.w2 = fill(hidden, labels);
  p.b2 = Eigen::VectorXd::Zero(labels);
  return p;
}

ScorerParams ScorerParams::zeros_like(const ScorerParams& p) {
  ScorerParams z = p;
  z.for_each_block([](auto& m) { m.setZero(); });
  return z;
}

void ScorerParams::axpy(double a, const ScorerParams& g) {
  embedding += a * g.embedding;
  boundary += a * g.boundary;
  wq += a * g.wq;
  wk += a * g.wk;
  wv += a * g.wv;
  w1 += a * g.w1;
  b1 += a * g.b1;
  w2 += a * g.w2;
  b2 += a * g.b2;
}

void ScorerParams::scale(double a) {
  for_each_block([a](auto& m) { m *= a; });
}

bool ScorerParams::all_finite() const {
  bool ok = true;
  for_each_block([&](const auto& m) { ok = ok && m.allFinite(); });
  return ok;
}

double ScorerParams::squared_norm() const {
  double s = 0.0;
  for_each_block([&](const auto& m) { s += m.squaredNorm(); });
  return s;
}

bool ScorerParams::operator==(const ScorerParams& o) const {
  if (d != o.d || hidden != o.hidden || labels != o.labels || seed != o.seed) return false;
  return embedding == o.embedding && boundary == o.boundary && wq == o.wq && wk == o.wk && wv == o.wv &&
         w1 == o.w1 && b1 == o.b1 && w2 == o.w2 && b2 == o.b2;
}

Eigen::VectorXd position_vector(int t, int d) {
  Eigen::VectorXd pe(d);
  for (int k = 0; k < d; ++k) {
    const double rate = std::pow(10000.0, -static_cast<double>(2 * (k / 2)) / d);
    pe(k) = (k % 2 == 0) ? std::sin(t * rate) : std::cos(t * rate);
  }
  return pe;
}

Encoding encode(const std::vector<int>& ids, const ScorerParams& p) {
  const int n = static_cast<int>(ids.size());
  Encoding e;
  e.ids = ids;
  e.x.resize(n, p.d);
  for (int t = 0; t < n; ++t) {
    int id = ids[static_cast<std::size_t>(t)];
    if (id < 0 || static_cast<std::size_t>(id) >= p.vocab_size()) id = Vocabulary::kUnk;
    e.ids[static_cast<std::size_t>(t)] = id;
    e.x.row(t) = p.embedding.row(id) + position_vector(t + 1, p.d).transpose();
  }
  e.h.resize(n + 1, p.d);
  e.h.row(0) = p.boundary.transpose();
  if (n == 0) return e;

  e.q = e.x * p.wq;
  e.k = e.x * p.wk;
  e.v = e.x * p.wv;
  Eigen::MatrixXd logits = (e.q * e.k.transpose()) / std::sqrt(static_cast<double>(p.d));
  e.attn.resize(n, n);
  for (int r = 0; r < n; ++r) {
    const double mx = logits.row(r).maxCoeff();
    Eigen::RowVectorXd ex = (logits.row(r).array() - mx).exp();
    e.attn.row(r) = ex / ex.sum();
  }
  e.h.bottomRows(n) = e.x + e.attn * e.v;
  return e;
}

Eigen::VectorXd span_repr(const Eigen::MatrixXd& h, int i, int j) {
  if (i < 0 || i >= j || j >= h.rows()) {
    throw ContractViolation("span_repr needs 0 <= i < j <= n, got " + std::to_string(i) + "," + std::to_string(j));
  }
  return (h.row(j) - h.row(i)).transpose();
}

Eigen::VectorXd score_span(const Eigen::VectorXd& v, const ScorerParams& p) {
  if (v.size() != p.d) throw ContractViolation("span vector has the wrong dimension");
  Eigen::VectorXd hidden = (p.w1.transpose() * v + p.b1).cwiseMax(0.0);
  return p.w2.transpose() * hidden + p.b2;
}

SpanScoreTable::SpanScoreTable(int n, int labels)
    : n_(n), labels_(labels),
      data_(static_cast<std::size_t>(n + 1) * static_cast<std::size_t>(n + 1) * static_cast<std::size_t>(labels), 0.0) {}

bool SpanScoreTable::all_finite() const {
  for (double x : data_) {
    if (!std::isfinite(x)) return false;
  }
  return true;
}

SpanScoreTable score_all_spans(const Encoding& enc, const ScorerParams& p) {
  const int n = enc.length();
  SpanScoreTable table(n, p.labels);
  if (n == 0) return table;
  // v W1 = h_j W1 - h_i W1, so project every fencepost once.
  const Eigen::MatrixXd proj = enc.h * p.w1;
  const int spans = n * (n + 1) / 2;
  Eigen::MatrixXd hidden(spans, p.hidden);
  int r = 0;
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j <= n; ++j, ++r) {
      hidden.row(r) = (proj.row(j) - proj.row(i) + p.b1.transpose()).cwiseMax(0.0);
    }
  }
  Eigen::MatrixXd scores = hidden * p.w2;
  r = 0;
  for (int i = 0; i < n; ++i) {
    for (int j = i + 1; j <= n; ++j, ++r) {
      for (int l = 0; l < p.labels; ++l) table.at(i, j, l) = scores(r, l) + p.b2(l);
    }
  }
  return table;
}

SpanScoreTable score_all_spans(const std::vector<int>& ids, const ScorerParams& p) {
  return score_all_spans(encode(ids, p), p);
}

void accumulate_gradient(const Encoding& enc, const ScorerParams& p, std::span<const SpanGradient> cells,
                         ScorerParams& grad) {
  const int n = enc.length();
  if (n == 0 || cells.empty()) return;

  // Per-span output gradients, in a fixed order.
  std::map<std::pair<int, int>, Eigen::VectorXd> ds;
  for (const auto& c : cells) {
    if (c.label < 0 || c.label > p.labels) throw ContractViolation("gradient label out of range");
    if (c.label == p.labels || c.coef == 0.0) continue;
    if (c.begin < 0 || c.begin >= c.end || c.end > n) throw ContractViolation("gradient span out of range");
    auto [it, fresh] = ds.try_emplace({c.begin, c.end}, Eigen::VectorXd::Zero(p.labels));
    it->second(c.label) += c.coef;
  }

  Eigen::MatrixXd dh = Eigen::MatrixXd::Zero(n + 1, p.d);
  for (const auto& [span, g] : ds) {
    const auto [i, j] = span;
    Eigen::VectorXd v = (enc.h.row(j) - enc.h.row(i)).transpose();
    Eigen::VectorXd pre = p.w1.transpose() * v + p.b1;
    Eigen::VectorXd act = pre.cwiseMax(0.0);
    grad.b2 += g;
    grad.w2 += act * g.transpose();
    Eigen::VectorXd dpre = (p.w2 * g).cwiseProduct((pre.array() > 0.0).cast<double>().matrix());
    grad.b1 += dpre;
    grad.w1 += v * dpre.transpose();
    Eigen::RowVectorXd dv = (p.w1 * dpre).transpose();
    dh.row(j) += dv;
    dh.row(i) -= dv;
  }

  grad.boundary += dh.row(0).transpose();
  const Eigen::MatrixXd dout = dh.bottomRows(n);
  Eigen::MatrixXd dx = dout;  // residual
  const Eigen::MatrixXd dattn = dout * enc.v.transpose();
  const Eigen::MatrixXd dvm = enc.attn.transpose() * dout;
  Eigen::MatrixXd dlogits(n, n);
  for (int r = 0; r < n; ++r) {
    const double dot = dattn.row(r).dot(enc.attn.row(r));
    dlogits.row(r) = enc.attn.row(r).array() * (dattn.row(r).array() - dot);
  }
  const double inv = 1.0 / std::sqrt(static_cast<double>(p.d));
  const Eigen::MatrixXd dq = dlogits * enc.k * inv;
  const Eigen::MatrixXd dk = dlogits.transpose() * enc.q * inv;
  grad.wq += enc.x.transpose() * dq;
  grad.wk += enc.x.transpose() * dk;
  grad.wv += enc.x.transpose() * dvm;
  dx += dq * p.wq.transpose() + dk * p.wk.transpose() + dvm * p.wv.transpose();
  for (int t = 0; t < n; ++t) grad.embedding.row(enc.ids[static_cast<std::size_t>(t)]) += dx.row(t);
}

bool Model::operator==(const Model& o) const {
  return params == o.params && vocab == o.vocab && categories == o.categories && families == o.families;
}

namespace {

constexpr char kMagic[8] = {'O', 'T', 'P', 'A', 'R', 'S', 'E', '1'};

void put_u32(std::ostream& os, std::uint32_t x) {
  char b[4];
  for (int i = 0; i < 4; ++i) b[i] = static_cast<char>((x >> (8 * i)) & 0xFFu);
  os.write(b, 4);
}

void put_u64(std::ostream& os, std::uint64_t x) {
  char b[8];
  for (int i = 0; i < 8; ++i) b[i] = static_cast<char>((x >> (8 * i)) & 0xFFu);
  os.write(b, 8);
}

void put_string(std::ostream& os, const std::string& s) {
  put_u32(os, static_cast<std::uint32_t>(s.size()));
  os.write(s.data(), static_cast<std::streamsize>(s.size()));
}

template <class M>
void put_block(std::ostream& os, const M& m) {
  for (Eigen::Index r = 0; r < m.rows(); ++r) {
    for (Eigen::Index c = 0; c < m.cols(); ++c) put_u64(os, std::bit_cast<std::uint64_t>(m(r, c)));
  }
}

class Reader {
 public:
  explicit Reader(std::istream& is) : is_(is) {}

  void bytes(char* out, std::size_t n) {
    is_.read(out, static_cast<std::streamsize>(n));
    if (static_cast<std::size_t>(is_.gcount()) != n) throw FormatError("checkpoint: truncated file");
  }
  std::uint32_t u32() {
    unsigned char b[4];
    bytes(reinterpret_cast<char*>(b), 4);
    std::uint32_t x = 0;
    for (int i = 0; i < 4; ++i) x |= static_cast<std::uint32_t>(b[i]) << (8 * i);
    return x;
  }
  std::uint64_t u64() {
    unsigned char b[8];
    bytes(reinterpret_cast<char*>(b), 8);
    std::uint64_t x = 0;
    for (int i = 0; i < 8; ++i) x |= static_cast<std::uint64_t>(b[i]) << (8 * i);
    return x;
  }
  std::string str() {
    std::uint32_t n = u32();
    if (n > (1u << 20)) throw FormatError("checkpoint: implausible string length");
    std::string s(n, '\0');
    bytes(s.data(), n);
    return s;
  }
  template <class M>
  void block(M& m) {
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
      for (Eigen::Index c = 0; c < m.cols(); ++c) m(r, c) = std::bit_cast<double>(u64());
    }
  }

 private:
  std::istream& is_;
};

}  // namespace

void save_model(std::ostream& os, const Model& m) {
  const auto& p = m.params;
  os.write(kMagic, sizeof kMagic);
  put_u32(os, kCheckpointVersion);
  put_u32(os, static_cast<std::uint32_t>(p.d));
  put_u32(os, static_cast<std::uint32_t>(p.hidden));
  put_u32(os, static_cast<std::uint32_t>(p.labels));
  put_u32(os, static_cast<std::uint32_t>(p.vocab_size()));
  put_u64(os, p.seed);
  p.for_each_block([&](const auto& b) { put_block(os, b); });
  put_u32(os, static_cast<std::uint32_t>(m.vocab.size()));
  for (std::size_t i = 0; i < m.vocab.size(); ++i) put_string(os, m.vocab.word(static_cast<int>(i)));
  put_u32(os, static_cast<std::uint32_t>(m.categories.size()));
  for (const auto& c : m.categories) put_string(os, c);
  std::uint32_t mask = 0;
  for (auto f : m.families) mask |= 1u << static_cast<unsigned>(f);
  put_u32(os, mask);
  if (!os) throw FormatError("checkpoint: write failed");
}

Model load_model(std::istream& is) {
  Reader rd(is);
  char magic[8];
  rd.bytes(magic, 8);
  if (!std::equal(magic, magic + 8, kMagic)) throw FormatError("checkpoint: bad magic");
  const auto version = rd.u32();
  if (version != kCheckpointVersion) throw FormatError("checkpoint: unsupported version " + std::to_string(version));
  Model m;
  auto& p = m.params;
  p.d = static_cast<int>(rd.u32());
  p.hidden = static_cast<int>(rd.u32());
  p.labels = static_cast<int>(rd.u32());
  const auto vocab = rd.u32();
  p.seed = rd.u64();
  if (p.d <= 0 || p.hidden <= 0 || p.labels <= 0 || vocab == 0 || p.d > 1 << 16 || p.hidden > 1 << 16 ||
      p.labels > 1 << 16 || vocab > 1u << 24) {
    throw FormatError("checkpoint: implausible dimensions");
  }
  p.embedding.resize(vocab, p.d);
  p.boundary.resize(p.d);
  p.wq.resize(p.d, p.d);
  p.wk.resize(p.d, p.d);
  p.wv.resize(p.d, p.d);
  p.w1.resize(p.d, p.hidden);
  p.b1.resize(p.hidden);
  p.w2.resize(p.hidden, p.labels);
  p.b2.resize(p.labels);
  p.for_each_block([&](auto& b) { rd.block(b); });
  const auto words = rd.u32();
  if (words != vocab) throw FormatError("checkpoint: vocabulary size mismatch");
  for (std::uint32_t i = 0; i < words; ++i) {
    auto w = rd.str();
    if (i == 0) {
      if (w != Vocabulary::kUnkToken) throw FormatError("checkpoint: first word must be the unknown token");
      continue;
    }
    if (m.vocab.add(w) != static_cast<int>(i)) throw FormatError("checkpoint: duplicate word '" + w + "'");
  }
  const auto cats = rd.u32();
  if (cats > 1u << 16) throw FormatError("checkpoint: implausible category count");
  for (std::uint32_t i = 0; i < cats; ++i) m.categories.push_back(rd.str());
  const auto mask = rd.u32();
  for (auto f : kConditionalFamilies) {
    if (mask & (1u << static_cast<unsigned>(f))) m.families.insert(f);
  }
  if (static_cast<std::size_t>(p.labels) != build_label_set(m.grammar()).scored_size()) {
    throw FormatError("checkpoint: label count does not match the categories");
  }
  return m;
}

void save_model(const std::string& path, const Model& m) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw ConfigError("cannot write checkpoint '" + path + "'");
  save_model(os, m);
}

Model load_model(const std::string& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw ConfigError("cannot read checkpoint '" + path + "'");
  return load_model(is);
}

}  // namespace otp
