#include "otp/corpus.hpp"

#include <charconv>
#include <filesystem>
#include <fstream>
#include <istream>
#include <ostream>
#include <set>
#include <sstream>

#include <json.hpp>

namespace otp {

namespace {

std::vector<std::string_view> split_on(std::string_view s, char sep) {
  std::vector<std::string_view> out;
  std::size_t start = 0;
  while (true) {
    auto pos = s.find(sep, start);
    out.push_back(s.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  return out;
}

std::vector<std::string> whitespace_tokens(std::string_view s) {
  std::vector<std::string> out;
  std::size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && (s[i] == ' ' || s[i] == '\t' || s[i] == '\r')) ++i;
    std::size_t j = i;
    while (j < s.size() && s[j] != ' ' && s[j] != '\t' && s[j] != '\r') ++j;
    if (j > i) out.emplace_back(s.substr(i, j - i));
    i = j;
  }
  return out;
}

[[noreturn]] void bad_line(int line_no, const std::string& what) {
  throw FormatError("line " + std::to_string(line_no) + ": " + what);
}

int parse_int(std::string_view s, int line_no) {
  int v = 0;
  auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || p != s.data() + s.size()) bad_line(line_no, "expected an integer, got '" + std::string(s) + "'");
  return v;
}

std::string term_text(const std::optional<Span>& s) {
  return s ? std::to_string(s->begin) + "," + std::to_string(s->end) : "-";
}

std::optional<Span> parse_term(std::string_view s, int line_no) {
  if (s == "-") return std::nullopt;
  auto parts = split_on(s, ',');
  if (parts.size() != 2) bad_line(line_no, "bad span '" + std::string(s) + "'");
  return Span{parse_int(parts[0], line_no), parse_int(parts[1], line_no)};
}

void check_spans(const CorpusRecord& r, int line_no) {
  try {
    check_quad_spans(r.tokens, r.quads);
  } catch (const ContractViolation& e) {
    bad_line(line_no, e.what());
  }
}

}  // namespace

std::string_view to_string(Split s) {
  switch (s) {
    case Split::Train: return "train";
    case Split::Validation: return "validation";
    case Split::Test: return "test";
  }
  return "?";
}

std::optional<Split> split_from_string(std::string_view s) {
  if (s == "train") return Split::Train;
  if (s == "validation" || s == "dev") return Split::Validation;
  if (s == "test") return Split::Test;
  return std::nullopt;
}

std::string format_record(const CorpusRecord& r) {
  std::string out(to_string(r.split));
  out += '\t';
  out += std::to_string(r.source_line);
  out += '\t';
  for (std::size_t i = 0; i < r.tokens.size(); ++i) {
    if (i) out += ' ';
    out += r.tokens[i];
  }
  for (const auto& q : r.quads) {
    out += '\t';
    out += term_text(q.aspect) + ";" + q.category + ";" + std::string(to_string(q.polarity)) + ";" + term_text(q.opinion);
  }
  return out;
}

CorpusRecord parse_record(std::string_view line, int line_no) {
  if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
  auto fields = split_on(line, '\t');
  if (fields.size() < 3) bad_line(line_no, "expected split, source line and tokens");
  CorpusRecord r;
  auto split = split_from_string(fields[0]);
  if (!split) bad_line(line_no, "unknown split '" + std::string(fields[0]) + "'");
  r.split = *split;
  r.source_line = parse_int(fields[1], line_no);
  r.tokens = whitespace_tokens(fields[2]);
  for (std::size_t f = 3; f < fields.size(); ++f) {
    auto parts = split_on(fields[f], ';');
    if (parts.size() != 4) bad_line(line_no, "quad needs four ';'-separated fields");
    SentimentQuadruple q;
    q.aspect = parse_term(parts[0], line_no);
    q.category = normalize_category(parts[1]);
    if (q.category.empty()) bad_line(line_no, "empty category");
    auto pol = polarity_from_string(parts[2]);
    if (!pol) bad_line(line_no, "unknown polarity '" + std::string(parts[2]) + "'");
    q.polarity = *pol;
    q.opinion = parse_term(parts[3], line_no);
    r.quads.push_back(std::move(q));
  }
  check_spans(r, line_no);
  return r;
}

std::vector<CorpusRecord> read_corpus(std::istream& is) {
  std::vector<CorpusRecord> out;
  std::string line;
  int line_no = 0;
  while (std::getline(is, line)) {
    ++line_no;
    if (line.empty() || line == "\r") continue;
    out.push_back(parse_record(line, line_no));
  }
  return out;
}

std::vector<CorpusRecord> read_corpus(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw ConfigError("cannot read corpus '" + path + "'");
  return read_corpus(is);
}

void write_corpus(std::ostream& os, const std::vector<CorpusRecord>& records) {
  for (const auto& r : records) os << format_record(r) << '\n';
}

ImportResult import_acos_tsv(std::istream& is, Split split, const AcosOptions& opt) {
  ImportResult out;
  std::string line;
  int line_no = 0;
  while (std::getline(is, line)) {
    ++line_no;
    std::string_view view = line;
    if (!view.empty() && view.back() == '\r') view.remove_suffix(1);
    if (view.find_first_not_of(" \t") == std::string_view::npos) continue;
    ++out.lines;
    auto fields = split_on(view, '\t');
    CorpusRecord r;
    r.split = split;
    r.source_line = line_no;
    r.tokens = whitespace_tokens(fields[0]);
    if (r.tokens.empty()) bad_line(line_no, "empty sentence");
    for (std::size_t f = 1; f < fields.size(); ++f) {
      if (fields[f].find_first_not_of(" ") == std::string_view::npos) continue;
      auto parts = whitespace_tokens(fields[f]);
      if (parts.size() != 4) bad_line(line_no, "quad needs 'a_start,a_end CATEGORY code o_start,o_end'");
      auto term = [&](const std::string& s) -> std::optional<Span> {
        if (s == "-1,-1") return std::nullopt;
        return parse_term(s, line_no);
      };
      SentimentQuadruple q;
      q.aspect = term(parts[0]);
      q.category = normalize_category(parts[1]);
      const int code = parse_int(parts[2], line_no);
      if (code < 0 || code > 2) bad_line(line_no, "polarity code must be 0, 1 or 2");
      q.polarity = opt.polarity_codes[static_cast<std::size_t>(code)];
      q.opinion = term(parts[3]);
      r.quads.push_back(std::move(q));
    }
    check_spans(r, line_no);
    auto situation = validate_parseable(to_sentence(r, false));
    if (!situation.parseable()) {
      out.skipped.push_back({line_no, *situation.reason});
      continue;
    }
    out.records.push_back(std::move(r));
  }
  return out;
}

ImportResult import_acos_tsv(const std::string& path, Split split, const AcosOptions& opt) {
  std::ifstream is(path);
  if (!is) throw ConfigError("cannot read '" + path + "'");
  return import_acos_tsv(is, split, opt);
}

Sentence to_sentence(const CorpusRecord& r, bool always_augment) {
  return augment_tokens(r.tokens, r.quads, always_augment);
}

std::vector<std::string> corpus_categories(const std::vector<CorpusRecord>& records) {
  std::set<std::string> cats;
  for (const auto& r : records) {
    for (const auto& q : r.quads) cats.insert(q.category);
  }
  return {cats.begin(), cats.end()};
}

Vocabulary build_vocabulary(const std::vector<CorpusRecord>& records) {
  Vocabulary v;
  for (const auto& r : records) {
    for (const auto& w : to_sentence(r, true).tokens) v.add(w);
  }
  return v;
}

std::vector<TrainExample> make_examples(const std::vector<CorpusRecord>& records, const Grammar& g,
                                        const Vocabulary& vocab) {
  std::vector<TrainExample> out;
  out.reserve(records.size());
  for (const auto& r : records) out.push_back(make_example(to_sentence(r, true), g, vocab));
  return out;
}

RunConfig parse_run_config(const std::string& json_text, const std::string& base_dir) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(json_text);
  } catch (const nlohmann::json::parse_error& e) {
    throw ConfigError(std::string("config is not valid JSON: ") + e.what());
  }
  if (!j.is_object()) throw ConfigError("config must be a JSON object");
  namespace fs = std::filesystem;
  auto resolve = [&](const std::string& p) { return fs::path(p).is_absolute() ? p : (fs::path(base_dir) / p).string(); };
  auto existing = [&](const std::string& key, const std::string& p) {
    auto full = resolve(p);
    if (!fs::exists(full)) throw ConfigError("config key '" + key + "' names a missing file: " + full);
    return full;
  };

  RunConfig c;
  try {
    for (const auto& [key, val] : j.items()) {
      if (key == "categories") {
        c.categories = val.get<std::vector<std::string>>();
      } else if (key == "categories_file") {
        std::ifstream is(existing(key, val.get<std::string>()));
        for (std::string line; std::getline(is, line);) {
          if (!line.empty() && line.back() == '\r') line.pop_back();
          if (!line.empty()) c.categories.push_back(line);
        }
      } else if (key == "families") {
        c.families.clear();
        for (const auto& name : val.get<std::vector<std::string>>()) {
          auto f = family_from_string(name);
          if (!f) throw ConfigError("unknown rule family '" + name + "'");
          if (*f != RuleFamily::Basic) c.families.insert(*f);
        }
      } else if (key == "d") {
        c.d = val.get<int>();
      } else if (key == "hidden") {
        c.hidden = val.get<int>();
      } else if (key == "seed") {
        c.train.seed = val.get<std::uint64_t>();
      } else if (key == "train") {
        if (!val.is_object()) throw ConfigError("'train' must be an object");
        for (const auto& [tk, tv] : val.items()) {
          if (tk == "learning_rate") c.train.learning_rate = tv.get<double>();
          else if (tk == "epochs") c.train.epochs = tv.get<int>();
          else if (tk == "batch_size") c.train.batch_size = tv.get<int>();
          else if (tk == "shuffle") c.train.shuffle = tv.get<bool>();
          else if (tk == "beta1") c.train.beta1 = tv.get<double>();
          else if (tk == "beta2") c.train.beta2 = tv.get<double>();
          else if (tk == "epsilon") c.train.epsilon = tv.get<double>();
          else if (tk == "weight_decay") c.train.weight_decay = tv.get<double>();
          else if (tk == "train_f1") c.train.train_f1 = tv.get<bool>();
          else if (tk == "stop_when_fit") c.train.stop_when_fit = tv.get<bool>();
          else if (tk == "optimizer") {
            auto name = tv.get<std::string>();
            if (name == "sgd") c.train.optimizer = Optimizer::Sgd;
            else if (name == "adam") c.train.optimizer = Optimizer::Adam;
            else throw ConfigError("unknown optimizer '" + name + "'");
          } else {
            throw ConfigError("unknown config key 'train." + tk + "'");
          }
        }
      } else if (key == "acos_polarity_codes") {
        auto names = val.get<std::vector<std::string>>();
        if (names.size() != 3) throw ConfigError("acos_polarity_codes needs three polarities");
        for (std::size_t i = 0; i < 3; ++i) {
          auto p = polarity_from_string(names[i]);
          if (!p) throw ConfigError("unknown polarity '" + names[i] + "'");
          c.acos.polarity_codes[i] = *p;
        }
      } else if (key == "train_path") {
        c.train_path = existing(key, val.get<std::string>());
      } else if (key == "checkpoint_path") {
        c.checkpoint_path = resolve(val.get<std::string>());
      } else if (key == "metrics_path") {
        c.metrics_path = resolve(val.get<std::string>());
      } else {
        throw ConfigError("unknown config key '" + key + "'");
      }
    }
  } catch (const nlohmann::json::type_error& e) {
    throw ConfigError(std::string("config value has the wrong type: ") + e.what());
  }
  if (c.d <= 0 || c.hidden <= 0) throw ConfigError("d and hidden must be positive");
  c.train.validate();
  return c;
}

RunConfig load_run_config(const std::string& path) {
  std::ifstream is(path);
  if (!is) throw ConfigError("cannot read config '" + path + "'");
  std::stringstream ss;
  ss << is.rdbuf();
  return parse_run_config(ss.str(), std::filesystem::path(path).parent_path().string());
}

}  // namespace otp
