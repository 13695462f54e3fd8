// Corpus records: the canonical line format, ACOS-style TSV import and run
// configuration files.

#ifndef OTP_CORPUS_HPP
#define OTP_CORPUS_HPP

#include <array>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "otp/trainer.hpp"
#include "otp/tree_builder.hpp"

namespace otp {

enum class Split { Train, Validation, Test };

std::string_view to_string(Split s);
/// Accepts "train", "validation" and "dev".
std::optional<Split> split_from_string(std::string_view s);

struct CorpusRecord {
  std::vector<std::string> tokens;
  std::vector<SentimentQuadruple> quads;
  Split split = Split::Train;
  int source_line = 0;

  bool operator==(const CorpusRecord&) const = default;
};

/// split TAB source_line TAB tokens TAB quad ... where a quad is
/// "aspect;CATEGORY;polarity;opinion" and a term is "i,j" or "-".
std::string format_record(const CorpusRecord& r);
/// Throws FormatError naming `line_no` for malformed lines or bad spans.
CorpusRecord parse_record(std::string_view line, int line_no);

std::vector<CorpusRecord> read_corpus(std::istream& is);
std::vector<CorpusRecord> read_corpus(const std::string& path);
void write_corpus(std::ostream& os, const std::vector<CorpusRecord>& records);

struct SkipRecord {
  int source_line = 0;
  UnparseableReason reason = UnparseableReason::CrossingQuads;
};

struct ImportResult {
  std::vector<CorpusRecord> records;
  std::vector<SkipRecord> skipped;
  std::size_t lines = 0;  // non-blank input lines

  double skip_rate() const { return lines == 0 ? 0.0 : static_cast<double>(skipped.size()) / static_cast<double>(lines); }
};

struct AcosOptions {
  /// Polarity for codes 0, 1, 2.
  std::array<Polarity, 3> polarity_codes = {Polarity::Negative, Polarity::Neutral, Polarity::Positive};
};

/// "tokens TAB quad TAB quad ..." with quads "as,ae CATEGORY code os,oe"
/// and "-1,-1" for implicit terms. Unparseable sentences go to the skip
/// report; malformed lines throw FormatError with the line number.
ImportResult import_acos_tsv(std::istream& is, Split split, const AcosOptions& opt = {});
ImportResult import_acos_tsv(const std::string& path, Split split, const AcosOptions& opt = {});

/// Token/quad pair for the tree builder, augmented when `always` is set or a
/// quad is fully implicit.
Sentence to_sentence(const CorpusRecord& r, bool always_augment);

/// Sorted distinct categories of a corpus.
std::vector<std::string> corpus_categories(const std::vector<CorpusRecord>& records);

/// Vocabulary over the augmented tokens of `records`, in first-seen order.
Vocabulary build_vocabulary(const std::vector<CorpusRecord>& records);

/// Always-augmented training examples.
std::vector<TrainExample> make_examples(const std::vector<CorpusRecord>& records, const Grammar& g,
                                        const Vocabulary& vocab);

struct RunConfig {
  std::vector<std::string> categories;  // empty: taken from the training corpus
  std::set<RuleFamily> families = all_families();
  int d = 64;
  int hidden = 128;
  TrainConfig train;
  AcosOptions acos;
  std::optional<std::string> train_path;
  std::optional<std::string> checkpoint_path;
  std::optional<std::string> metrics_path;
};

/// JSON config (keys in docs/formats.md). Unknown keys, wrong types and
/// missing referenced files raise ConfigError.
RunConfig parse_run_config(const std::string& json_text, const std::string& base_dir = ".");
RunConfig load_run_config(const std::string& path);

}  // namespace otp

#endif  // OTP_CORPUS_HPP
