#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

namespace emoter {

/// Surface form of the synthetic writer token injected at index 0.
inline constexpr const char* kWriterTokenSurface = "writer";

struct Token {
  std::string surface;
  std::size_t char_start = 0;  // byte offset into the raw text, inclusive
  std::size_t char_end = 0;    // byte offset, exclusive
  bool is_writer_token = false;

  bool operator==(const Token&) const = default;
};

/// Half-open token span [start, end) over a document's token list.
struct Span {
  std::size_t start = 0;
  std::size_t end = 0;

  std::size_t length() const { return end - start; }
  bool operator==(const Span&) const = default;
  auto operator<=>(const Span&) const = default;
};

/// Number of tokens two spans have in common.
inline std::size_t span_overlap(Span a, Span b) {
  const std::size_t lo = std::max(a.start, b.start);
  const std::size_t hi = std::min(a.end, b.end);
  return hi > lo ? hi - lo : 0;
}

inline bool spans_overlap(Span a, Span b) { return span_overlap(a, b) > 0; }

/// A closed, ordered label inventory. Each label has a canonical key
/// (used in files and config) and a display name (used in report tables).
class LabelSet {
 public:
  struct Entry {
    std::string key;
    std::string display;
  };

  LabelSet() = default;
  explicit LabelSet(std::vector<Entry> entries);

  /// Build from canonical keys only; display name equals the key with
  /// underscores replaced by spaces.
  static LabelSet from_keys(const std::vector<std::string>& keys);

  /// The eight emotion labels evaluated by this toolkit.
  static const LabelSet& emotions();
  /// The 22 appraisal dimensions.
  static const LabelSet& appraisals();

  std::size_t size() const { return entries_.size(); }
  const std::string& key(std::size_t i) const { return entries_[i].key; }
  const std::string& display(std::size_t i) const { return entries_[i].display; }
  std::optional<std::size_t> index_of(std::string_view key) const;
  bool contains(std::string_view key) const { return index_of(key).has_value(); }
  std::vector<std::string> keys() const;

 private:
  std::vector<Entry> entries_;
};

/// One experiencer mention: a token span plus its emotion label set and
/// raw appraisal scores (0-5 per dimension). The writer's own perspective
/// is an annotation whose span covers exactly the writer token.
struct ExperiencerAnnotation {
  Span span;
  bool is_writer = false;
  std::set<std::string> emotions;
  std::map<std::string, int> appraisal_scores;

  bool operator==(const ExperiencerAnnotation&) const = default;
};

struct Document {
  std::string id;
  std::string text;
  std::vector<Token> tokens;
  std::vector<ExperiencerAnnotation> annotations;

  bool has_writer_token() const {
    return !tokens.empty() && tokens.front().is_writer_token;
  }
};

struct Corpus {
  std::vector<Document> docs;

  std::size_t size() const { return docs.size(); }
  bool empty() const { return docs.empty(); }
};

struct SplitSpec {
  std::size_t train_count = 0;
  std::size_t dev_count = 0;
  std::size_t test_count = 0;
  std::uint64_t seed = 0;
};

/// Rule-based tokenizer: whitespace-separated chunks, with leading and
/// trailing ASCII punctuation peeled off into single-character tokens.
/// Offsets are byte offsets into `text`. Deterministic; no writer token.
std::vector<Token> tokenize(const std::string& text);

/// Prepend the synthetic writer token and shift every annotation span by +1.
/// Annotations flagged is_writer are rewritten to span [0,1).
/// Throws DataError if the document already contains a writer token.
Document inject_writer_token(const Document& doc);

/// Full invariant check for a post-injection document: token order and
/// offsets, span bounds, pairwise non-overlap, at most one writer
/// annotation, is_writer <=> span covers exactly the writer token, labels
/// drawn from the given sets, appraisal scores in [0,5].
/// Throws DataError naming the document id on the first violation.
void validate_document(const Document& doc, const LabelSet& emotions,
                       const LabelSet& appraisals);

/// True when two annotation spans of the same document overlap. Used to
/// decide quarantine at load time.
bool has_overlapping_annotations(const Document& doc);

struct SplitResult {
  Corpus train;
  Corpus dev;
  Corpus test;
};

/// Deterministic shuffle (Fisher-Yates over mt19937_64 draws, so the
/// partition is identical across platforms), then cut into the three
/// requested sizes. Throws DataError when the counts exceed the corpus.
SplitResult split_corpus(const Corpus& corpus, const SplitSpec& spec);

/// Appraisal labels whose score is >= threshold. The boundary score counts
/// as positive. Throws DataError for thresholds outside [0,5].
std::set<std::string> discretize_appraisals(const ExperiencerAnnotation& ann,
                                            int threshold);

}  // namespace emoter
