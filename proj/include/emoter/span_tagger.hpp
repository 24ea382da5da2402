#pragma once

#include <array>
#include <cstdint>
#include <string>
#include <unordered_map>
#include <vector>

#include "emoter/corpus.hpp"

namespace emoter {

/// BILOU tags over the single entity class "experiencer".
enum class BilouTag : std::uint8_t { B = 0, I = 1, L = 2, O = 3, U = 4 };
inline constexpr std::size_t kNumBilouTags = 5;
inline constexpr std::array<char, kNumBilouTags> kBilouLetters = {'B', 'I', 'L',
                                                                  'O', 'U'};

/// Encode non-overlapping spans as a BILOU sequence: single-token spans
/// become U, longer spans B I* L, everything else O. Throws DataError on
/// overlapping or out-of-range spans.
std::vector<BilouTag> spans_to_tags(const std::vector<Span>& spans,
                                    std::size_t length);

/// Decode a tag sequence to non-overlapping spans. Total over all
/// sequences via the repair rules: an I with no open span acts as B
/// (covers leading I and I-after-O); an open B..I run interrupted by
/// O/U/B/end is demoted to a unit span at the B; an L with no open span
/// acts as U.
std::vector<Span> tags_to_spans(const std::vector<BilouTag>& tags);

/// Hashed feature ids for one decoding step. Deterministic in
/// (tokens, position, history). Out-of-window positions use boundary
/// sentinels. `prev1`/`prev2` are the history symbols of the tags
/// predicted at position-1 and position-2 (see history_symbol).
std::vector<std::uint32_t> extract_features(const std::vector<Token>& tokens,
                                            std::size_t position,
                                            const std::string& prev1,
                                            const std::string& prev2);

/// History string for the tag predicted `back` positions earlier, or the
/// boundary sentinel when that runs off the start of the document.
std::string history_symbol(const std::vector<BilouTag>& tags, std::size_t position,
                           std::size_t back);

/// Averaged-perceptron tagger. Models returned by train_tagger or
/// load_tagger are finalized: `weights` holds the averaged weights and is
/// all prediction ever touches.
struct TaggerModel {
  int feature_space_bits = 0;
  std::uint64_t seed = 0;
  int epoch_count = 0;
  std::unordered_map<std::uint32_t, std::array<double, kNumBilouTags>> weights;
};

struct TaggerTrainOptions {
  int max_epochs = 50;
  int patience = 5;
  std::uint64_t seed = 0;
};

/// Greedy per-token averaged perceptron over gold BILOU tags; per-epoch
/// shuffling by seed; early stopping when dev relaxed F1 (excl. writer)
/// fails to improve for `patience` consecutive epochs. Returns the
/// averaged model of the best dev epoch (the final epoch when dev is
/// empty). Throws DataError on an empty training corpus or max_epochs < 1.
TaggerModel train_tagger(const Corpus& train, const Corpus& dev,
                         const TaggerTrainOptions& options);

/// Greedy decode with the averaged weights. Tokens flagged is_writer_token
/// are always tagged U by rule, so the writer span is always emitted.
std::vector<BilouTag> predict_tags(const TaggerModel& model,
                                   const std::vector<Token>& tokens);
std::vector<Span> predict_spans(const TaggerModel& model, const Document& doc);

/// Versioned JSON persistence of the non-zero averaged weights.
/// load_tagger rejects files with a mismatched format, version or
/// feature-space width.
std::string tagger_to_string(const TaggerModel& model);
void save_tagger(const TaggerModel& model, const std::string& path);
TaggerModel load_tagger(const std::string& path);

}  // namespace emoter
