#pragma once

#include <cstdint>
#include <set>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "emoter/corpus.hpp"

namespace emoter {

/// Reserved marker tokens inserted around the target span. The tokenizer
/// never produces them.
inline constexpr const char* kOpenIndicator = "⟨e⟩";     // ⟨e⟩
inline constexpr const char* kCloseIndicator = "⟨/e⟩";   // ⟨/e⟩

/// A document's token surfaces with positional indicators around the
/// target span.
struct EncodedInstance {
  std::vector<std::string> tokens;
  bool target_is_writer = false;
};

/// Insert the indicator pair around `span`. With include_writer_prefix set
/// to false, the writer token is dropped from the encoding of non-writer
/// targets. Throws DataError on an invalid span.
EncodedInstance encode_with_indicators(const Document& doc, Span span,
                                       bool include_writer_prefix = true);

/// Hashed features with multiplicities: token unigrams and bigrams,
/// tokens inside the indicators with an inside flag, tokens within
/// distance <= 5 of an indicator with a distance bucket, and the
/// target-is-writer flag.
using SparseFeatures = std::vector<std::pair<std::uint32_t, double>>;
SparseFeatures classifier_features(const EncodedInstance& instance);

using SparseWeights = std::unordered_map<std::uint32_t, double>;

double linear_score(const SparseFeatures& features, const SparseWeights& weights,
                    double bias);
double sigmoid(double z);
/// Binary cross-entropy of sigmoid(score) against the gold flag.
double bce_loss(double score, bool positive);
/// d bce_loss / d score == sigmoid(score) - positive. The per-weight
/// gradient is this value times the feature count.
double bce_score_gradient(double score, bool positive);

/// One-vs-rest logistic heads over a shared feature space. Models from
/// train_multilabel or load_multilabel are finalized.
struct MultiLabelModel {
  std::vector<std::string> labels;
  int feature_space_bits = 0;
  double decision_threshold = 0.5;
  std::uint64_t seed = 0;
  int epoch_count = 0;
  std::vector<double> bias;            // per label
  std::vector<SparseWeights> weights;  // per label
};

struct LabeledInstance {
  EncodedInstance instance;
  std::set<std::string> gold;
};

struct MultiLabelTrainOptions {
  int max_epochs = 50;
  int patience = 5;
  double learning_rate = 0.1;
  double decision_threshold = 0.5;
  std::uint64_t seed = 0;
};

/// Stochastic gradient steps on the per-label logistic losses, instances
/// shuffled per epoch by seed; early stopping when dev micro-F1 fails to
/// improve for `patience` consecutive epochs (no early stopping when dev
/// is empty). Throws DataError on an empty training set or a gold label
/// outside `label_set`.
MultiLabelModel train_multilabel(const std::vector<LabeledInstance>& train,
                                 const std::vector<LabeledInstance>& dev,
                                 const LabelSet& label_set,
                                 const MultiLabelTrainOptions& options);

/// Every label whose sigmoid score is >= the decision threshold; the
/// empty set is a legal output.
std::set<std::string> predict_labels(const MultiLabelModel& model,
                                     const EncodedInstance& instance);

/// Persistence mirrors the tagger format plus the ordered label list.
std::string multilabel_to_string(const MultiLabelModel& model);
void save_multilabel(const MultiLabelModel& model, const std::string& path);
MultiLabelModel load_multilabel(const std::string& path);

}  // namespace emoter
