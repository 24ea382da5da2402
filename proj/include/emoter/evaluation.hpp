#pragma once

#include <cstddef>
#include <optional>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "emoter/corpus.hpp"

namespace emoter {

enum class MatchMode { strict, relaxed };

/// One-to-one correspondence between gold and predicted spans of one
/// document. Pairs hold indices into the gold/pred input lists.
struct SpanMatching {
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  std::vector<std::size_t> unmatched_gold;
  std::vector<std::size_t> unmatched_pred;
};

/// Match gold against predicted spans.
/// strict: pair iff boundaries are identical.
/// relaxed: candidate pairs (>=1 token overlap) sorted by descending
/// overlap, ties by earlier gold start then earlier pred start, taken
/// greedily one-to-one. Throws DataError when either side overlaps
/// internally.
SpanMatching match_spans(const std::vector<Span>& gold,
                         const std::vector<Span>& pred, MatchMode mode);

struct Prf {
  double precision = 0.0;
  double recall = 0.0;
  double f1 = 0.0;
};

/// Zero-denominator convention: P, R and F1 fall back to 0, never NaN.
Prf compute_prf(long long tp, long long fp, long long fn);
double harmonic_f1(double precision, double recall);

/// True when `span` is the writer-token span [0,1) of this document.
bool is_writer_span(const Document& doc, Span span);

/// Span-level P/R/F1 over a corpus. `preds` is indexed parallel to
/// corpus.docs. With include_writer=false, writer spans are removed from
/// both sides before matching.
Prf span_prf(const Corpus& corpus, const std::vector<std::vector<Span>>& preds,
             MatchMode mode, bool include_writer);

struct LabelConfusion {
  long long tp = 0;
  long long fp = 0;
  long long fn = 0;
  long long fn_due_to_missing_span = 0;
};

/// A span together with the label set attached to it; the per-document
/// view both label evaluations consume.
struct LabeledSpan {
  Span span;
  std::set<std::string> labels;
};
using DocLabeledSpans = std::vector<LabeledSpan>;

/// Pipeline-aware label evaluation. Spans are matched in relaxed mode.
/// Matched pairs contribute per-label TP/FP/FN by set comparison; every
/// label on an unmatched predicted span is a false positive; every label
/// on an unmatched gold span is a false negative and counts toward
/// fn_due_to_missing_span. Returns one confusion per label in
/// `label_order`. Labels outside the order are a DataError.
std::vector<LabelConfusion> pipeline_label_eval(
    const std::vector<DocLabeledSpans>& gold,
    const std::vector<DocLabeledSpans>& pred,
    const std::vector<std::string>& label_order);

/// Label evaluation on gold spans: every prediction must sit exactly on a
/// gold span of its document (DataError otherwise; at most one prediction
/// per span). Gold spans without a prediction count as empty predictions.
/// fn_due_to_missing_span stays 0.
std::vector<LabelConfusion> gold_span_label_eval(
    const std::vector<DocLabeledSpans>& gold,
    const std::vector<DocLabeledSpans>& pred_on_gold,
    const std::vector<std::string>& label_order);

struct Aggregate {
  std::vector<Prf> per_label;
  Prf macro;  // unweighted mean P and R over the full label set; F1 harmonic
  Prf micro;  // from summed counts; F1 harmonic
};

Aggregate aggregate(const std::vector<LabelConfusion>& confusions);

struct FnAttributionRow {
  long long fn_total = 0;
  long long fn_missing = 0;
  double ratio = 0.0;  // fn_missing / fn_total, 0 when fn_total == 0
};

std::vector<FnAttributionRow> fn_attribution_table(
    const std::vector<LabelConfusion>& confusions);

enum class LabelFamily { emotion, appraisal };

struct FrequencyRow {
  long long writer = 0;
  long long non_writer = 0;
  double writer_ratio = 0.0;
  double non_writer_ratio = 0.0;
};

/// How often each label occurs on writer vs non-writer gold spans.
/// Appraisal occurrence means score >= appraisal_threshold.
std::vector<FrequencyRow> span_label_frequency(const Corpus& corpus,
                                               const std::vector<std::string>& label_order,
                                               LabelFamily family,
                                               int appraisal_threshold);

/// Span metrics for every MatchMode x writer-inclusion combination
/// (the four cells of the span-prediction table).
struct SpanSection {
  Prf strict_incl;
  Prf relaxed_incl;
  Prf strict_excl;
  Prf relaxed_excl;
};

/// Per-family label results for the gold-spans and/or pipeline settings.
struct LabelSection {
  std::vector<std::string> label_keys;
  std::optional<Aggregate> gold;
  std::optional<Aggregate> pipeline;
  std::vector<LabelConfusion> gold_confusions;
  std::vector<LabelConfusion> pipeline_confusions;
};

/// Everything a report emission needs, computed once and immutable.
struct EvaluationReport {
  std::optional<SpanSection> spans;
  LabelSection emotions;
  LabelSection appraisals;
  std::vector<FrequencyRow> emotion_frequency;
  std::vector<FrequencyRow> appraisal_frequency;
  int appraisal_threshold = 4;

  // Provenance, filled by the CLI when the inputs come from files.
  std::string corpus_checksum;
  std::string config_hash;
  std::string models_hash;
};

}  // namespace emoter
