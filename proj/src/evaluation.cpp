#include "emoter/evaluation.hpp"

#include <algorithm>
#include <map>

#include "emoter/errors.hpp"

namespace emoter {

namespace {

void check_no_internal_overlap(const std::vector<Span>& spans, const char* side) {
  for (std::size_t a = 0; a < spans.size(); ++a) {
    if (spans[a].start >= spans[a].end) {
      throw DataError(std::string(side) + " contains an empty span");
    }
    for (std::size_t b = a + 1; b < spans.size(); ++b) {
      if (spans_overlap(spans[a], spans[b])) {
        throw DataError(std::string(side) + " spans overlap internally");
      }
    }
  }
}

}  // namespace

SpanMatching match_spans(const std::vector<Span>& gold,
                         const std::vector<Span>& pred, MatchMode mode) {
  check_no_internal_overlap(gold, "gold");
  check_no_internal_overlap(pred, "pred");

  SpanMatching out;
  std::vector<bool> gold_used(gold.size(), false);
  std::vector<bool> pred_used(pred.size(), false);

  if (mode == MatchMode::strict) {
    for (std::size_t g = 0; g < gold.size(); ++g) {
      for (std::size_t p = 0; p < pred.size(); ++p) {
        if (!pred_used[p] && gold[g] == pred[p]) {
          out.pairs.emplace_back(g, p);
          gold_used[g] = true;
          pred_used[p] = true;
          break;
        }
      }
    }
  } else {
    struct Candidate {
      std::size_t overlap;
      std::size_t g, p;
    };
    std::vector<Candidate> candidates;
    for (std::size_t g = 0; g < gold.size(); ++g) {
      for (std::size_t p = 0; p < pred.size(); ++p) {
        const std::size_t ov = span_overlap(gold[g], pred[p]);
        if (ov > 0) candidates.push_back({ov, g, p});
      }
    }
    std::sort(candidates.begin(), candidates.end(),
              [&](const Candidate& a, const Candidate& b) {
                if (a.overlap != b.overlap) return a.overlap > b.overlap;
                if (gold[a.g].start != gold[b.g].start) {
                  return gold[a.g].start < gold[b.g].start;
                }
                return pred[a.p].start < pred[b.p].start;
              });
    for (const auto& c : candidates) {
      if (gold_used[c.g] || pred_used[c.p]) continue;
      out.pairs.emplace_back(c.g, c.p);
      gold_used[c.g] = true;
      pred_used[c.p] = true;
    }
  }

  for (std::size_t g = 0; g < gold.size(); ++g) {
    if (!gold_used[g]) out.unmatched_gold.push_back(g);
  }
  for (std::size_t p = 0; p < pred.size(); ++p) {
    if (!pred_used[p]) out.unmatched_pred.push_back(p);
  }
  return out;
}

double harmonic_f1(double precision, double recall) {
  const double denom = precision + recall;
  return denom > 0.0 ? 2.0 * precision * recall / denom : 0.0;
}

Prf compute_prf(long long tp, long long fp, long long fn) {
  Prf out;
  out.precision = (tp + fp) > 0 ? static_cast<double>(tp) / static_cast<double>(tp + fp) : 0.0;
  out.recall = (tp + fn) > 0 ? static_cast<double>(tp) / static_cast<double>(tp + fn) : 0.0;
  out.f1 = harmonic_f1(out.precision, out.recall);
  return out;
}

bool is_writer_span(const Document& doc, Span span) {
  return doc.has_writer_token() && span == Span{0, 1};
}

Prf span_prf(const Corpus& corpus, const std::vector<std::vector<Span>>& preds,
             MatchMode mode, bool include_writer) {
  if (preds.size() != corpus.size()) {
    throw DataError("span_prf: prediction list size does not match corpus");
  }
  long long tp = 0, fp = 0, fn = 0;
  for (std::size_t d = 0; d < corpus.size(); ++d) {
    const Document& doc = corpus.docs[d];
    std::vector<Span> gold;
    for (const auto& ann : doc.annotations) {
      if (!include_writer && ann.is_writer) continue;
      gold.push_back(ann.span);
    }
    std::vector<Span> pred;
    for (const auto& s : preds[d]) {
      if (!include_writer && is_writer_span(doc, s)) continue;
      pred.push_back(s);
    }
    const SpanMatching m = match_spans(gold, pred, mode);
    tp += static_cast<long long>(m.pairs.size());
    fn += static_cast<long long>(m.unmatched_gold.size());
    fp += static_cast<long long>(m.unmatched_pred.size());
  }
  return compute_prf(tp, fp, fn);
}

namespace {

std::size_t label_index(const std::map<std::string, std::size_t>& index,
                        const std::string& label) {
  auto it = index.find(label);
  if (it == index.end()) {
    throw DataError("label '" + label + "' is outside the evaluated label set");
  }
  return it->second;
}

std::map<std::string, std::size_t> build_index(
    const std::vector<std::string>& label_order) {
  std::map<std::string, std::size_t> index;
  for (std::size_t i = 0; i < label_order.size(); ++i) index[label_order[i]] = i;
  return index;
}

std::vector<Span> spans_of(const DocLabeledSpans& items) {
  std::vector<Span> spans;
  spans.reserve(items.size());
  for (const auto& it : items) spans.push_back(it.span);
  return spans;
}

void count_set_comparison(const std::set<std::string>& gold_labels,
                          const std::set<std::string>& pred_labels,
                          const std::map<std::string, std::size_t>& index,
                          std::vector<LabelConfusion>& confusions) {
  for (const auto& l : gold_labels) {
    const std::size_t i = label_index(index, l);
    if (pred_labels.count(l)) {
      ++confusions[i].tp;
    } else {
      ++confusions[i].fn;
    }
  }
  for (const auto& l : pred_labels) {
    const std::size_t i = label_index(index, l);
    if (!gold_labels.count(l)) ++confusions[i].fp;
  }
}

}  // namespace

std::vector<LabelConfusion> pipeline_label_eval(
    const std::vector<DocLabeledSpans>& gold,
    const std::vector<DocLabeledSpans>& pred,
    const std::vector<std::string>& label_order) {
  if (gold.size() != pred.size()) {
    throw DataError("pipeline_label_eval: gold/pred document counts differ");
  }
  const auto index = build_index(label_order);
  std::vector<LabelConfusion> confusions(label_order.size());

  for (std::size_t d = 0; d < gold.size(); ++d) {
    // The pipeline accepts any overlapping span as a correspondence.
    const SpanMatching m =
        match_spans(spans_of(gold[d]), spans_of(pred[d]), MatchMode::relaxed);
    for (const auto& [g, p] : m.pairs) {
      count_set_comparison(gold[d][g].labels, pred[d][p].labels, index, confusions);
    }
    for (std::size_t p : m.unmatched_pred) {
      for (const auto& l : pred[d][p].labels) {
        ++confusions[label_index(index, l)].fp;
      }
    }
    for (std::size_t g : m.unmatched_gold) {
      for (const auto& l : gold[d][g].labels) {
        const std::size_t i = label_index(index, l);
        ++confusions[i].fn;
        ++confusions[i].fn_due_to_missing_span;
      }
    }
  }
  return confusions;
}

std::vector<LabelConfusion> gold_span_label_eval(
    const std::vector<DocLabeledSpans>& gold,
    const std::vector<DocLabeledSpans>& pred_on_gold,
    const std::vector<std::string>& label_order) {
  if (gold.size() != pred_on_gold.size()) {
    throw DataError("gold_span_label_eval: gold/pred document counts differ");
  }
  const auto index = build_index(label_order);
  std::vector<LabelConfusion> confusions(label_order.size());

  for (std::size_t d = 0; d < gold.size(); ++d) {
    std::map<Span, const std::set<std::string>*> predictions;
    for (const auto& item : pred_on_gold[d]) {
      const bool on_gold =
          std::any_of(gold[d].begin(), gold[d].end(),
                      [&](const LabeledSpan& g) { return g.span == item.span; });
      if (!on_gold) {
        throw DataError("gold_span_label_eval: prediction references a non-gold span [" +
                        std::to_string(item.span.start) + "," +
                        std::to_string(item.span.end) + ")");
      }
      if (!predictions.emplace(item.span, &item.labels).second) {
        throw DataError("gold_span_label_eval: duplicate prediction for one span");
      }
    }
    static const std::set<std::string> kEmpty;
    for (const auto& g : gold[d]) {
      auto it = predictions.find(g.span);
      const std::set<std::string>& pred_labels =
          it != predictions.end() ? *it->second : kEmpty;
      count_set_comparison(g.labels, pred_labels, index, confusions);
    }
  }
  return confusions;
}

Aggregate aggregate(const std::vector<LabelConfusion>& confusions) {
  Aggregate out;
  out.per_label.reserve(confusions.size());
  long long tp = 0, fp = 0, fn = 0;
  double p_sum = 0.0, r_sum = 0.0;
  for (const auto& c : confusions) {
    const Prf prf = compute_prf(c.tp, c.fp, c.fn);
    out.per_label.push_back(prf);
    p_sum += prf.precision;
    r_sum += prf.recall;
    tp += c.tp;
    fp += c.fp;
    fn += c.fn;
  }
  if (!confusions.empty()) {
    out.macro.precision = p_sum / static_cast<double>(confusions.size());
    out.macro.recall = r_sum / static_cast<double>(confusions.size());
    out.macro.f1 = harmonic_f1(out.macro.precision, out.macro.recall);
  }
  out.micro = compute_prf(tp, fp, fn);
  return out;
}

std::vector<FnAttributionRow> fn_attribution_table(
    const std::vector<LabelConfusion>& confusions) {
  std::vector<FnAttributionRow> rows;
  rows.reserve(confusions.size());
  for (const auto& c : confusions) {
    FnAttributionRow row;
    row.fn_total = c.fn;
    row.fn_missing = c.fn_due_to_missing_span;
    row.ratio = c.fn > 0 ? static_cast<double>(c.fn_due_to_missing_span) /
                               static_cast<double>(c.fn)
                         : 0.0;
    rows.push_back(row);
  }
  return rows;
}

std::vector<FrequencyRow> span_label_frequency(
    const Corpus& corpus, const std::vector<std::string>& label_order,
    LabelFamily family, int appraisal_threshold) {
  const auto index = build_index(label_order);
  std::vector<FrequencyRow> rows(label_order.size());
  for (const auto& doc : corpus.docs) {
    for (const auto& ann : doc.annotations) {
      const std::set<std::string> labels =
          family == LabelFamily::emotion
              ? ann.emotions
              : discretize_appraisals(ann, appraisal_threshold);
      for (const auto& l : labels) {
        FrequencyRow& row = rows[label_index(index, l)];
        if (ann.is_writer) {
          ++row.writer;
        } else {
          ++row.non_writer;
        }
      }
    }
  }
  for (auto& row : rows) {
    const long long total = row.writer + row.non_writer;
    if (total > 0) {
      row.writer_ratio = static_cast<double>(row.writer) / static_cast<double>(total);
      row.non_writer_ratio =
          static_cast<double>(row.non_writer) / static_cast<double>(total);
    }
  }
  return rows;
}

}  // namespace emoter
