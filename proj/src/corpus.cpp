#include "emoter/corpus.hpp"

#include <algorithm>
#include <cctype>
#include <numeric>
#include <random>

#include "emoter/errors.hpp"

namespace emoter {

LabelSet::LabelSet(std::vector<Entry> entries) : entries_(std::move(entries)) {}

LabelSet LabelSet::from_keys(const std::vector<std::string>& keys) {
  std::vector<Entry> entries;
  entries.reserve(keys.size());
  for (const auto& k : keys) {
    std::string display = k;
    std::replace(display.begin(), display.end(), '_', ' ');
    entries.push_back({k, display});
  }
  return LabelSet(std::move(entries));
}

const LabelSet& LabelSet::emotions() {
  static const LabelSet set({
      {"anger", "anger"},
      {"disgust", "disgust"},
      {"fear", "fear"},
      {"joy", "joy"},
      {"no_emotion", "no emotion"},
      {"other", "other"},
      {"sadness", "sadness"},
      {"shame", "shame"},
  });
  return set;
}

const LabelSet& LabelSet::appraisals() {
  static const LabelSet set({
      {"suddenness", "suddenness"},
      {"familiarity", "familiarity"},
      {"pleasantness", "pleasantness"},
      {"understand", "understand"},
      {"goal_relevance", "goal relev."},
      {"self_responsibility", "self resp."},
      {"other_responsibility", "other resp."},
      {"situational_responsibility", "sit. resp."},
      {"effort", "effort"},
      {"exert", "exert"},
      {"attend", "attend"},
      {"consider", "consider"},
      {"outcome_probability", "outcome prob."},
      {"expectation_discrepancy", "expect. discrep."},
      {"goal_conduciveness", "goal conduc."},
      {"urgency", "urgency"},
      {"self_control", "self control"},
      {"other_control", "other control"},
      {"situational_control", "sit. control"},
      {"adjustment_check", "adj. check"},
      {"internal_check", "int. check"},
      {"external_check", "ext. check"},
  });
  return set;
}

std::optional<std::size_t> LabelSet::index_of(std::string_view key) const {
  for (std::size_t i = 0; i < entries_.size(); ++i) {
    if (entries_[i].key == key) return i;
  }
  return std::nullopt;
}

std::vector<std::string> LabelSet::keys() const {
  std::vector<std::string> out;
  out.reserve(entries_.size());
  for (const auto& e : entries_) out.push_back(e.key);
  return out;
}

namespace {

bool is_ascii_punct(char c) {
  return std::ispunct(static_cast<unsigned char>(c)) != 0;
}

bool is_space(char c) { return std::isspace(static_cast<unsigned char>(c)) != 0; }

}  // namespace

std::vector<Token> tokenize(const std::string& text) {
  std::vector<Token> tokens;
  std::size_t i = 0;
  const std::size_t n = text.size();
  while (i < n) {
    while (i < n && is_space(text[i])) ++i;
    if (i >= n) break;
    std::size_t j = i;
    while (j < n && !is_space(text[j])) ++j;
    // Chunk [i, j). Peel leading and trailing punctuation one char at a time.
    std::size_t lo = i, hi = j;
    while (lo < hi && is_ascii_punct(text[lo])) {
      tokens.push_back({text.substr(lo, 1), lo, lo + 1, false});
      ++lo;
    }
    std::vector<Token> trailing;
    while (hi > lo && is_ascii_punct(text[hi - 1])) {
      trailing.push_back({text.substr(hi - 1, 1), hi - 1, hi, false});
      --hi;
    }
    if (hi > lo) tokens.push_back({text.substr(lo, hi - lo), lo, hi, false});
    tokens.insert(tokens.end(), trailing.rbegin(), trailing.rend());
    i = j;
  }
  return tokens;
}

Document inject_writer_token(const Document& doc) {
  if (doc.has_writer_token()) {
    throw DataError("document '" + doc.id + "' already contains a writer token");
  }
  Document out;
  out.id = doc.id;
  out.text = doc.text;
  out.tokens.reserve(doc.tokens.size() + 1);
  out.tokens.push_back({kWriterTokenSurface, 0, 0, true});
  out.tokens.insert(out.tokens.end(), doc.tokens.begin(), doc.tokens.end());
  out.annotations.reserve(doc.annotations.size());
  for (const auto& ann : doc.annotations) {
    ExperiencerAnnotation shifted = ann;
    if (ann.is_writer) {
      shifted.span = Span{0, 1};
    } else {
      shifted.span = Span{ann.span.start + 1, ann.span.end + 1};
    }
    out.annotations.push_back(std::move(shifted));
  }
  return out;
}

bool has_overlapping_annotations(const Document& doc) {
  for (std::size_t a = 0; a < doc.annotations.size(); ++a) {
    for (std::size_t b = a + 1; b < doc.annotations.size(); ++b) {
      if (spans_overlap(doc.annotations[a].span, doc.annotations[b].span)) {
        return true;
      }
    }
  }
  return false;
}

void validate_document(const Document& doc, const LabelSet& emotions,
                       const LabelSet& appraisals) {
  auto fail = [&doc](const std::string& what) {
    throw DataError("document '" + doc.id + "': " + what);
  };

  for (std::size_t i = 0; i < doc.tokens.size(); ++i) {
    const Token& t = doc.tokens[i];
    if (t.is_writer_token) {
      if (i != 0) fail("writer token not at index 0");
      if (t.char_start != 0 || t.char_end != 0) fail("writer token with offsets");
    } else {
      if (t.char_start >= t.char_end) fail("token with empty offsets");
      if (i > 0 && !doc.tokens[i - 1].is_writer_token &&
          doc.tokens[i - 1].char_end > t.char_start) {
        fail("tokens out of order or overlapping");
      }
    }
  }

  std::size_t writer_count = 0;
  for (const auto& ann : doc.annotations) {
    if (ann.span.start >= ann.span.end) fail("empty annotation span");
    if (ann.span.end > doc.tokens.size()) fail("span end beyond token count");
    const bool covers_writer =
        doc.has_writer_token() && ann.span == Span{0, 1};
    if (ann.is_writer != covers_writer) {
      fail("is_writer flag inconsistent with span");
    }
    if (doc.has_writer_token() && ann.span.start == 0 && ann.span.end > 1) {
      fail("span covers the writer token and more");
    }
    if (ann.is_writer) ++writer_count;
    for (const auto& e : ann.emotions) {
      if (!emotions.contains(e)) fail("unknown emotion label '" + e + "'");
    }
    for (const auto& [dim, score] : ann.appraisal_scores) {
      if (!appraisals.contains(dim)) fail("unknown appraisal '" + dim + "'");
      if (score < 0 || score > 5) fail("appraisal score out of range");
    }
  }
  if (writer_count > 1) fail("more than one writer annotation");
  if (has_overlapping_annotations(doc)) fail("overlapping annotation spans");
}

SplitResult split_corpus(const Corpus& corpus, const SplitSpec& spec) {
  const std::size_t total = spec.train_count + spec.dev_count + spec.test_count;
  if (total > corpus.size()) {
    throw DataError("split counts (" + std::to_string(total) +
                    ") exceed corpus size (" + std::to_string(corpus.size()) + ")");
  }
  std::vector<std::size_t> order(corpus.size());
  std::iota(order.begin(), order.end(), 0);
  // Hand-rolled Fisher-Yates; std::shuffle's draw sequence is
  // implementation-defined and would break cross-platform determinism.
  std::mt19937_64 rng(spec.seed);
  for (std::size_t i = order.size(); i > 1; --i) {
    const std::size_t j = static_cast<std::size_t>(rng() % i);
    std::swap(order[i - 1], order[j]);
  }
  SplitResult result;
  std::size_t pos = 0;
  auto take = [&](std::size_t count) {
    Corpus part;
    part.docs.reserve(count);
    for (std::size_t k = 0; k < count; ++k) {
      part.docs.push_back(corpus.docs[order[pos++]]);
    }
    return part;
  };
  result.train = take(spec.train_count);
  result.dev = take(spec.dev_count);
  result.test = take(spec.test_count);
  return result;
}

std::set<std::string> discretize_appraisals(const ExperiencerAnnotation& ann,
                                            int threshold) {
  if (threshold < 0 || threshold > 5) {
    throw DataError("appraisal threshold must be in [0,5], got " +
                    std::to_string(threshold));
  }
  std::set<std::string> out;
  for (const auto& [dim, score] : ann.appraisal_scores) {
    if (score >= threshold) out.insert(dim);
  }
  return out;
}

}  // namespace emoter
