#include "emoter/span_tagger.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <numeric>
#include <random>
#include <sstream>

#include <json.hpp>

#include "emoter/errors.hpp"
#include "emoter/evaluation.hpp"
#include "emoter/hashing.hpp"

namespace emoter {

std::vector<BilouTag> spans_to_tags(const std::vector<Span>& spans,
                                    std::size_t length) {
  std::vector<BilouTag> tags(length, BilouTag::O);
  for (const auto& span : spans) {
    if (span.start >= span.end || span.end > length) {
      throw DataError("spans_to_tags: span out of range");
    }
    for (std::size_t i = span.start; i < span.end; ++i) {
      if (tags[i] != BilouTag::O) throw DataError("spans_to_tags: overlapping spans");
    }
    if (span.length() == 1) {
      tags[span.start] = BilouTag::U;
    } else {
      tags[span.start] = BilouTag::B;
      for (std::size_t i = span.start + 1; i + 1 < span.end; ++i) {
        tags[i] = BilouTag::I;
      }
      tags[span.end - 1] = BilouTag::L;
    }
  }
  return tags;
}

std::vector<Span> tags_to_spans(const std::vector<BilouTag>& tags) {
  std::vector<Span> spans;
  bool open = false;
  std::size_t open_start = 0;
  auto close_dangling = [&]() {
    if (open) {
      spans.push_back({open_start, open_start + 1});
      open = false;
    }
  };
  for (std::size_t i = 0; i < tags.size(); ++i) {
    switch (tags[i]) {
      case BilouTag::B:
        close_dangling();
        open = true;
        open_start = i;
        break;
      case BilouTag::I:
        if (!open) {  // leading I or I after O: acts as B
          open = true;
          open_start = i;
        }
        break;
      case BilouTag::L:
        if (open) {
          spans.push_back({open_start, i + 1});
          open = false;
        } else {  // stray L acts as U
          spans.push_back({i, i + 1});
        }
        break;
      case BilouTag::O:
        close_dangling();
        break;
      case BilouTag::U:
        close_dangling();
        spans.push_back({i, i + 1});
        break;
    }
  }
  close_dangling();
  return spans;
}

namespace {

std::string lower_ascii(std::string s) {
  for (char& c : s) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return s;
}

std::string word_shape(const std::string& s) {
  std::string shape;
  char prev = 0;
  for (char c : s) {
    char cls;
    const unsigned char u = static_cast<unsigned char>(c);
    if (std::isupper(u)) {
      cls = 'X';
    } else if (std::islower(u)) {
      cls = 'x';
    } else if (std::isdigit(u)) {
      cls = 'd';
    } else {
      cls = c;
    }
    if (cls != prev) shape.push_back(cls);  // collapse runs
    prev = cls;
  }
  return shape;
}

const std::string kBoundary = "<s>";

std::string window_surface(const std::vector<Token>& tokens, std::size_t position,
                           int offset) {
  const long long idx = static_cast<long long>(position) + offset;
  if (idx < 0 || idx >= static_cast<long long>(tokens.size())) return kBoundary;
  return lower_ascii(tokens[static_cast<std::size_t>(idx)].surface);
}

}  // namespace

std::string history_symbol(const std::vector<BilouTag>& tags, std::size_t position,
                           std::size_t back) {
  if (position < back) return kBoundary;
  return std::string(1, kBilouLetters[static_cast<std::size_t>(
                            tags[position - back])]);
}

std::vector<std::uint32_t> extract_features(const std::vector<Token>& tokens,
                                            std::size_t position,
                                            const std::string& prev1,
                                            const std::string& prev2) {
  if (position >= tokens.size()) {
    throw DataError("extract_features: position out of bounds");
  }
  const Token& tok = tokens[position];
  std::vector<std::uint32_t> ids;
  ids.reserve(20);
  auto add = [&ids](const std::string& tmpl) { ids.push_back(feature_id(tmpl)); };

  add("w0=" + lower_ascii(tok.surface));
  add("w-1=" + window_surface(tokens, position, -1));
  add("w-2=" + window_surface(tokens, position, -2));
  add("w+1=" + window_surface(tokens, position, 1));
  add("w+2=" + window_surface(tokens, position, 2));
  add("shape=" + word_shape(tok.surface));
  for (std::size_t k = 1; k <= 3 && k <= tok.surface.size(); ++k) {
    add("pre" + std::to_string(k) + "=" + lower_ascii(tok.surface.substr(0, k)));
    add("suf" + std::to_string(k) + "=" +
        lower_ascii(tok.surface.substr(tok.surface.size() - k)));
  }
  if (!tok.surface.empty() &&
      std::isupper(static_cast<unsigned char>(tok.surface.front()))) {
    add("cap");
  }
  if (tok.is_writer_token) add("writer_tok");
  add("t-1=" + prev1);
  add("t-2|t-1=" + prev2 + "|" + prev1);
  if (position == 0) add("pos0");
  return ids;
}

namespace {

// Training-time weights with lazy averaging. `acc` accumulates the sum of
// `w` over steps up to `stamp`.
struct TrainCell {
  std::array<double, kNumBilouTags> w{};
  std::array<double, kNumBilouTags> acc{};
  std::array<std::uint64_t, kNumBilouTags> stamp{};
};

class PerceptronState {
 public:
  void update(const std::vector<std::uint32_t>& features, BilouTag gold,
              BilouTag pred) {
    const auto g = static_cast<std::size_t>(gold);
    const auto p = static_cast<std::size_t>(pred);
    for (std::uint32_t f : features) {
      TrainCell& cell = cells_[f];
      bump(cell, g, +1.0);
      bump(cell, p, -1.0);
    }
  }

  void tick() { ++step_; }

  double score(const std::vector<std::uint32_t>& features, std::size_t tag) const {
    double s = 0.0;
    for (std::uint32_t f : features) {
      auto it = cells_.find(f);
      if (it != cells_.end()) s += it->second.w[tag];
    }
    return s;
  }

  /// Averaged weights over all steps so far; zero entries dropped.
  std::unordered_map<std::uint32_t, std::array<double, kNumBilouTags>> snapshot()
      const {
    std::unordered_map<std::uint32_t, std::array<double, kNumBilouTags>> avg;
    if (step_ == 0) return avg;
    for (const auto& [f, cell] : cells_) {
      std::array<double, kNumBilouTags> row{};
      bool nonzero = false;
      for (std::size_t t = 0; t < kNumBilouTags; ++t) {
        const double total =
            cell.acc[t] + cell.w[t] * static_cast<double>(step_ - cell.stamp[t]);
        row[t] = total / static_cast<double>(step_);
        if (row[t] != 0.0) nonzero = true;
      }
      if (nonzero) avg.emplace(f, row);
    }
    return avg;
  }

 private:
  void bump(TrainCell& cell, std::size_t tag, double delta) {
    cell.acc[tag] += cell.w[tag] * static_cast<double>(step_ - cell.stamp[tag]);
    cell.stamp[tag] = step_;
    cell.w[tag] += delta;
  }

  std::unordered_map<std::uint32_t, TrainCell> cells_;
  std::uint64_t step_ = 0;
};

template <typename ScoreFn>
std::vector<BilouTag> greedy_decode(const std::vector<Token>& tokens,
                                    ScoreFn&& score) {
  std::vector<BilouTag> tags;
  tags.reserve(tokens.size());
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    if (tokens[i].is_writer_token) {
      tags.push_back(BilouTag::U);  // rule-emitted writer span
      continue;
    }
    const std::string prev1 = history_symbol(tags, i, 1);
    const std::string prev2 = history_symbol(tags, i, 2);
    const auto features = extract_features(tokens, i, prev1, prev2);
    std::size_t best = 0;
    double best_score = score(features, 0);
    for (std::size_t t = 1; t < kNumBilouTags; ++t) {
      const double s = score(features, t);
      if (s > best_score) {
        best_score = s;
        best = t;
      }
    }
    tags.push_back(static_cast<BilouTag>(best));
  }
  return tags;
}

std::vector<Span> gold_spans(const Document& doc) {
  std::vector<Span> spans;
  for (const auto& ann : doc.annotations) spans.push_back(ann.span);
  return spans;
}

double dev_relaxed_f1_excl_writer(const TaggerModel& model, const Corpus& dev) {
  std::vector<std::vector<Span>> preds;
  preds.reserve(dev.size());
  for (const auto& doc : dev.docs) preds.push_back(predict_spans(model, doc));
  return span_prf(dev, preds, MatchMode::relaxed, /*include_writer=*/false).f1;
}

}  // namespace

TaggerModel train_tagger(const Corpus& train, const Corpus& dev,
                         const TaggerTrainOptions& options) {
  if (train.empty()) throw DataError("train_tagger: empty training corpus");
  if (options.max_epochs < 1) {
    throw DataError("train_tagger: max_epochs must be at least 1");
  }

  // Gold tag sequences once per document.
  std::vector<std::vector<BilouTag>> gold_tags;
  gold_tags.reserve(train.size());
  for (const auto& doc : train.docs) {
    gold_tags.push_back(spans_to_tags(gold_spans(doc), doc.tokens.size()));
  }

  PerceptronState state;
  std::mt19937_64 rng(options.seed);
  std::vector<std::size_t> order(train.size());
  std::iota(order.begin(), order.end(), 0);

  TaggerModel best;
  best.feature_space_bits = kFeatureSpaceBits;
  best.seed = options.seed;
  double best_f1 = -1.0;
  int stale_epochs = 0;

  for (int epoch = 1; epoch <= options.max_epochs; ++epoch) {
    for (std::size_t i = order.size(); i > 1; --i) {
      std::swap(order[i - 1], order[static_cast<std::size_t>(rng() % i)]);
    }
    for (std::size_t idx : order) {
      const Document& doc = train.docs[idx];
      const std::vector<BilouTag>& gold = gold_tags[idx];
      std::vector<BilouTag> predicted;
      predicted.reserve(doc.tokens.size());
      for (std::size_t i = 0; i < doc.tokens.size(); ++i) {
        state.tick();
        if (doc.tokens[i].is_writer_token) {
          predicted.push_back(BilouTag::U);  // never learned, never updated
          continue;
        }
        const std::string prev1 = history_symbol(predicted, i, 1);
        const std::string prev2 = history_symbol(predicted, i, 2);
        const auto features = extract_features(doc.tokens, i, prev1, prev2);
        std::size_t argmax = 0;
        double best_score = state.score(features, 0);
        for (std::size_t t = 1; t < kNumBilouTags; ++t) {
          const double s = state.score(features, t);
          if (s > best_score) {
            best_score = s;
            argmax = t;
          }
        }
        const auto pred = static_cast<BilouTag>(argmax);
        predicted.push_back(pred);
        if (pred != gold[i]) state.update(features, gold[i], pred);
      }
    }

    TaggerModel candidate;
    candidate.feature_space_bits = kFeatureSpaceBits;
    candidate.seed = options.seed;
    candidate.epoch_count = epoch;
    candidate.weights = state.snapshot();

    if (dev.empty()) {
      best = std::move(candidate);
      continue;
    }
    const double f1 = dev_relaxed_f1_excl_writer(candidate, dev);
    if (f1 > best_f1) {
      best_f1 = f1;
      best = std::move(candidate);
      stale_epochs = 0;
    } else {
      ++stale_epochs;
      if (stale_epochs >= options.patience) break;
    }
  }
  return best;
}

std::vector<BilouTag> predict_tags(const TaggerModel& model,
                                   const std::vector<Token>& tokens) {
  return greedy_decode(tokens, [&model](const std::vector<std::uint32_t>& features,
                                        std::size_t tag) {
    double s = 0.0;
    for (std::uint32_t f : features) {
      auto it = model.weights.find(f);
      if (it != model.weights.end()) s += it->second[tag];
    }
    return s;
  });
}

std::vector<Span> predict_spans(const TaggerModel& model, const Document& doc) {
  return tags_to_spans(predict_tags(model, doc.tokens));
}

namespace {

constexpr const char* kTaggerFormat = "emoter-tagger";
constexpr int kTaggerVersion = 1;

}  // namespace

std::string tagger_to_string(const TaggerModel& model) {
  using ordered_json = nlohmann::ordered_json;
  ordered_json j;
  j["format"] = kTaggerFormat;
  j["version"] = kTaggerVersion;
  j["feature_space_bits"] = model.feature_space_bits;
  j["seed"] = model.seed;
  j["epoch_count"] = model.epoch_count;

  std::vector<std::uint32_t> ids;
  ids.reserve(model.weights.size());
  for (const auto& [f, _] : model.weights) ids.push_back(f);
  std::sort(ids.begin(), ids.end());

  ordered_json weights = ordered_json::array();
  for (std::uint32_t f : ids) {
    const auto& row = model.weights.at(f);
    for (std::size_t t = 0; t < kNumBilouTags; ++t) {
      if (row[t] != 0.0) {
        weights.push_back(
            ordered_json::array({f, std::string(1, kBilouLetters[t]), row[t]}));
      }
    }
  }
  j["weights"] = std::move(weights);
  return j.dump() + "\n";
}

void save_tagger(const TaggerModel& model, const std::string& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw DataError("cannot write model file: " + path);
  out << tagger_to_string(model);
}

TaggerModel load_tagger(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot read model file: " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw DataError("malformed model file " + path + ": " + e.what());
  }
  if (j.value("format", "") != kTaggerFormat) {
    throw DataError(path + ": not a tagger model file");
  }
  if (j.value("version", -1) != kTaggerVersion) {
    throw DataError(path + ": unsupported tagger model version");
  }
  TaggerModel model;
  model.feature_space_bits = j.value("feature_space_bits", 0);
  if (model.feature_space_bits != kFeatureSpaceBits) {
    throw DataError(path + ": feature space width mismatch");
  }
  model.seed = j.value("seed", 0ULL);
  model.epoch_count = j.value("epoch_count", 0);
  for (const auto& entry : j.at("weights")) {
    const auto f = entry.at(0).get<std::uint32_t>();
    const auto letter = entry.at(1).get<std::string>();
    const auto w = entry.at(2).get<double>();
    const auto* pos = std::find(kBilouLetters.begin(), kBilouLetters.end(),
                                letter.empty() ? '\0' : letter[0]);
    if (letter.size() != 1 || pos == kBilouLetters.end()) {
      throw DataError(path + ": unknown tag '" + letter + "'");
    }
    model.weights[f][static_cast<std::size_t>(pos - kBilouLetters.begin())] = w;
  }
  return model;
}

}  // namespace emoter
