#include "emoter/corpus_io.hpp"

#include <filesystem>
#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "emoter/errors.hpp"

namespace emoter {

namespace {

using json = nlohmann::json;
using ordered_json = nlohmann::ordered_json;

[[noreturn]] void line_error(const std::string& source, std::size_t line,
                             const std::string& what) {
  throw DataError(source + ":" + std::to_string(line) + ": " + what);
}

Document parse_record(const json& rec, const std::string& source,
                      std::size_t line, const LoadOptions& options) {
  if (!rec.is_object()) line_error(source, line, "record is not a JSON object");
  if (!rec.contains("id") || !rec["id"].is_string()) {
    line_error(source, line, "missing or non-string 'id'");
  }
  if (!rec.contains("text") || !rec["text"].is_string()) {
    line_error(source, line, "missing or non-string 'text'");
  }

  Document doc;
  doc.id = rec["id"].get<std::string>();
  doc.text = rec["text"].get<std::string>();
  doc.tokens = tokenize(doc.text);
  doc = inject_writer_token(doc);

  if (rec.contains("spans")) {
    if (!rec["spans"].is_array()) {
      line_error(source, line, "'spans' is not an array");
    }
    for (const auto& s : rec["spans"]) {
      if (!s.is_object()) line_error(source, line, "span entry is not an object");
      ExperiencerAnnotation ann;
      if (!s.contains("start_token") || !s["start_token"].is_number_integer() ||
          !s.contains("end_token") || !s["end_token"].is_number_integer()) {
        line_error(source, line, "span without integer start_token/end_token");
      }
      const std::int64_t start = s["start_token"].get<std::int64_t>();
      const std::int64_t end = s["end_token"].get<std::int64_t>();
      if (start < 0 || end <= start) {
        line_error(source, line,
                   "document '" + doc.id + "': invalid span [" +
                       std::to_string(start) + "," + std::to_string(end) + ")");
      }
      ann.span = Span{static_cast<std::size_t>(start),
                      static_cast<std::size_t>(end)};
      ann.is_writer = s.value("is_writer", false);
      if (s.contains("emotions")) {
        if (!s["emotions"].is_array()) {
          line_error(source, line, "'emotions' is not an array");
        }
        for (const auto& e : s["emotions"]) {
          if (!e.is_string()) line_error(source, line, "non-string emotion label");
          ann.emotions.insert(e.get<std::string>());
        }
      }
      if (s.contains("appraisals")) {
        if (!s["appraisals"].is_object()) {
          line_error(source, line, "'appraisals' is not an object");
        }
        for (const auto& [dim, score] : s["appraisals"].items()) {
          if (!score.is_number_integer()) {
            line_error(source, line, "non-integer appraisal score for '" + dim + "'");
          }
          ann.appraisal_scores[dim] = score.get<int>();
        }
      }
      doc.annotations.push_back(std::move(ann));
    }
  }

  // Everything except span overlap is a hard error; overlap is the caller's
  // quarantine case, so validate annotations one at a time and defer the
  // pairwise check.
  Document probe = doc;
  probe.annotations.clear();
  std::size_t writers = 0;
  for (const auto& ann : doc.annotations) {
    probe.annotations.assign(1, ann);
    try {
      validate_document(probe, options.emotions, options.appraisals);
    } catch (const DataError& e) {
      line_error(source, line, e.what());
    }
    writers += ann.is_writer ? 1 : 0;
  }
  if (writers > 1) {
    line_error(source, line,
               "document '" + doc.id + "': more than one writer annotation");
  }
  return doc;
}

}  // namespace

LoadResult parse_corpus(const std::string& content, const LoadOptions& options,
                        const std::string& source_name) {
  LoadResult result;
  std::set<std::string> seen_ids;
  std::istringstream in(content);
  std::string line;
  std::size_t line_no = 0;
  bool first_record = true;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() ||
        line.find_first_not_of(" \t\r") == std::string::npos) {
      continue;
    }
    json rec;
    try {
      rec = json::parse(line);
    } catch (const json::exception& e) {
      line_error(source_name, line_no, std::string("malformed record: ") + e.what());
    }
    if (first_record) {
      if (!rec.is_object() || !rec.contains("schema_version") ||
          !rec["schema_version"].is_string()) {
        line_error(source_name, line_no, "first record lacks schema_version");
      }
      if (rec["schema_version"].get<std::string>() != options.schema_version) {
        line_error(source_name, line_no,
                   "schema_version mismatch: expected '" + options.schema_version +
                       "', found '" + rec["schema_version"].get<std::string>() + "'");
      }
      first_record = false;
    } else if (rec.is_object() && rec.contains("schema_version")) {
      if (!rec["schema_version"].is_string() ||
          rec["schema_version"].get<std::string>() != options.schema_version) {
        line_error(source_name, line_no, "schema_version mismatch");
      }
    }

    Document doc = parse_record(rec, source_name, line_no, options);
    if (!seen_ids.insert(doc.id).second) {
      line_error(source_name, line_no, "duplicate document id '" + doc.id + "'");
    }
    if (has_overlapping_annotations(doc)) {
      result.quarantined.push_back(std::move(doc));
    } else {
      result.corpus.docs.push_back(std::move(doc));
    }
  }
  return result;
}

LoadResult load_corpus(const std::string& path, const LoadOptions& options) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot read corpus file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_corpus(buf.str(), options, path);
}

std::string corpus_to_string(const Corpus& corpus) {
  std::string out;
  bool first = true;
  for (const auto& doc : corpus.docs) {
    ordered_json rec;
    if (first) {
      rec["schema_version"] = kCorpusSchemaVersion;
      first = false;
    }
    rec["id"] = doc.id;
    rec["text"] = doc.text;
    ordered_json spans = ordered_json::array();
    for (const auto& ann : doc.annotations) {
      ordered_json s;
      s["start_token"] = ann.span.start;
      s["end_token"] = ann.span.end;
      s["is_writer"] = ann.is_writer;
      s["emotions"] = ann.emotions;  // std::set keeps a sorted, stable order
      ordered_json appr = ordered_json::object();
      for (const auto& [dim, score] : ann.appraisal_scores) appr[dim] = score;
      s["appraisals"] = appr;
      spans.push_back(std::move(s));
    }
    rec["spans"] = std::move(spans);
    out += rec.dump();
    out += '\n';
  }
  return out;
}

void atomic_write_file(const std::string& path, const std::string& content) {
  namespace fs = std::filesystem;
  const fs::path target(path);
  if (target.has_parent_path()) fs::create_directories(target.parent_path());
  const fs::path tmp = target.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw DataError("cannot write file: " + tmp.string());
    out << content;
  }
  fs::rename(tmp, target);
}

void save_corpus(const Corpus& corpus, const std::string& path) {
  atomic_write_file(path, corpus_to_string(corpus));
}

}  // namespace emoter
