#pragma once

#include <string>
#include <vector>

#include "emoter/corpus.hpp"

namespace emoter {

inline constexpr const char* kCorpusSchemaVersion = "1";

/// Outcome of loading a corpus file. Documents whose gold spans overlap
/// are excluded from the corpus but kept here for inspection.
struct LoadResult {
  Corpus corpus;
  std::vector<Document> quarantined;

  std::size_t excluded_count() const { return quarantined.size(); }
};

struct LoadOptions {
  std::string schema_version = kCorpusSchemaVersion;
  LabelSet emotions = LabelSet::emotions();
  LabelSet appraisals = LabelSet::appraisals();
};

/// Load a line-delimited corpus file. One JSON record per line with fields
/// `id`, `text` and `spans`; the first record must carry a matching
/// `schema_version`. Token indices in the file use post-injection indexing
/// (writer token at index 0); the loader tokenizes `text`, injects the
/// writer token and validates every record against the result.
/// Hard errors (malformed record, unknown label, out-of-range span,
/// duplicate id) throw DataError with the offending line number or
/// document id. Overlapping gold spans quarantine the document instead.
LoadResult load_corpus(const std::string& path, const LoadOptions& options = {});

/// Parse records from an in-memory string; same contract as load_corpus.
LoadResult parse_corpus(const std::string& content, const LoadOptions& options = {},
                        const std::string& source_name = "<memory>");

/// Serialize documents back to the line-delimited format. Documents must be
/// post-injection and valid. The first record carries the schema version.
std::string corpus_to_string(const Corpus& corpus);
void save_corpus(const Corpus& corpus, const std::string& path);

/// Write-then-rename so readers never observe partial files.
void atomic_write_file(const std::string& path, const std::string& content);

}  // namespace emoter
