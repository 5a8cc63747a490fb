#pragma once

#include <cstddef>
#include <filesystem>
#include <variant>
#include <vector>

#include "policylens/core/model.hpp"
#include "policylens/llm/provider.hpp"
#include "policylens/preprocess/filters.hpp"
#include "policylens/preprocess/types.hpp"

namespace policylens::preprocess {

struct PipelineOptions {
  FilterConfig filter;
  bool run_detector = true;
  std::size_t concurrency = 4;
};

using DocumentOutcome = std::variant<PolicyDocument, RejectionRecord>;

/// Isolate, filter, detect (when detector is non-null), simplify and split one
/// document. Stage-3 dedup is not applied here.
DocumentOutcome process_document(const RawDocument& doc, const FilterConfig& filter,
                                 const LanguageIdentifier& language_id, llm::ChatProvider* detector);

struct PipelineOutput {
  std::vector<PolicyDocument> documents;  ///< input order
  std::vector<RejectionRecord> rejected;  ///< dedup rejections first, then input order
};

/// dedup_corpus followed by process_document on each survivor, with at most
/// options.concurrency documents in flight. Output is independent of scheduling.
PipelineOutput run_pipeline(const std::vector<RawDocument>& docs, const PipelineOptions& options,
                            const LanguageIdentifier& language_id, llm::ChatProvider* detector);

/// Reads "doc_id<TAB>url<TAB>path" lines (url may be empty; relative paths are
/// resolved against the manifest's directory). Blank lines and '#' comments
/// are skipped. Throws Error(IoError) on unreadable files or malformed lines.
std::vector<RawDocument> load_manifest(const std::filesystem::path& manifest);

/// Every *.html / *.htm file in dir, sorted by name; doc_id is the file stem.
std::vector<RawDocument> load_directory(const std::filesystem::path& dir);

/// load_directory for directories, load_manifest otherwise.
std::vector<RawDocument> load_input(const std::filesystem::path& path);

}  // namespace policylens::preprocess
