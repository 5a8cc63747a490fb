#include "policylens/preprocess/pipeline.hpp"

#include <algorithm>
#include <fstream>
#include <optional>
#include <sstream>

#include "policylens/core/error.hpp"
#include "policylens/preprocess/dedup.hpp"
#include "policylens/preprocess/detector.hpp"
#include "policylens/preprocess/main_content.hpp"
#include "policylens/preprocess/passages.hpp"
#include "policylens/preprocess/simplify.hpp"
#include "policylens/util/parallel.hpp"

namespace policylens::preprocess {

namespace fs = std::filesystem;

DocumentOutcome process_document(const RawDocument& doc, const FilterConfig& filter,
                                 const LanguageIdentifier& language_id, llm::ChatProvider* detector) {
  html::Node main;
  try {
    main = isolate_main_content(doc.bytes, filter.min_words);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::InvalidDocument) throw;
    return RejectionRecord{doc.doc_id, RejectionStage::MainContent, e.what()};
  }
  const std::string main_text = html::visible_text(main);
  if (auto rejection = apply_filters(main_text, filter, language_id)) {
    rejection->doc_id = doc.doc_id;
    return *rejection;
  }
  if (detector != nullptr) {
    const PolicyVerdict verdict = detect_privacy_policy(main_text, *detector);
    if (verdict != PolicyVerdict::True) {
      return RejectionRecord{doc.doc_id, RejectionStage::Detector,
                             "detector answered " + std::string(to_string(verdict))};
    }
  }
  PolicyDocument out;
  out.policy_id = doc.doc_id;
  out.source_url = doc.url;
  for (auto& p : parse_passages(simplify_html(main))) {
    out.passages.push_back(AnnotatedPassage{std::move(p), {}});
  }
  return out;
}

PipelineOutput run_pipeline(const std::vector<RawDocument>& docs, const PipelineOptions& options,
                            const LanguageIdentifier& language_id, llm::ChatProvider* detector) {
  options.filter.validate();
  PipelineOutput out;
  std::vector<RawDocument> work;
  if (options.filter.dedup_enabled) {
    auto dedup = dedup_corpus(docs, options.filter.min_words);
    out.rejected = std::move(dedup.rejected);
    work = std::move(dedup.unique);
  } else {
    work = docs;
  }

  std::vector<std::optional<DocumentOutcome>> slots(work.size());
  util::parallel_for(work.size(), options.concurrency, [&](std::size_t i) {
    slots[i] = process_document(work[i], options.filter, language_id, detector);
  });

  for (std::size_t i = 0; i < work.size(); ++i) {
    if (auto* doc = std::get_if<PolicyDocument>(&*slots[i])) {
      out.documents.push_back(std::move(*doc));
    } else {
      out.rejected.push_back(std::get<RejectionRecord>(std::move(*slots[i])));
    }
  }
  return out;
}

namespace {

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::IoError, "cannot read " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

}  // namespace

std::vector<RawDocument> load_manifest(const fs::path& manifest) {
  std::istringstream lines(read_file(manifest));
  std::vector<RawDocument> docs;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(lines, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line.front() == '#') continue;
    std::vector<std::string> fields;
    std::size_t start = 0;
    for (std::size_t tab; (tab = line.find('\t', start)) != std::string::npos; start = tab + 1) {
      fields.push_back(line.substr(start, tab - start));
    }
    fields.push_back(line.substr(start));
    if (fields.size() != 3 || fields[0].empty() || fields[2].empty()) {
      throw Error(ErrorCode::IoError,
                  manifest.string() + ":" + std::to_string(lineno) + ": expected doc_id<TAB>url<TAB>path");
    }
    fs::path path = fields[2];
    if (path.is_relative()) path = manifest.parent_path() / path;
    RawDocument doc;
    doc.doc_id = fields[0];
    if (!fields[1].empty()) doc.url = fields[1];
    doc.bytes = read_file(path);
    docs.push_back(std::move(doc));
  }
  return docs;
}

std::vector<RawDocument> load_directory(const fs::path& dir) {
  std::vector<fs::path> files;
  for (const auto& entry : fs::directory_iterator(dir)) {
    const auto ext = entry.path().extension();
    if (entry.is_regular_file() && (ext == ".html" || ext == ".htm")) files.push_back(entry.path());
  }
  std::sort(files.begin(), files.end());
  std::vector<RawDocument> docs;
  for (const auto& f : files) {
    RawDocument doc;
    doc.doc_id = f.stem().string();
    doc.bytes = read_file(f);
    docs.push_back(std::move(doc));
  }
  return docs;
}

std::vector<RawDocument> load_input(const fs::path& path) {
  if (!fs::exists(path)) throw Error(ErrorCode::IoError, "no such file or directory: " + path.string());
  return fs::is_directory(path) ? load_directory(path) : load_manifest(path);
}

}  // namespace policylens::preprocess
