#pragma once

#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace policylens {

enum class ErrorCode {
  SpanNotFound,
  InvalidAnnotation,
  SchemaViolation,
  InvalidDocument,
  ProviderUnavailable,
  ResponseTooLong,
  Unparseable,
  DegenerateInput,
  InsufficientMembers,
  ConfigError,
  IoError,
  UnknownTask,
  UnknownReviewer,
  UnknownPolicy,
  AlreadyReviewed,
  ReviewsComplete,
  TaskFinalized,
  NotDisputed,
  NotJury,
  ConflictOfInterest,
  IncompleteReview,
  AlignmentMismatch,
};

std::string_view to_string(ErrorCode code);

/// Base exception for every failure surfaced by the toolkit.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(message), code_(code) {}

  [[nodiscard]] ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

/// A document failed schema validation; path() points at the offending field,
/// e.g. "items[0].context[1].type".
class SchemaViolation : public Error {
 public:
  SchemaViolation(std::string path, const std::string& detail)
      : Error(ErrorCode::SchemaViolation, path + ": " + detail),
        path_(std::move(path)) {}

  [[nodiscard]] const std::string& path() const noexcept { return path_; }

 private:
  std::string path_;
};

class ConfigError : public Error {
 public:
  ConfigError(std::string path, const std::string& detail)
      : Error(ErrorCode::ConfigError, path + ": " + detail),
        path_(std::move(path)) {}

  [[nodiscard]] const std::string& path() const noexcept { return path_; }

 private:
  std::string path_;
};

class IncompleteReview : public Error {
 public:
  explicit IncompleteReview(std::vector<std::string> task_ids);

  [[nodiscard]] const std::vector<std::string>& unfinalized() const noexcept {
    return unfinalized_;
  }

 private:
  std::vector<std::string> unfinalized_;
};

}  // namespace policylens
