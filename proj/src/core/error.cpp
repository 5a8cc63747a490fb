#include "policylens/core/error.hpp"

namespace policylens {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::SpanNotFound: return "SpanNotFound";
    case ErrorCode::InvalidAnnotation: return "InvalidAnnotation";
    case ErrorCode::SchemaViolation: return "SchemaViolation";
    case ErrorCode::InvalidDocument: return "InvalidDocument";
    case ErrorCode::ProviderUnavailable: return "ProviderUnavailable";
    case ErrorCode::ResponseTooLong: return "ResponseTooLong";
    case ErrorCode::Unparseable: return "Unparseable";
    case ErrorCode::DegenerateInput: return "DegenerateInput";
    case ErrorCode::InsufficientMembers: return "InsufficientMembers";
    case ErrorCode::ConfigError: return "ConfigError";
    case ErrorCode::IoError: return "IoError";
    case ErrorCode::UnknownTask: return "UnknownTask";
    case ErrorCode::UnknownReviewer: return "UnknownReviewer";
    case ErrorCode::UnknownPolicy: return "UnknownPolicy";
    case ErrorCode::AlreadyReviewed: return "AlreadyReviewed";
    case ErrorCode::ReviewsComplete: return "ReviewsComplete";
    case ErrorCode::TaskFinalized: return "TaskFinalized";
    case ErrorCode::NotDisputed: return "NotDisputed";
    case ErrorCode::NotJury: return "NotJury";
    case ErrorCode::ConflictOfInterest: return "ConflictOfInterest";
    case ErrorCode::IncompleteReview: return "IncompleteReview";
    case ErrorCode::AlignmentMismatch: return "AlignmentMismatch";
  }
  return "Unknown";
}

namespace {

std::string incomplete_message(const std::vector<std::string>& ids) {
  std::string msg = "unfinalized passages:";
  for (const auto& id : ids) {
    msg += ' ';
    msg += id;
  }
  return msg;
}

}  // namespace

IncompleteReview::IncompleteReview(std::vector<std::string> task_ids)
    : Error(ErrorCode::IncompleteReview, incomplete_message(task_ids)),
      unfinalized_(std::move(task_ids)) {}

}  // namespace policylens
