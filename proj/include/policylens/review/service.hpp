#pragma once

#include <chrono>
#include <cstddef>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <optional>
#include <shared_mutex>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "policylens/core/model.hpp"

namespace policylens::review {

using Clock = std::function<std::chrono::system_clock::time_point()>;

enum class Role { Reviewer, Jury };
std::string_view to_string(Role r) noexcept;
std::optional<Role> role_from_string(std::string_view s) noexcept;

struct Reviewer {
  std::string id;
  Role role = Role::Reviewer;
  std::string token;  ///< bearer token for the HTTP API; may be empty
};

enum class TaskState { Pending, OneReview, Disputed, Finalized };
std::string_view to_string(TaskState s) noexcept;

/// How a finalized task got its final set.
enum class Resolution { None, Agreement, Jury };
std::string_view to_string(Resolution r) noexcept;

struct Review {
  std::string reviewer_id;
  AnnotationSet annotations;
  std::string timestamp;
};

struct ReviewDiff {
  AnnotationSet only_in_1;
  AnnotationSet only_in_2;
  AnnotationSet common;
};

ReviewDiff diff_reviews(const AnnotationSet& first, const AnnotationSet& second);

struct ReviewTask {
  std::string task_id;
  std::string policy_id;
  std::size_t index = 0;     ///< passage position in its policy
  AnnotatedPassage passage;  ///< pipeline output; never modified
  TaskState state = TaskState::Pending;
  std::vector<Review> reviews;
  Resolution resolution = Resolution::None;
  std::optional<std::string> jury_id;
  std::optional<AnnotationSet> final;
};

enum class Decision { PickReview1, PickReview2, Custom };
std::string_view to_string(Decision d) noexcept;
std::optional<Decision> decision_from_string(std::string_view s) noexcept;

struct PolicyProgress {
  std::string policy_id;
  std::size_t passages = 0;
  std::size_t finalized = 0;
  std::size_t disputed = 0;
};

struct ServiceConfig {
  std::vector<Reviewer> reviewers;
  std::optional<std::filesystem::path> event_log;  ///< unset: in-memory only
  std::chrono::minutes lease{30};
  Clock clock;  ///< defaults to system_clock::now
};

std::string task_id_for(std::string_view policy_id, std::size_t index);

/// Dual review, dispute and jury workflow over a fixed set of documents.
/// Every mutation is appended to the event log before it becomes visible;
/// opening an existing log replays it.
class ReviewService {
 public:
  ReviewService(std::vector<PolicyDocument> documents, ServiceConfig config);

  /// Next task the reviewer may work on, leased to them for config.lease.
  /// A reviewer holding a live lease gets that task again. Other reviewers'
  /// submissions are not included (blind review).
  std::optional<ReviewTask> next_task(const std::string& reviewer_id);

  /// Returns the task's new state.
  TaskState submit_review(const std::string& task_id, const std::string& reviewer_id,
                          const AnnotationSet& annotations);

  ReviewTask resolve_dispute(const std::string& task_id, const std::string& jury_id, Decision decision,
                             const std::optional<AnnotationSet>& custom = std::nullopt);

  /// Throws IncompleteReview listing every unfinalized task of the policy.
  PolicyDocument export_ground_truth(const std::string& policy_id) const;

  std::vector<PolicyProgress> policies() const;
  std::vector<ReviewTask> disputes() const;
  ReviewTask task(const std::string& task_id) const;
  const Reviewer& reviewer(const std::string& reviewer_id) const;
  /// Reviewer owning the bearer token, or nullptr.
  const Reviewer* reviewer_by_token(std::string_view token) const;

  /// Full task state without leases; equal for services with equal histories.
  nlohmann::ordered_json snapshot() const;

 private:
  ReviewTask& task_ref(const std::string& task_id);
  const ReviewTask& task_ref(const std::string& task_id) const;
  std::string now_string() const;
  void append(const nlohmann::ordered_json& event);
  void apply(const nlohmann::ordered_json& event);
  void replay(const std::filesystem::path& path);

  struct Lease {
    std::string reviewer_id;
    std::chrono::system_clock::time_point expires;
  };

  ServiceConfig config_;
  std::vector<PolicyDocument> documents_;
  std::vector<ReviewTask> tasks_;
  std::map<std::string, std::size_t, std::less<>> task_index_;
  std::map<std::string, Reviewer, std::less<>> reviewers_;
  std::map<std::string, std::vector<Lease>, std::less<>> leases_;
  std::ofstream log_;
  mutable std::shared_mutex mu_;
};

nlohmann::ordered_json task_to_json(const ReviewTask& task, bool include_reviews);
nlohmann::ordered_json diff_to_json(const ReviewDiff& diff);

}  // namespace policylens::review
