#include "policylens/review/service.hpp"

#include <algorithm>
#include <ctime>
#include <mutex>

#include "policylens/core/error.hpp"
#include "policylens/core/schema.hpp"

namespace policylens::review {

namespace {

using Json = nlohmann::ordered_json;

bool has_reviewed(const ReviewTask& t, std::string_view reviewer_id) {
  return std::any_of(t.reviews.begin(), t.reviews.end(),
                     [&](const Review& r) { return r.reviewer_id == reviewer_id; });
}

void check_annotations(const AnnotationSet& set, const Passage& passage) {
  for (const auto& a : set) {
    if (auto problem = annotation_problem(a, passage.text)) {
      throw Error(ErrorCode::InvalidAnnotation, "'" + a.span + "' (" + std::string(to_string(a.label)) +
                                                    "): " + *problem);
    }
  }
}

std::string format_utc(std::chrono::system_clock::time_point t) {
  const std::time_t secs = std::chrono::system_clock::to_time_t(t);
  std::tm tm{};
  gmtime_r(&secs, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

}  // namespace

std::string_view to_string(Role r) noexcept { return r == Role::Jury ? "jury" : "reviewer"; }

std::optional<Role> role_from_string(std::string_view s) noexcept {
  if (s == "reviewer") return Role::Reviewer;
  if (s == "jury") return Role::Jury;
  return std::nullopt;
}

std::string_view to_string(TaskState s) noexcept {
  switch (s) {
    case TaskState::Pending: return "pending";
    case TaskState::OneReview: return "one_review";
    case TaskState::Disputed: return "disputed";
    case TaskState::Finalized: return "finalized";
  }
  return "pending";
}

std::string_view to_string(Resolution r) noexcept {
  switch (r) {
    case Resolution::None: return "none";
    case Resolution::Agreement: return "agreed";
    case Resolution::Jury: return "jury";
  }
  return "none";
}

std::string_view to_string(Decision d) noexcept {
  switch (d) {
    case Decision::PickReview1: return "pick_review_1";
    case Decision::PickReview2: return "pick_review_2";
    case Decision::Custom: return "custom";
  }
  return "custom";
}

std::optional<Decision> decision_from_string(std::string_view s) noexcept {
  if (s == "pick_review_1") return Decision::PickReview1;
  if (s == "pick_review_2") return Decision::PickReview2;
  if (s == "custom") return Decision::Custom;
  return std::nullopt;
}

ReviewDiff diff_reviews(const AnnotationSet& first, const AnnotationSet& second) {
  ReviewDiff d;
  for (const auto& a : first) (second.contains(a) ? d.common : d.only_in_1).insert(a);
  for (const auto& a : second) {
    if (!first.contains(a)) d.only_in_2.insert(a);
  }
  return d;
}

std::string task_id_for(std::string_view policy_id, std::size_t index) {
  return std::string(policy_id) + "~" + std::to_string(index);
}

Json diff_to_json(const ReviewDiff& diff) {
  Json j;
  j["only_in_1"] = schema::annotations_to_json(diff.only_in_1);
  j["only_in_2"] = schema::annotations_to_json(diff.only_in_2);
  j["common"] = schema::annotations_to_json(diff.common);
  return j;
}

Json task_to_json(const ReviewTask& task, bool include_reviews) {
  Json j;
  j["task_id"] = task.task_id;
  j["policy_id"] = task.policy_id;
  j["passage_id"] = task.passage.passage.id;
  j["state"] = to_string(task.state);
  j["passage"] = schema::passage_to_json(task.passage);
  if (!include_reviews) return j;
  auto reviews = Json::array();
  for (const auto& r : task.reviews) {
    reviews.push_back({{"reviewer_id", r.reviewer_id},
                       {"timestamp", r.timestamp},
                       {"annotations", schema::annotations_to_json(r.annotations)}});
  }
  j["reviews"] = std::move(reviews);
  if (task.reviews.size() == 2) j["diff"] = diff_to_json(diff_reviews(task.reviews[0].annotations, task.reviews[1].annotations));
  j["resolution"] = to_string(task.resolution);
  if (task.jury_id) j["jury_id"] = *task.jury_id;
  if (task.final) j["final"] = schema::annotations_to_json(*task.final);
  return j;
}

ReviewService::ReviewService(std::vector<PolicyDocument> documents, ServiceConfig config)
    : config_(std::move(config)), documents_(std::move(documents)) {
  if (!config_.clock) config_.clock = [] { return std::chrono::system_clock::now(); };
  for (const auto& r : config_.reviewers) {
    if (r.id.empty()) throw ConfigError("review.reviewers", "reviewer id must not be empty");
    if (!reviewers_.emplace(r.id, r).second) throw ConfigError("review.reviewers", "duplicate reviewer '" + r.id + "'");
  }
  for (const auto& doc : documents_) {
    for (std::size_t i = 0; i < doc.passages.size(); ++i) {
      ReviewTask t;
      t.task_id = task_id_for(doc.policy_id, i);
      t.policy_id = doc.policy_id;
      t.index = i;
      t.passage = doc.passages[i];
      if (!task_index_.emplace(t.task_id, tasks_.size()).second) {
        throw ConfigError("documents", "duplicate policy id '" + doc.policy_id + "'");
      }
      tasks_.push_back(std::move(t));
    }
  }
  if (config_.event_log) {
    if (std::filesystem::exists(*config_.event_log)) replay(*config_.event_log);
    log_.open(*config_.event_log, std::ios::app);
    if (!log_) throw Error(ErrorCode::IoError, "cannot open event log " + config_.event_log->string());
  }
}

ReviewTask& ReviewService::task_ref(const std::string& task_id) {
  auto it = task_index_.find(task_id);
  if (it == task_index_.end()) throw Error(ErrorCode::UnknownTask, "no task '" + task_id + "'");
  return tasks_[it->second];
}

const ReviewTask& ReviewService::task_ref(const std::string& task_id) const {
  return const_cast<ReviewService*>(this)->task_ref(task_id);
}

const Reviewer& ReviewService::reviewer(const std::string& reviewer_id) const {
  auto it = reviewers_.find(reviewer_id);
  if (it == reviewers_.end()) throw Error(ErrorCode::UnknownReviewer, "unknown reviewer '" + reviewer_id + "'");
  return it->second;
}

const Reviewer* ReviewService::reviewer_by_token(std::string_view token) const {
  if (token.empty()) return nullptr;
  for (const auto& [id, r] : reviewers_) {
    if (r.token == token) return &r;
  }
  return nullptr;
}

std::string ReviewService::now_string() const { return format_utc(config_.clock()); }

void ReviewService::append(const Json& event) {
  if (!log_.is_open()) return;
  log_ << event.dump(-1, ' ', false, Json::error_handler_t::strict) << '\n';
  log_.flush();
  if (!log_) throw Error(ErrorCode::IoError, "failed to append to event log");
}

void ReviewService::apply(const Json& event) {
  const std::string kind = event.at("event").get<std::string>();
  ReviewTask& t = task_ref(event.at("task_id").get<std::string>());
  if (kind == "review_submitted") {
    const auto reviewer_id = event.at("reviewer_id").get<std::string>();
    if (t.state == TaskState::Finalized) throw Error(ErrorCode::TaskFinalized, t.task_id + " is finalized");
    if (has_reviewed(t, reviewer_id)) throw Error(ErrorCode::AlreadyReviewed, t.task_id + " already reviewed by " + reviewer_id);
    if (t.reviews.size() >= 2) throw Error(ErrorCode::ReviewsComplete, t.task_id + " already has two reviews");
    Review r{reviewer_id, schema::annotations_from_json(event.at("annotations"), "annotations", t.passage.passage.text),
             event.at("timestamp").get<std::string>()};
    t.reviews.push_back(std::move(r));
    if (t.reviews.size() == 1) {
      t.state = TaskState::OneReview;
    } else if (t.reviews[0].annotations == t.reviews[1].annotations) {
      t.state = TaskState::Finalized;
      t.resolution = Resolution::Agreement;
      t.final = t.reviews[0].annotations;
    } else {
      t.state = TaskState::Disputed;
    }
  } else if (kind == "dispute_opened") {
    if (t.state != TaskState::Disputed) throw Error(ErrorCode::IoError, "dispute_opened for " + t.task_id + " out of order");
  } else if (kind == "dispute_resolved") {
    if (t.state != TaskState::Disputed) throw Error(ErrorCode::NotDisputed, t.task_id + " is not disputed");
    t.final = schema::annotations_from_json(event.at("annotations"), "annotations", t.passage.passage.text);
    t.jury_id = event.at("jury_id").get<std::string>();
    t.resolution = Resolution::Jury;
    t.state = TaskState::Finalized;
  } else {
    throw Error(ErrorCode::IoError, "unknown event '" + kind + "'");
  }
}

void ReviewService::replay(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::IoError, "cannot read event log " + path.string());
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    try {
      apply(Json::parse(line));
    } catch (const std::exception& e) {
      throw Error(ErrorCode::IoError, path.string() + ":" + std::to_string(lineno) + ": " + e.what());
    }
  }
}

std::optional<ReviewTask> ReviewService::next_task(const std::string& reviewer_id) {
  std::unique_lock lock(mu_);
  reviewer(reviewer_id);
  const auto now = config_.clock();
  for (auto& [id, leases] : leases_) {
    std::erase_if(leases, [&](const Lease& l) { return l.expires <= now; });
  }
  auto offerable = [&](const ReviewTask& t) {
    return (t.state == TaskState::Pending || t.state == TaskState::OneReview) && !has_reviewed(t, reviewer_id);
  };
  auto blind = [](ReviewTask t) {
    t.reviews.clear();
    return t;
  };

  for (auto& t : tasks_) {
    auto& leases = leases_[t.task_id];
    auto mine = std::find_if(leases.begin(), leases.end(), [&](const Lease& l) { return l.reviewer_id == reviewer_id; });
    if (mine != leases.end() && offerable(t)) {
      mine->expires = now + config_.lease;
      return blind(t);
    }
  }
  for (auto& t : tasks_) {
    if (!offerable(t)) continue;
    auto& leases = leases_[t.task_id];
    if (t.reviews.size() + leases.size() >= 2) continue;
    leases.push_back({reviewer_id, now + config_.lease});
    return blind(t);
  }
  return std::nullopt;
}

TaskState ReviewService::submit_review(const std::string& task_id, const std::string& reviewer_id,
                                       const AnnotationSet& annotations) {
  std::unique_lock lock(mu_);
  reviewer(reviewer_id);
  ReviewTask& t = task_ref(task_id);
  if (t.state == TaskState::Finalized) throw Error(ErrorCode::TaskFinalized, task_id + " is finalized");
  if (has_reviewed(t, reviewer_id)) throw Error(ErrorCode::AlreadyReviewed, task_id + " already reviewed by " + reviewer_id);
  if (t.reviews.size() >= 2) throw Error(ErrorCode::ReviewsComplete, task_id + " already has two reviews");
  check_annotations(annotations, t.passage.passage);

  const std::string ts = now_string();
  Json event;
  event["event"] = "review_submitted";
  event["task_id"] = task_id;
  event["reviewer_id"] = reviewer_id;
  event["timestamp"] = ts;
  event["annotations"] = schema::annotations_to_json(annotations);
  append(event);
  apply(event);
  if (t.state == TaskState::Disputed) {
    Json opened;
    opened["event"] = "dispute_opened";
    opened["task_id"] = task_id;
    opened["timestamp"] = ts;
    opened["diff"] = diff_to_json(diff_reviews(t.reviews[0].annotations, t.reviews[1].annotations));
    append(opened);
    apply(opened);
  }
  auto& leases = leases_[task_id];
  std::erase_if(leases, [&](const Lease& l) { return l.reviewer_id == reviewer_id; });
  return t.state;
}

ReviewTask ReviewService::resolve_dispute(const std::string& task_id, const std::string& jury_id, Decision decision,
                                          const std::optional<AnnotationSet>& custom) {
  std::unique_lock lock(mu_);
  if (reviewer(jury_id).role != Role::Jury) throw Error(ErrorCode::NotJury, jury_id + " is not a jury member");
  ReviewTask& t = task_ref(task_id);
  if (t.state != TaskState::Disputed) {
    throw Error(ErrorCode::NotDisputed, task_id + " is " + std::string(to_string(t.state)));
  }
  if (has_reviewed(t, jury_id)) {
    throw Error(ErrorCode::ConflictOfInterest, jury_id + " reviewed " + task_id + " and cannot adjudicate it");
  }
  AnnotationSet chosen;
  switch (decision) {
    case Decision::PickReview1: chosen = t.reviews[0].annotations; break;
    case Decision::PickReview2: chosen = t.reviews[1].annotations; break;
    case Decision::Custom:
      if (!custom) throw Error(ErrorCode::InvalidAnnotation, "custom decision without annotations");
      check_annotations(*custom, t.passage.passage);
      chosen = *custom;
      break;
  }
  Json event;
  event["event"] = "dispute_resolved";
  event["task_id"] = task_id;
  event["jury_id"] = jury_id;
  event["decision"] = to_string(decision);
  event["timestamp"] = now_string();
  event["annotations"] = schema::annotations_to_json(chosen);
  append(event);
  apply(event);
  return t;
}

PolicyDocument ReviewService::export_ground_truth(const std::string& policy_id) const {
  std::shared_lock lock(mu_);
  auto doc = std::find_if(documents_.begin(), documents_.end(),
                          [&](const PolicyDocument& d) { return d.policy_id == policy_id; });
  if (doc == documents_.end()) throw Error(ErrorCode::UnknownPolicy, "no policy '" + policy_id + "'");
  PolicyDocument out;
  out.policy_id = doc->policy_id;
  out.source_url = doc->source_url;
  std::vector<std::string> open;
  for (std::size_t i = 0; i < doc->passages.size(); ++i) {
    const ReviewTask& t = task_ref(task_id_for(policy_id, i));
    if (t.state != TaskState::Finalized) {
      open.push_back(t.task_id);
      continue;
    }
    out.passages.push_back({t.passage.passage, *t.final});
  }
  if (!open.empty()) throw IncompleteReview(std::move(open));
  return out;
}

std::vector<PolicyProgress> ReviewService::policies() const {
  std::shared_lock lock(mu_);
  std::vector<PolicyProgress> out;
  for (const auto& doc : documents_) {
    PolicyProgress p{doc.policy_id, doc.passages.size(), 0, 0};
    for (std::size_t i = 0; i < doc.passages.size(); ++i) {
      const auto state = task_ref(task_id_for(doc.policy_id, i)).state;
      p.finalized += state == TaskState::Finalized;
      p.disputed += state == TaskState::Disputed;
    }
    out.push_back(std::move(p));
  }
  return out;
}

std::vector<ReviewTask> ReviewService::disputes() const {
  std::shared_lock lock(mu_);
  std::vector<ReviewTask> out;
  std::copy_if(tasks_.begin(), tasks_.end(), std::back_inserter(out),
               [](const ReviewTask& t) { return t.state == TaskState::Disputed; });
  return out;
}

ReviewTask ReviewService::task(const std::string& task_id) const {
  std::shared_lock lock(mu_);
  return task_ref(task_id);
}

Json ReviewService::snapshot() const {
  std::shared_lock lock(mu_);
  auto out = Json::array();
  for (const auto& t : tasks_) out.push_back(task_to_json(t, true));
  return out;
}

}  // namespace policylens::review
