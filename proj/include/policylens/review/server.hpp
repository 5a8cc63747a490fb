#pragma once

#include <filesystem>
#include <memory>
#include <optional>
#include <string>

#include "policylens/review/service.hpp"

namespace policylens::review {

/// JSON API over a ReviewService. Every /api route requires
/// "Authorization: Bearer <token>" naming a registered reviewer; ids given in
/// queries or bodies must match that reviewer.
///
///   GET  /api/labels
///   GET  /api/policies
///   GET  /api/tasks/next?reviewer=ID         200 task | 204
///   POST /api/tasks/{task_id}/review         {reviewer_id, annotations}
///   GET  /api/disputes
///   POST /api/disputes/{task_id}/resolve     {jury_id, decision, annotations?}
///   GET  /api/export/{policy_id}
///
/// Errors are {"error": <code>, "message": ...}.
class ReviewServer {
 public:
  explicit ReviewServer(ReviewService& service, std::optional<std::filesystem::path> static_dir = std::nullopt);
  ~ReviewServer();
  ReviewServer(const ReviewServer&) = delete;
  ReviewServer& operator=(const ReviewServer&) = delete;

  /// Binds host:port (port 0 picks a free one) and returns the bound port.
  int bind(const std::string& host, int port);
  /// Serves until stop(); call after bind().
  void listen();
  void stop();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace policylens::review
