#include "policylens/review/server.hpp"

#include <httplib.h>

#include "policylens/core/error.hpp"
#include "policylens/core/schema.hpp"

namespace policylens::review {

namespace {

using Json = nlohmann::ordered_json;

int status_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::UnknownTask:
    case ErrorCode::UnknownPolicy: return 404;
    case ErrorCode::UnknownReviewer:
    case ErrorCode::NotJury:
    case ErrorCode::ConflictOfInterest: return 403;
    case ErrorCode::AlreadyReviewed:
    case ErrorCode::ReviewsComplete:
    case ErrorCode::TaskFinalized:
    case ErrorCode::NotDisputed:
    case ErrorCode::IncompleteReview: return 409;
    case ErrorCode::InvalidAnnotation:
    case ErrorCode::SpanNotFound:
    case ErrorCode::SchemaViolation: return 400;
    default: return 500;
  }
}

void send_json(httplib::Response& res, const Json& body, int status = 200) {
  res.status = status;
  res.set_content(body.dump(-1, ' ', false, Json::error_handler_t::replace), "application/json");
}

void send_error(httplib::Response& res, int status, std::string_view code, const std::string& message) {
  Json body{{"error", code}, {"message", message}};
  send_json(res, body, status);
}

Json parse_body(const httplib::Request& req) {
  auto body = Json::parse(req.body, nullptr, false);
  if (!body.is_object()) throw SchemaViolation("body", "expected a JSON object");
  return body;
}

std::string string_field(const Json& body, const char* key) {
  if (!body.contains(key) || !body[key].is_string()) throw SchemaViolation(key, "required string");
  return body[key].get<std::string>();
}

}  // namespace

struct ReviewServer::Impl {
  ReviewService& service;
  httplib::Server server;

  explicit Impl(ReviewService& s) : service(s) {}

  const Reviewer* caller(const httplib::Request& req) const {
    const std::string auth = req.get_header_value("Authorization");
    constexpr std::string_view kPrefix = "Bearer ";
    if (auth.rfind(kPrefix, 0) != 0) return nullptr;
    return service.reviewer_by_token(std::string_view(auth).substr(kPrefix.size()));
  }

  // Wraps a handler with authentication and error mapping.
  template <typename Fn>
  httplib::Server::Handler guarded(Fn fn) {
    return [this, fn](const httplib::Request& req, httplib::Response& res) {
      const Reviewer* who = caller(req);
      if (who == nullptr) {
        send_error(res, 401, "Unauthorized", "missing or unknown bearer token");
        return;
      }
      try {
        fn(req, res, *who);
      } catch (const IncompleteReview& e) {
        Json body{{"error", "IncompleteReview"}, {"message", e.what()}, {"unfinalized", e.unfinalized()}};
        send_json(res, body, 409);
      } catch (const Error& e) {
        send_error(res, status_for(e.code()), to_string(e.code()), e.what());
      } catch (const std::exception& e) {
        send_error(res, 500, "Internal", e.what());
      }
    };
  }

  static void require_self(const Reviewer& who, const std::string& claimed) {
    if (claimed != who.id) {
      throw Error(ErrorCode::UnknownReviewer, "token belongs to '" + who.id + "', not '" + claimed + "'");
    }
  }

  void routes() {
    server.Get("/api/labels", guarded([](const httplib::Request&, httplib::Response& res, const Reviewer&) {
      auto out = Json::array();
      for (const auto& r : all_requirements()) {
        out.push_back({{"name", r.name}, {"references", r.references}, {"example", r.example}, {"color", r.color}});
      }
      send_json(res, out);
    }));

    server.Get("/api/policies", guarded([this](const httplib::Request&, httplib::Response& res, const Reviewer&) {
      auto out = Json::array();
      for (const auto& p : service.policies()) {
        out.push_back({{"policy_id", p.policy_id},
                       {"passages", p.passages},
                       {"finalized", p.finalized},
                       {"disputed", p.disputed}});
      }
      send_json(res, out);
    }));

    server.Get("/api/tasks/next", guarded([this](const httplib::Request& req, httplib::Response& res, const Reviewer& who) {
      const std::string id = req.has_param("reviewer") ? req.get_param_value("reviewer") : who.id;
      require_self(who, id);
      auto task = service.next_task(id);
      if (!task) {
        res.status = 204;
        return;
      }
      send_json(res, task_to_json(*task, false));
    }));

    server.Post(R"(/api/tasks/([^/]+)/review)",
                guarded([this](const httplib::Request& req, httplib::Response& res, const Reviewer& who) {
                  const std::string task_id = req.matches[1];
                  const Json body = parse_body(req);
                  const std::string reviewer_id = string_field(body, "reviewer_id");
                  require_self(who, reviewer_id);
                  if (!body.contains("annotations")) throw SchemaViolation("annotations", "required");
                  const auto text = service.task(task_id).passage.passage.text;
                  const auto set = schema::annotations_from_json(body["annotations"], "annotations", text);
                  const auto state = service.submit_review(task_id, reviewer_id, set);
                  send_json(res, {{"task_id", task_id}, {"state", to_string(state)}});
                }));

    server.Get("/api/disputes", guarded([this](const httplib::Request&, httplib::Response& res, const Reviewer& caller) {
      if (caller.role != Role::Jury) throw Error(ErrorCode::NotJury, caller.id + " is not a jury member");
      auto out = Json::array();
      for (const auto& t : service.disputes()) out.push_back(task_to_json(t, true));
      send_json(res, out);
    }));

    server.Post(R"(/api/disputes/([^/]+)/resolve)",
                guarded([this](const httplib::Request& req, httplib::Response& res, const Reviewer& who) {
                  const std::string task_id = req.matches[1];
                  const Json body = parse_body(req);
                  const std::string jury_id = string_field(body, "jury_id");
                  require_self(who, jury_id);
                  const auto decision = decision_from_string(string_field(body, "decision"));
                  if (!decision) throw SchemaViolation("decision", "expected pick_review_1, pick_review_2 or custom");
                  std::optional<AnnotationSet> custom;
                  if (*decision == Decision::Custom) {
                    if (!body.contains("annotations")) throw SchemaViolation("annotations", "required for custom");
                    const auto text = service.task(task_id).passage.passage.text;
                    custom = schema::annotations_from_json(body["annotations"], "annotations", text);
                  }
                  send_json(res, task_to_json(service.resolve_dispute(task_id, jury_id, *decision, custom), true));
                }));

    server.Get(R"(/api/export/([^/]+))",
               guarded([this](const httplib::Request& req, httplib::Response& res, const Reviewer&) {
                 const auto doc = service.export_ground_truth(req.matches[1]);
                 res.set_content(schema::serialize_policy(doc), "application/json");
               }));
  }
};

ReviewServer::ReviewServer(ReviewService& service, std::optional<std::filesystem::path> static_dir)
    : impl_(std::make_unique<Impl>(service)) {
  impl_->routes();
  if (static_dir && !impl_->server.set_mount_point("/", static_dir->string())) {
    throw ConfigError("review.static_dir", "not a directory: " + static_dir->string());
  }
}

ReviewServer::~ReviewServer() { stop(); }

int ReviewServer::bind(const std::string& host, int port) {
  if (port == 0) {
    const int bound = impl_->server.bind_to_any_port(host);
    if (bound < 0) throw Error(ErrorCode::IoError, "cannot bind " + host);
    return bound;
  }
  if (!impl_->server.bind_to_port(host, port)) {
    throw Error(ErrorCode::IoError, "cannot bind " + host + ":" + std::to_string(port));
  }
  return port;
}

void ReviewServer::listen() { impl_->server.listen_after_bind(); }

void ReviewServer::stop() {
  if (impl_ && impl_->server.is_running()) impl_->server.stop();
}

}  // namespace policylens::review
