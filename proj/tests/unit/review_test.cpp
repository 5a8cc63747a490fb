#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>
#include <thread>

#include <httplib.h>

#include "policylens/core/error.hpp"
#include "policylens/core/schema.hpp"
#include "policylens/review/server.hpp"
#include "policylens/review/service.hpp"

using namespace policylens;
using namespace policylens::review;
using R = Requirement;
using Json = nlohmann::ordered_json;

namespace {

PolicyDocument fixture() {
  std::ifstream in(std::string(POLICYLENS_FIXTURES) + "/policies/sunnyapps.json");
  std::stringstream ss;
  ss << in.rdbuf();
  return schema::parse_policy(ss.str(), "sunnyapps");
}

struct FakeClock {
  std::chrono::system_clock::time_point now{std::chrono::seconds(1'700'000'000)};
  Clock fn() {
    return [this] { return now; };
  }
};

ServiceConfig config(FakeClock& clock, std::optional<std::filesystem::path> log = std::nullopt) {
  ServiceConfig c;
  c.reviewers = {{"alice", Role::Reviewer, "tok-alice"},
                 {"bob", Role::Reviewer, "tok-bob"},
                 {"carol", Role::Reviewer, "tok-carol"},
                 {"judge", Role::Jury, "tok-judge"}};
  c.event_log = std::move(log);
  c.clock = clock.fn();
  return c;
}

Annotation ann(std::string span, R r, bool performed = true) { return {std::move(span), r, performed}; }

std::filesystem::path temp_dir(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() / ("policylens_review_" + name);
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

template <typename Fn>
ErrorCode code_of(Fn fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no error thrown";
  return ErrorCode::IoError;
}

}  // namespace

TEST(ReviewDiff, OneLabelChange) {
  const AnnotationSet a{ann("your name", R::DataCategories), ann("for 6 months", R::RetentionPeriod)};
  const AnnotationSet b{ann("your name", R::DataCategories), ann("for 6 months", R::ProcessingPurpose)};
  const auto d = diff_reviews(a, b);
  EXPECT_EQ(d.only_in_1, (AnnotationSet{ann("for 6 months", R::RetentionPeriod)}));
  EXPECT_EQ(d.only_in_2, (AnnotationSet{ann("for 6 months", R::ProcessingPurpose)}));
  EXPECT_EQ(d.common, (AnnotationSet{ann("your name", R::DataCategories)}));
}

TEST(ReviewService, NextTaskOrderingAndDistinctness) {
  FakeClock clock;
  ReviewService s({fixture()}, config(clock));
  const auto first = s.next_task("alice");
  ASSERT_TRUE(first);
  EXPECT_EQ(first->task_id, "sunnyapps~0");
  EXPECT_EQ(first->state, TaskState::Pending);
  // A live lease hands back the same task.
  EXPECT_EQ(s.next_task("alice")->task_id, "sunnyapps~0");

  const auto llm = first->passage.annotations;
  s.submit_review("sunnyapps~0", "alice", llm);
  EXPECT_EQ(s.next_task("alice")->task_id, "sunnyapps~1");
  const auto for_bob = s.next_task("bob");
  ASSERT_TRUE(for_bob);
  EXPECT_EQ(for_bob->task_id, "sunnyapps~0");
  EXPECT_TRUE(for_bob->reviews.empty());  // blind
  EXPECT_EQ(code_of([&] { s.next_task("mallory"); }), ErrorCode::UnknownReviewer);
}

TEST(ReviewService, LeasesLimitConcurrentReviewersAndExpire) {
  FakeClock clock;
  ReviewService s({fixture()}, config(clock));
  EXPECT_EQ(s.next_task("alice")->task_id, "sunnyapps~0");
  EXPECT_EQ(s.next_task("bob")->task_id, "sunnyapps~0");
  // Two slots are leased; carol moves on.
  EXPECT_EQ(s.next_task("carol")->task_id, "sunnyapps~1");
  clock.now += std::chrono::minutes(31);
  // Bob's lease lapsed, carol's too; carol re-leases the first open slot.
  EXPECT_EQ(s.next_task("carol")->task_id, "sunnyapps~0");
}

TEST(ReviewService, IdenticalReviewsAutoFinalize) {
  FakeClock clock;
  ReviewService s({fixture()}, config(clock));
  const AnnotationSet a{ann("your name", R::DataCategories), ann("e-mail address", R::DataCategories)};
  const AnnotationSet b{ann("e-mail address", R::DataCategories), ann("your name", R::DataCategories)};
  EXPECT_EQ(s.submit_review("sunnyapps~1", "alice", a), TaskState::OneReview);
  EXPECT_EQ(s.submit_review("sunnyapps~1", "bob", b), TaskState::Finalized);
  const auto t = s.task("sunnyapps~1");
  EXPECT_EQ(t.resolution, Resolution::Agreement);
  EXPECT_EQ(*t.final, a);
  EXPECT_EQ(code_of([&] { s.submit_review("sunnyapps~1", "carol", a); }), ErrorCode::TaskFinalized);
  EXPECT_EQ(code_of([&] { s.resolve_dispute("sunnyapps~1", "judge", Decision::PickReview1); }),
            ErrorCode::NotDisputed);
}

TEST(ReviewService, SubmissionGuards) {
  FakeClock clock;
  ReviewService s({fixture()}, config(clock));
  s.submit_review("sunnyapps~0", "alice", {});
  EXPECT_EQ(code_of([&] { s.submit_review("sunnyapps~0", "alice", {}); }), ErrorCode::AlreadyReviewed);
  EXPECT_EQ(code_of([&] { s.submit_review("sunnyapps~0", "bob", {ann("Acme", R::ControllerName)}); }),
            ErrorCode::InvalidAnnotation);
  EXPECT_EQ(code_of([&] { s.submit_review("nope~0", "bob", {}); }), ErrorCode::UnknownTask);
  s.submit_review("sunnyapps~0", "bob", {ann("SunnyApps Ltd", R::ControllerName)});
  EXPECT_EQ(s.task("sunnyapps~0").state, TaskState::Disputed);
  EXPECT_EQ(code_of([&] { s.submit_review("sunnyapps~0", "carol", {}); }), ErrorCode::ReviewsComplete);
}

TEST(ReviewService, JuryGuards) {
  FakeClock clock;
  ReviewService s({fixture()}, config(clock));
  s.submit_review("sunnyapps~2", "judge", {});
  s.submit_review("sunnyapps~2", "alice", {ann("ask us to delete your data", R::RightToErasure)});
  EXPECT_EQ(code_of([&] { s.resolve_dispute("sunnyapps~2", "bob", Decision::PickReview1); }), ErrorCode::NotJury);
  EXPECT_EQ(code_of([&] { s.resolve_dispute("sunnyapps~2", "judge", Decision::PickReview1); }),
            ErrorCode::ConflictOfInterest);
}

TEST(ReviewService, PickAndCustomResolution) {
  FakeClock clock;
  auto c = config(clock);
  c.reviewers.push_back({"judge2", Role::Jury, ""});
  ReviewService s({fixture()}, c);
  const AnnotationSet r1{ann("SunnyApps Ltd", R::ControllerName)};
  s.submit_review("sunnyapps~0", "alice", r1);
  s.submit_review("sunnyapps~0", "bob", {});
  EXPECT_EQ(*s.resolve_dispute("sunnyapps~0", "judge", Decision::PickReview1).final, r1);

  const AnnotationSet custom{ann("delete your data", R::RightToErasure),
                             ann("complain to the supervisory authority", R::RightToLodgeComplaint)};
  s.submit_review("sunnyapps~2", "alice", {});
  s.submit_review("sunnyapps~2", "bob", {ann("ask us to delete your data", R::RightToErasure)});
  EXPECT_EQ(code_of([&] {
              s.resolve_dispute("sunnyapps~2", "judge", Decision::Custom, AnnotationSet{ann("nowhere", R::RightToObject)});
            }),
            ErrorCode::InvalidAnnotation);
  const auto done = s.resolve_dispute("sunnyapps~2", "judge2", Decision::Custom, custom);
  EXPECT_EQ(done.state, TaskState::Finalized);
  EXPECT_EQ(done.resolution, Resolution::Jury);
  EXPECT_EQ(*done.jury_id, "judge2");
  EXPECT_EQ(*done.final, custom);
}

TEST(ReviewService, ExportRequiresEveryPassage) {
  FakeClock clock;
  ReviewService s({fixture()}, config(clock));
  const auto doc = fixture();
  for (std::size_t i = 0; i < 2; ++i) {
    const auto id = task_id_for("sunnyapps", i);
    s.submit_review(id, "alice", doc.passages[i].annotations);
    s.submit_review(id, "bob", doc.passages[i].annotations);
  }
  try {
    s.export_ground_truth("sunnyapps");
    FAIL() << "expected IncompleteReview";
  } catch (const IncompleteReview& e) {
    EXPECT_EQ(e.unfinalized(), std::vector<std::string>{"sunnyapps~2"});
  }
  s.submit_review("sunnyapps~2", "alice", doc.passages[2].annotations);
  s.submit_review("sunnyapps~2", "bob", doc.passages[2].annotations);
  const auto exported = s.export_ground_truth("sunnyapps");
  ASSERT_EQ(exported.passages.size(), 3u);
  for (std::size_t i = 0; i < 3; ++i) EXPECT_EQ(exported.passages[i], doc.passages[i]);
  EXPECT_EQ(code_of([&] { s.export_ground_truth("other"); }), ErrorCode::UnknownPolicy);
}

TEST(ReviewService, ReplayReconstructsState) {
  const auto dir = temp_dir("replay");
  const auto log = dir / "events.jsonl";
  FakeClock clock;
  Json before;
  {
    ReviewService s({fixture()}, config(clock, log));
    s.submit_review("sunnyapps~0", "alice", {ann("SunnyApps Ltd", R::ControllerName)});
    clock.now += std::chrono::minutes(3);
    s.submit_review("sunnyapps~0", "bob", {ann("SunnyApps Ltd", R::ControllerName)});
    s.submit_review("sunnyapps~1", "alice", {ann("your name", R::DataCategories)});
    s.submit_review("sunnyapps~1", "carol", {ann("your name", R::SourceOfData)});
    s.resolve_dispute("sunnyapps~1", "judge", Decision::PickReview2);
    s.submit_review("sunnyapps~2", "bob", {});
    before = s.snapshot();
  }
  std::ifstream in(log);
  std::vector<std::string> kinds;
  for (std::string line; std::getline(in, line);) kinds.push_back(Json::parse(line)["event"].get<std::string>());
  EXPECT_EQ(kinds, (std::vector<std::string>{"review_submitted", "review_submitted", "review_submitted",
                                             "review_submitted", "dispute_opened", "dispute_resolved",
                                             "review_submitted"}));

  FakeClock later;
  later.now += std::chrono::hours(24);
  ReviewService replayed({fixture()}, config(later, log));
  EXPECT_EQ(replayed.snapshot(), before);
  // The reopened log keeps accepting events.
  replayed.submit_review("sunnyapps~2", "alice", {});
  EXPECT_EQ(replayed.task("sunnyapps~2").state, TaskState::Finalized);
  std::filesystem::remove_all(dir);
}

TEST(ReviewService, CorruptLogIsRejected) {
  const auto dir = temp_dir("corrupt");
  std::ofstream(dir / "events.jsonl") << R"({"event":"dispute_resolved","task_id":"sunnyapps~0","jury_id":"judge","annotations":[],"timestamp":"x"})"
                                      << "\n";
  FakeClock clock;
  EXPECT_THROW(ReviewService({fixture()}, config(clock, dir / "events.jsonl")), Error);
  std::filesystem::remove_all(dir);
}

class ReviewHttp : public ::testing::Test {
 protected:
  void SetUp() override {
    service = std::make_unique<ReviewService>(std::vector<PolicyDocument>{fixture()}, config(clock));
    server = std::make_unique<ReviewServer>(*service);
    port = server->bind("127.0.0.1", 0);
    thread = std::thread([this] { server->listen(); });
    client = std::make_unique<httplib::Client>("127.0.0.1", port);
    for (int i = 0; i < 200; ++i) {
      if (client->Get("/api/labels")) break;
      std::this_thread::sleep_for(std::chrono::milliseconds(5));
    }
  }
  void TearDown() override {
    server->stop();
    thread.join();
  }

  httplib::Result get(const std::string& path, const std::string& token) {
    return client->Get(path, {{"Authorization", "Bearer " + token}});
  }
  httplib::Result post(const std::string& path, const std::string& token, const Json& body) {
    return client->Post(path, {{"Authorization", "Bearer " + token}}, body.dump(), "application/json");
  }

  FakeClock clock;
  std::unique_ptr<ReviewService> service;
  std::unique_ptr<ReviewServer> server;
  std::unique_ptr<httplib::Client> client;
  std::thread thread;
  int port = 0;
};

TEST_F(ReviewHttp, AuthAndLabels) {
  auto res = client->Get("/api/labels");
  ASSERT_TRUE(res);
  EXPECT_EQ(res->status, 401);
  res = get("/api/labels", "bogus");
  EXPECT_EQ(res->status, 401);
  res = get("/api/labels", "tok-alice");
  ASSERT_EQ(res->status, 200);
  const auto labels = Json::parse(res->body);
  ASSERT_EQ(labels.size(), 21u);
  EXPECT_EQ(labels[0]["name"], "Controller Name");
  EXPECT_EQ(labels[0]["references"], "13(1)(a), 14(1)(a)");
  EXPECT_TRUE(labels[0]["color"].get<std::string>().starts_with("#"));
  // Identity must match the token.
  EXPECT_EQ(get("/api/tasks/next?reviewer=bob", "tok-alice")->status, 403);
}

TEST_F(ReviewHttp, FullCurationRound) {
  auto res = get("/api/policies", "tok-alice");
  ASSERT_EQ(res->status, 200);
  EXPECT_EQ(Json::parse(res->body)[0]["passages"], 3);

  res = get("/api/tasks/next?reviewer=alice", "tok-alice");
  ASSERT_EQ(res->status, 200);
  auto task = Json::parse(res->body);
  EXPECT_EQ(task["task_id"], "sunnyapps~0");
  EXPECT_FALSE(task.contains("reviews"));

  const auto llm = fixture();
  for (std::size_t i = 0; i < 3; ++i) {
    const auto id = task_id_for("sunnyapps", i);
    const Json same = schema::annotations_to_json(llm.passages[i].annotations);
    res = post("/api/tasks/" + id + "/review", "tok-alice", {{"reviewer_id", "alice"}, {"annotations", same}});
    ASSERT_EQ(res->status, 200) << res->body;
    EXPECT_EQ(Json::parse(res->body)["state"], "one_review");
    Json second = same;
    if (i == 2) second[0]["requirement"] = "Right to Object";
    res = post("/api/tasks/" + id + "/review", "tok-bob", {{"reviewer_id", "bob"}, {"annotations", second}});
    ASSERT_EQ(res->status, 200) << res->body;
    EXPECT_EQ(Json::parse(res->body)["state"], i == 2 ? "disputed" : "finalized");
  }
  EXPECT_EQ(get("/api/tasks/next?reviewer=alice", "tok-alice")->status, 204);

  res = get("/api/export/sunnyapps", "tok-judge");
  EXPECT_EQ(res->status, 409);
  EXPECT_EQ(Json::parse(res->body)["unfinalized"], Json::array({"sunnyapps~2"}));

  EXPECT_EQ(get("/api/disputes", "tok-alice")->status, 403);
  res = get("/api/disputes", "tok-judge");
  const auto disputes = Json::parse(res->body);
  ASSERT_EQ(disputes.size(), 1u);
  EXPECT_EQ(disputes[0]["diff"]["only_in_1"].size(), 1u);
  EXPECT_EQ(disputes[0]["diff"]["only_in_2"].size(), 1u);
  EXPECT_EQ(disputes[0]["diff"]["only_in_2"][0]["requirement"], "Right to Object");

  const Json jury_set = Json::array({{{"requirement", "Right to Lodge Complaint"},
                                      {"value", "complain to the supervisory authority"},
                                      {"performed", true}}});
  res = post("/api/disputes/sunnyapps~2/resolve", "tok-alice",
             {{"jury_id", "alice"}, {"decision", "pick_review_1"}});
  EXPECT_EQ(res->status, 403);
  res = post("/api/disputes/sunnyapps~2/resolve", "tok-judge",
             {{"jury_id", "judge"}, {"decision", "custom"}, {"annotations", jury_set}});
  ASSERT_EQ(res->status, 200) << res->body;

  res = get("/api/export/sunnyapps", "tok-judge");
  ASSERT_EQ(res->status, 200);
  const auto exported = schema::parse_policy(res->body, "sunnyapps");
  EXPECT_EQ(exported.passages[2].annotations,
            (AnnotationSet{ann("complain to the supervisory authority", R::RightToLodgeComplaint)}));
  EXPECT_EQ(exported.passages[0].annotations, llm.passages[0].annotations);
}

TEST_F(ReviewHttp, ErrorMapping) {
  auto res = post("/api/tasks/sunnyapps~0/review", "tok-alice",
                  {{"reviewer_id", "alice"},
                   {"annotations", Json::array({{{"requirement", "Controller Name"}, {"value", "Acme"}, {"performed", true}}})}});
  EXPECT_EQ(res->status, 400);
  EXPECT_EQ(Json::parse(res->body)["error"], "SchemaViolation");
  res = post("/api/tasks/missing~0/review", "tok-alice", {{"reviewer_id", "alice"}, {"annotations", Json::array()}});
  EXPECT_EQ(res->status, 404);
  res = client->Post("/api/tasks/sunnyapps~0/review", {{"Authorization", "Bearer tok-alice"}}, "not json",
                     "application/json");
  EXPECT_EQ(res->status, 400);
  res = post("/api/disputes/sunnyapps~0/resolve", "tok-judge", {{"jury_id", "judge"}, {"decision", "pick_review_1"}});
  EXPECT_EQ(res->status, 409);
  res = post("/api/disputes/sunnyapps~0/resolve", "tok-judge", {{"jury_id", "judge"}, {"decision", "flip"}});
  EXPECT_EQ(res->status, 400);
  EXPECT_EQ(get("/api/export/nobody", "tok-judge")->status, 404);
}

TEST(ReviewStatic, MountsBundle) {
  const auto dir = temp_dir("static");
  std::ofstream(dir / "index.html") << "<html>review</html>";
  FakeClock clock;
  ReviewService s({fixture()}, config(clock));
  ReviewServer server(s, dir);
  const int port = server.bind("127.0.0.1", 0);
  std::thread t([&] { server.listen(); });
  httplib::Client c("127.0.0.1", port);
  httplib::Result res;
  for (int i = 0; i < 200 && !(res = c.Get("/index.html")); ++i) std::this_thread::sleep_for(std::chrono::milliseconds(5));
  ASSERT_TRUE(res);
  EXPECT_EQ(res->status, 200);
  EXPECT_EQ(res->body, "<html>review</html>");
  server.stop();
  t.join();
  EXPECT_THROW(ReviewServer(s, dir / "missing"), ConfigError);
  std::filesystem::remove_all(dir);
}
