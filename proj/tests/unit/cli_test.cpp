#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "policylens/cli/app.hpp"
#include "policylens/cli/config.hpp"
#include "policylens/cli/workspace.hpp"
#include "policylens/core/error.hpp"
#include "policylens/core/schema.hpp"
#include "policylens/review/service.hpp"

using namespace policylens;
namespace fs = std::filesystem;
using Json = nlohmann::json;

namespace {

const fs::path kHtml = fs::path(POLICYLENS_FIXTURES) / "html";

struct Result {
  int code;
  std::string out;
  std::string err;
};

Result invoke(std::vector<std::string> args) {
  args.insert(args.begin(), "policylens");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

class Cli : public ::testing::Test {
 protected:
  void SetUp() override {
    dir = fs::temp_directory_path() /
          ("policylens_cli_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir);
    fs::create_directories(dir);
  }
  void TearDown() override { fs::remove_all(dir); }

  fs::path three_policy_manifest() {
    std::ofstream m(dir / "manifest.tsv");
    m << "# three fixture policies\n";
    for (const char* name : {"acme_lists", "bistro_tables", "northwind_article"}) {
      m << name << "\thttps://example.com/" << name << "\t" << (kHtml / (std::string(name) + ".html")).string() << "\n";
    }
    return dir / "manifest.tsv";
  }

  std::string p(const char* name) const { return (dir / name).string(); }

  fs::path dir;
};

std::map<std::string, std::string> artifacts(const fs::path& root) {
  std::map<std::string, std::string> out;
  for (const auto& e : fs::recursive_directory_iterator(root)) {
    if (!e.is_regular_file() || e.path().filename() == cli::kRunManifestName) continue;
    out[fs::relative(e.path(), root).string()] = cli::read_file(e.path());
  }
  return out;
}

}  // namespace

TEST_F(Cli, PreprocessThreeFixtures) {
  const auto r = invoke({"preprocess", "--input", three_policy_manifest().string(), "--output", p("pre")});
  ASSERT_EQ(r.code, 0) << r.err;
  for (const char* name : {"acme_lists", "bistro_tables", "northwind_article"}) {
    const auto doc = schema::parse_policy(cli::read_file(dir / "pre" / (std::string(name) + ".json")), name);
    EXPECT_FALSE(doc.passages.empty()) << name;
  }
  EXPECT_TRUE(fs::exists(dir / "pre" / "rejections.jsonl"));
  EXPECT_EQ(cli::read_file(dir / "pre" / "rejections.jsonl"), "");
  EXPECT_FALSE(fs::exists(dir / "pre" / std::string(cli::kLockName)));
  const auto manifest = Json::parse(cli::read_file(dir / "pre" / "run_manifest.json"));
  ASSERT_EQ(manifest["runs"].size(), 1u);
  EXPECT_EQ(manifest["runs"][0]["stage"], "preprocess");
  EXPECT_EQ(manifest["runs"][0]["counts"]["documents_out"], 3);
}

TEST_F(Cli, RejectionLogForFixtureDirectory) {
  const auto r = invoke({"preprocess", "--input", kHtml.string(), "--output", p("pre")});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto log = cli::read_file(dir / "pre" / "rejections.jsonl");
  EXPECT_NE(log.find(R"("doc_id":"not_found","stage":"main_content")"), std::string::npos);
  EXPECT_NE(log.find(R"("doc_id":"german_policy","stage":"language")"), std::string::npos);
  EXPECT_NE(log.find(R"("doc_id":"acme_lists_mirror","stage":"duplicate")"), std::string::npos);
}

TEST_F(Cli, ChainIsByteIdenticalAcrossRuns) {
  const auto manifest = three_policy_manifest().string();
  for (const char* run : {"a", "b"}) {
    const fs::path root = dir / run;
    ASSERT_EQ(invoke({"preprocess", "--input", manifest, "--output", (root / "pre").string()}).code, 0);
    ASSERT_EQ(invoke({"annotate", "--mock", "--input", (root / "pre").string(), "--output", (root / "ann").string()}).code, 0);
    ASSERT_EQ(invoke({"correct", "--mock", "--input", (root / "ann").string(), "--output", (root / "cor").string()}).code, 0);
  }
  const auto a = artifacts(dir / "a");
  EXPECT_EQ(a.count("cor/acme_lists.json"), 1u);
  EXPECT_EQ(a.count("ann/runs.jsonl"), 1u);
  EXPECT_EQ(a, artifacts(dir / "b"));

  std::size_t annotations = 0;
  for (const auto& doc : cli::load_policy_dir(dir / "a" / "cor")) {
    for (const auto& passage : doc.passages) {
      for (const auto& ann : passage.annotations) {
        EXPECT_FALSE(annotation_problem(ann, passage.passage.text).has_value()) << ann.span;
        ++annotations;
      }
    }
  }
  EXPECT_GT(annotations, 0u);
}

TEST_F(Cli, EvaluateIdentityIsPerfect) {
  ASSERT_EQ(invoke({"preprocess", "--input", three_policy_manifest().string(), "--output", p("pre")}).code, 0);
  ASSERT_EQ(invoke({"annotate", "--mock", "--input", p("pre"), "--output", p("ann")}).code, 0);
  const auto r = invoke({"evaluate", "--mock", "--input", p("ann"), "--ground-truth", p("ann"), "--output", p("eval"),
                      "--tau", "0.7"});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto report = Json::parse(cli::read_file(dir / "eval" / "report.json"));
  ASSERT_EQ(report["reports"].size(), 2u);
  for (const auto& rep : report["reports"]) {
    EXPECT_DOUBLE_EQ(rep["overall"]["precision"].get<double>(), 1.0);
    EXPECT_DOUBLE_EQ(rep["overall"]["recall"].get<double>(), 1.0);
    EXPECT_DOUBLE_EQ(rep["overall"]["f1"].get<double>(), 1.0);
  }
  EXPECT_DOUBLE_EQ(report["reports"][1]["tau"].get<double>(), 0.7);
}

TEST_F(Cli, MissingCredentialsExitTwoWithoutOutput) {
  ASSERT_EQ(invoke({"preprocess", "--input", three_policy_manifest().string(), "--output", p("pre")}).code, 0);
  std::ofstream(dir / "config.json") << R"({"provider": {"kind": "openai", "api_key_env": "POLICYLENS_TEST_UNSET_KEY"}})";
  const auto r = invoke({"annotate", "--config", p("config.json"), "--input", p("pre"), "--output", p("ann")});
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("provider.api_key_env"), std::string::npos);
  EXPECT_FALSE(fs::exists(dir / "ann"));
}

TEST_F(Cli, ConfigErrorsNameTheField) {
  std::ofstream(dir / "bad_key.json") << R"({"eval": {"tau": 0.5, "threshold": 1}})";
  auto r = invoke({"preprocess", "--config", p("bad_key.json"), "--input", kHtml.string(), "--output", p("x")});
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("eval.threshold"), std::string::npos);

  std::ofstream(dir / "bad_type.json") << R"({"filter": {"min_words": "fifty"}})";
  r = invoke({"preprocess", "--config", p("bad_type.json"), "--input", kHtml.string(), "--output", p("x")});
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("filter.min_words"), std::string::npos);

  r = invoke({"evaluate", "--mock", "--tau", "1.5", "--input", p("a"), "--ground-truth", p("b"), "--output", p("x")});
  EXPECT_EQ(r.code, 2);
  EXPECT_NE(r.err.find("eval.tau"), std::string::npos);

  EXPECT_EQ(invoke({"sample", "--k", "zero", "--input", p("m"), "--output", p("x")}).code, 2);
  EXPECT_EQ(invoke({"frobnicate"}).code, 2);
  EXPECT_EQ(invoke({"preprocess", "--input", kHtml.string()}).code, 2);
  EXPECT_FALSE(fs::exists(dir / "x"));
  EXPECT_EQ(invoke({"--help"}).code, 0);
}

TEST_F(Cli, ConfigFileOverridesAndSnapshot) {
  std::ofstream(dir / "c.json") << R"({"provider": {"kind": "mock"}, "sampler": {"k": 3, "seed": 9},
                                      "review": {"event_log": "events.jsonl",
                                                 "reviewers": [{"id": "a", "token": "secret"}]}})";
  const auto c = cli::load_config(dir / "c.json");
  EXPECT_EQ(c.provider.kind, "mock");
  EXPECT_EQ(*c.sampler.k, 3u);
  EXPECT_EQ(c.sampler.seed, 9u);
  EXPECT_EQ(*c.review.event_log, dir / "events.jsonl");
  EXPECT_EQ(cli::config_snapshot(c).dump().find("secret"), std::string::npos);
}

TEST_F(Cli, HardErrorsExitOne) {
  EXPECT_EQ(invoke({"preprocess", "--input", p("missing"), "--output", p("x")}).code, 1);
  fs::create_directories(dir / "locked");
  std::ofstream(dir / "locked" / std::string(cli::kLockName)) << "1\n";
  const auto r = invoke({"preprocess", "--input", kHtml.string(), "--output", p("locked")});
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.err.find("locked"), std::string::npos);
}

TEST_F(Cli, IngestAndDetect) {
  auto r = invoke({"ingest", "--input", kHtml.string(), "--output", p("ing")});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto manifest = cli::read_file(dir / "ing" / "manifest.tsv");
  EXPECT_EQ(manifest.find("acme_lists_mirror"), std::string::npos);
  EXPECT_NE(manifest.find("acme_lists\t\traw/acme_lists.html"), std::string::npos);

  r = invoke({"detect", "--mock", "--input", p("ing/manifest.tsv"), "--output", p("det")});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto verdicts = cli::read_file(dir / "det" / "verdicts.tsv");
  EXPECT_NE(verdicts.find("acme_lists\ttrue"), std::string::npos);
  EXPECT_NE(verdicts.find("not_found\tinvalid"), std::string::npos);
  // The detect output feeds preprocess directly.
  r = invoke({"preprocess", "--input", p("det/manifest.tsv"), "--output", p("pre")});
  ASSERT_EQ(r.code, 0) << r.err;
  EXPECT_TRUE(fs::exists(dir / "pre" / "acme_lists.json"));
}

TEST_F(Cli, SampleFromMatrix) {
  {
    std::ofstream m(dir / "emb.txt");
    std::ofstream ids(dir / "ids.tsv");
    for (int i = 0; i < 40; ++i) {
      const double base = i < 20 ? 0.0 : 10.0;
      m << base + 0.01 * i << " " << base - 0.02 * (i % 7) << "\n";
      ids << "doc" << i << "\t" << 100 + i * 13 << "\n";
    }
  }
  const auto r = invoke({"sample", "--input", p("emb.txt"), "--ids", p("ids.tsv"), "--k", "2", "--sample-size", "10",
                      "--seed", "5", "--output", p("s")});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto clusters = Json::parse(cli::read_file(dir / "s" / "clusters.json"));
  EXPECT_EQ(clusters["k"], 2);
  std::size_t seats = 0;
  for (const auto& c : clusters["clusters"]) seats += c["allocation"].get<std::size_t>();
  EXPECT_EQ(seats, 10u);
  const auto sample = cli::read_file(dir / "s" / "sample.tsv");
  EXPECT_EQ(std::count(sample.begin(), sample.end(), '\n'), 10);

  const auto again = invoke({"sample", "--input", p("emb.txt"), "--ids", p("ids.tsv"), "--k", "2", "--sample-size",
                          "10", "--seed", "5", "--output", p("s2")});
  ASSERT_EQ(again.code, 0);
  EXPECT_EQ(artifacts(dir / "s"), artifacts(dir / "s2"));
  EXPECT_EQ(invoke({"sample", "--input", p("emb.txt"), "--output", p("s3")}).code, 2);  // --ids missing
}

TEST_F(Cli, ExportFromEventLog) {
  ASSERT_EQ(invoke({"preprocess", "--input", three_policy_manifest().string(), "--output", p("pre")}).code, 0);
  ASSERT_EQ(invoke({"annotate", "--mock", "--input", p("pre"), "--output", p("ann")}).code, 0);
  const auto docs = cli::load_policy_dir(dir / "ann");
  {
    review::ServiceConfig sc;
    sc.reviewers = {{"a", review::Role::Reviewer, ""}, {"b", review::Role::Reviewer, ""}};
    sc.event_log = dir / "events.jsonl";
    review::ReviewService s(docs, sc);
    for (std::size_t i = 0; i < docs[1].passages.size(); ++i) {
      const auto id = review::task_id_for(docs[1].policy_id, i);
      s.submit_review(id, "a", docs[1].passages[i].annotations);
      s.submit_review(id, "b", docs[1].passages[i].annotations);
    }
  }
  auto r = invoke({"export", "--input", p("ann"), "--events", p("events.jsonl"), "--output", p("gt")});
  EXPECT_EQ(r.code, 1);
  EXPECT_NE(r.err.find("IncompleteReview"), std::string::npos);
  r = invoke({"export", "--input", p("ann"), "--events", p("events.jsonl"), "--policy", docs[1].policy_id, "--output",
           p("gt2")});
  ASSERT_EQ(r.code, 0) << r.err;
  const auto exported = schema::parse_policy(cli::read_file(dir / "gt2" / (docs[1].policy_id + ".json")));
  ASSERT_EQ(exported.passages.size(), docs[1].passages.size());
  for (std::size_t i = 0; i < exported.passages.size(); ++i) EXPECT_EQ(exported.passages[i], docs[1].passages[i]);
}
