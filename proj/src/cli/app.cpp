#include "policylens/cli/app.hpp"

#include <atomic>
#include <chrono>
#include <csignal>
#include <map>
#include <sstream>

#include <CLI11.hpp>

#include "policylens/annotate/pipeline.hpp"
#include "policylens/cli/config.hpp"
#include "policylens/cli/workspace.hpp"
#include "policylens/core/error.hpp"
#include "policylens/core/schema.hpp"
#include "policylens/evaluate/report.hpp"
#include "policylens/html/dom.hpp"
#include "policylens/preprocess/dedup.hpp"
#include "policylens/preprocess/detector.hpp"
#include "policylens/preprocess/filters.hpp"
#include "policylens/preprocess/main_content.hpp"
#include "policylens/preprocess/pipeline.hpp"
#include "policylens/review/server.hpp"
#include "policylens/sampler/matrix.hpp"
#include "policylens/util/hash.hpp"
#include "policylens/util/parallel.hpp"
#include "policylens/util/text.hpp"

namespace policylens::cli {

namespace {

namespace fs = std::filesystem;
using Json = nlohmann::ordered_json;

struct Options {
  std::string command;
  std::string config;
  std::string input;
  std::string output;
  std::optional<double> tau;
  std::optional<std::uint64_t> seed;
  std::string k;
  std::optional<std::size_t> sample_size;
  std::string provider;
  bool mock = false;
  // subcommand specific
  std::string ground_truth;
  std::string ids;
  std::string layer = "annotation";
  std::string events;
  std::string policy;
  std::string host;
  int port = -1;
};

Config effective_config(const Options& o) {
  Config c = o.config.empty() ? Config{} : load_config(o.config);
  if (o.tau) c.eval.tau = *o.tau;
  if (o.seed) c.sampler.seed = *o.seed;
  if (!o.k.empty()) {
    if (o.k == "auto") {
      c.sampler.k.reset();
    } else {
      std::size_t pos = 0;
      long long v = 0;
      try {
        v = std::stoll(o.k, &pos);
      } catch (const std::exception&) {
        pos = 0;
      }
      if (pos != o.k.size() || v < 1) throw ConfigError("--k", "expected a positive integer or \"auto\"");
      c.sampler.k = static_cast<std::size_t>(v);
    }
  }
  if (o.sample_size) c.sampler.sample_size = *o.sample_size;
  if (!o.provider.empty()) c.provider.kind = o.provider;
  if (o.mock) c.provider.kind = "mock";
  c.validate();
  return c;
}

void require(const std::string& value, const char* flag) {
  if (value.empty()) throw ConfigError(flag, "required");
}

std::string run_id(const Options& o, const Json& snapshot) {
  return hash::sha256_hex(o.command + "\n" + o.input + "\n" + snapshot.dump()).substr(0, 16);
}

// Timing and stage record appended to the output's run manifest.
class Stage {
 public:
  Stage(const Options& o, const Config& c)
      : options_(o), snapshot_(config_snapshot(c)), start_(std::chrono::steady_clock::now()) {}

  Json& counts() { return counts_; }

  void commit(const fs::path& dir) {
    const double seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
    Json entry;
    entry["stage"] = options_.command;
    entry["run_id"] = run_id(options_, snapshot_);
    entry["input"] = options_.input;
    entry["config"] = snapshot_;
    entry["counts"] = counts_;
    entry["seconds"] = seconds;
    append_run_entry(dir, std::move(entry));
  }

 private:
  const Options& options_;
  Json snapshot_;
  Json counts_ = Json::object();
  std::chrono::steady_clock::time_point start_;
};

Json tally(const std::vector<preprocess::RejectionRecord>& rejected) {
  std::map<std::string, std::size_t> by_stage;
  for (const auto& r : rejected) ++by_stage[std::string(preprocess::to_string(r.stage))];
  Json out = Json::object();
  for (const auto& [stage, n] : by_stage) out[stage] = n;
  return out;
}

std::string rejection_log(const std::vector<preprocess::RejectionRecord>& rejected) {
  std::string out;
  for (const auto& r : rejected) out += preprocess::to_json_line(r) + "\n";
  return out;
}

// Copies raw documents under dir/raw and writes a manifest that load_input reads back.
void write_raw_corpus(const fs::path& dir, const std::vector<preprocess::RawDocument>& docs) {
  std::string manifest;
  for (const auto& d : docs) {
    check_file_stem(d.doc_id);
    const std::string rel = "raw/" + d.doc_id + ".html";
    write_file(dir / rel, d.bytes);
    manifest += d.doc_id + "\t" + d.url.value_or("") + "\t" + rel + "\n";
  }
  write_file(dir / "manifest.tsv", manifest);
}

void write_documents(const fs::path& dir, const std::vector<PolicyDocument>& docs) {
  for (const auto& d : docs) {
    check_file_stem(d.policy_id);
    write_file(dir / (d.policy_id + ".json"), schema::serialize_policy(d));
  }
}

std::size_t passage_count(const std::vector<PolicyDocument>& docs) {
  std::size_t n = 0;
  for (const auto& d : docs) n += d.passages.size();
  return n;
}

int cmd_ingest(const Options& o, const Config& c, std::ostream& out) {
  require(o.input, "--input");
  require(o.output, "--output");
  Stage stage(o, c);
  const auto docs = preprocess::load_input(o.input);
  WorkspaceLock lock(o.output);
  preprocess::DedupResult d;
  if (c.filter.dedup_enabled) {
    d = preprocess::dedup_corpus(docs, c.filter.min_words);
  } else {
    d.unique = docs;
  }
  write_raw_corpus(o.output, d.unique);
  write_file(fs::path(o.output) / "rejections.jsonl", rejection_log(d.rejected));
  stage.counts() = {{"documents_in", docs.size()}, {"documents_out", d.unique.size()}, {"rejected", tally(d.rejected)}};
  stage.commit(o.output);
  out << "ingest: " << d.unique.size() << " of " << docs.size() << " documents kept\n";
  return kExitOk;
}

int cmd_detect(const Options& o, const Config& c, std::ostream& out) {
  require(o.input, "--input");
  require(o.output, "--output");
  const auto chat = make_chat_provider(c.provider);
  Stage stage(o, c);
  const auto docs = preprocess::load_input(o.input);
  WorkspaceLock lock(o.output);

  std::vector<std::string> verdicts(docs.size());
  util::parallel_for(docs.size(), c.concurrency, [&](std::size_t i) {
    std::string main_text;
    try {
      main_text = html::visible_text(preprocess::isolate_main_content(docs[i].bytes, c.filter.min_words));
    } catch (const Error& e) {
      if (e.code() != ErrorCode::InvalidDocument) throw;
      verdicts[i] = "invalid";
      return;
    }
    verdicts[i] = std::string(preprocess::to_string(preprocess::detect_privacy_policy(main_text, *chat)));
  });

  std::vector<preprocess::RawDocument> kept;
  std::vector<preprocess::RejectionRecord> rejected;
  std::string table;
  for (std::size_t i = 0; i < docs.size(); ++i) {
    table += docs[i].doc_id + "\t" + verdicts[i] + "\n";
    if (verdicts[i] == "true") {
      kept.push_back(docs[i]);
    } else if (verdicts[i] == "invalid") {
      rejected.push_back({docs[i].doc_id, preprocess::RejectionStage::MainContent, "no main content"});
    } else {
      rejected.push_back({docs[i].doc_id, preprocess::RejectionStage::Detector, "detector answered " + verdicts[i]});
    }
  }
  write_raw_corpus(o.output, kept);
  write_file(fs::path(o.output) / "verdicts.tsv", table);
  write_file(fs::path(o.output) / "rejections.jsonl", rejection_log(rejected));
  stage.counts() = {{"documents_in", docs.size()}, {"documents_out", kept.size()}, {"rejected", tally(rejected)},
                    {"provider", chat->describe()}};
  stage.commit(o.output);
  out << "detect: " << kept.size() << " of " << docs.size() << " documents are privacy policies\n";
  return kExitOk;
}

int cmd_preprocess(const Options& o, const Config& c, std::ostream& out) {
  require(o.input, "--input");
  require(o.output, "--output");
  Stage stage(o, c);
  const auto docs = preprocess::load_input(o.input);
  WorkspaceLock lock(o.output);
  preprocess::PipelineOptions options{c.filter, false, c.concurrency};
  const auto result = preprocess::run_pipeline(docs, options, preprocess::StopwordLanguageIdentifier{}, nullptr);
  write_documents(o.output, result.documents);
  write_file(fs::path(o.output) / "rejections.jsonl", rejection_log(result.rejected));
  stage.counts() = {{"documents_in", docs.size()},
                    {"documents_out", result.documents.size()},
                    {"passages", passage_count(result.documents)},
                    {"rejected", tally(result.rejected)}};
  stage.commit(o.output);
  out << "preprocess: " << result.documents.size() << " documents, " << result.rejected.size() << " rejected\n";
  return kExitOk;
}

int cmd_layer(const Options& o, const Config& c, annotate::Layer layer, std::ostream& out) {
  require(o.input, "--input");
  require(o.output, "--output");
  const auto chat = make_chat_provider(c.provider);
  Stage stage(o, c);
  const auto docs = load_policy_dir(o.input);
  WorkspaceLock lock(o.output);

  std::vector<PolicyDocument> results;
  std::ostringstream records;
  annotate::RunRecordSink sink(records);
  std::map<std::string, std::size_t> outcomes{{"ok", 0}, {"repaired", 0}, {"failed", 0}};
  std::size_t annotations = 0;
  std::size_t dropped = 0;
  for (const auto& doc : docs) {
    auto run = annotate::run_layers(doc, {layer}, *chat, c.concurrency);
    sink.write(run.records);
    for (const auto& r : run.records) {
      ++outcomes[std::string(annotate::to_string(r.outcome))];
      dropped += r.dropped.size();
    }
    for (const auto& p : run.document.passages) annotations += p.annotations.size();
    results.push_back(std::move(run.document));
  }
  write_documents(o.output, results);
  write_file(fs::path(o.output) / "runs.jsonl", records.str());
  Json outcome_counts = Json::object();
  for (const auto& [k, v] : outcomes) outcome_counts[k] = v;
  stage.counts() = {{"documents", docs.size()},       {"passages", passage_count(results)},
                    {"annotations", annotations},     {"dropped_items", dropped},
                    {"outcomes", outcome_counts},     {"provider", chat->describe()}};
  stage.commit(o.output);
  out << o.command << ": " << annotations << " annotations over " << passage_count(results) << " passages ("
      << outcomes["failed"] << " failed)\n";
  return kExitOk;
}

Json clusters_json(const sampler::SampleResult& r, std::size_t population) {
  Json j;
  j["population"] = population;
  j["k"] = r.k;
  if (r.elbow) {
    auto curve = Json::array();
    for (const auto& [k, inertia] : r.elbow->curve) curve.push_back({{"k", k}, {"inertia", inertia}});
    j["elbow"] = {{"k", r.elbow->k}, {"flagged", r.elbow->flagged}, {"note", r.elbow->note}, {"curve", curve}};
  }
  auto clusters = Json::array();
  for (const auto& s : r.clusters) {
    clusters.push_back({{"cluster_id", s.cluster_id},
                        {"n", s.n},
                        {"entropy", s.entropy},
                        {"variance", s.variance},
                        {"weight", s.weight},
                        {"allocation", s.allocation}});
  }
  j["clusters"] = std::move(clusters);
  return j;
}

int cmd_sample(const Options& o, const Config& c, std::ostream& out) {
  require(o.input, "--input");
  require(o.output, "--output");
  const bool from_documents = fs::is_directory(o.input);
  std::unique_ptr<llm::EmbeddingProvider> embedder;
  if (from_documents) {
    embedder = make_embedding_provider(c.provider);
  } else {
    require(o.ids, "--ids");
  }
  Stage stage(o, c);

  sampler::Matrix embeddings;
  std::vector<sampler::ManifestEntry> entries;
  if (from_documents) {
    const auto docs = load_policy_dir(o.input);
    std::vector<std::string> texts;
    for (const auto& d : docs) {
      std::string text;
      for (const auto& p : d.passages) text += (text.empty() ? "" : "\n") + p.passage.text;
      entries.push_back({d.policy_id, text::word_count(text)});
      texts.push_back(std::move(text));
    }
    std::vector<llm::EmbeddingVector> vectors(texts.size());
    util::parallel_for(texts.size(), c.concurrency, [&](std::size_t i) { vectors[i] = embedder->embed(texts[i]); });
    embeddings = sampler::Matrix(vectors.size(), vectors.empty() ? 0 : vectors.front().dimension());
    for (std::size_t i = 0; i < vectors.size(); ++i) {
      std::copy(vectors[i].values.begin(), vectors[i].values.end(), embeddings.row(i).begin());
    }
  } else {
    embeddings = sampler::read_matrix(o.input);
    entries = sampler::read_id_manifest(o.ids);
  }
  std::vector<sampler::Member> members;
  for (const auto& e : entries) members.push_back({e.id, e.word_count});
  const auto result = sampler::run_sampler(embeddings, members, c.sampler);

  WorkspaceLock lock(o.output);
  const fs::path dir(o.output);
  if (from_documents) {
    sampler::write_matrix(dir / "embeddings.txt", embeddings);
    sampler::write_id_manifest(dir / "ids.tsv", entries);
  }
  write_file(dir / "clusters.json", clusters_json(result, members.size()).dump(2) + "\n");
  std::map<std::string, std::size_t> cluster_of;
  for (std::size_t i = 0; i < members.size(); ++i) cluster_of[members[i].id] = result.assignments[i];
  std::string sample;
  for (const auto& id : result.selected) sample += id + "\t" + std::to_string(cluster_of[id]) + "\n";
  write_file(dir / "sample.tsv", sample);
  stage.counts() = {{"population", members.size()}, {"k", result.k}, {"selected", result.selected.size()}};
  stage.commit(o.output);
  out << "sample: k=" << result.k << (result.elbow && result.elbow->flagged ? " (no clear elbow)" : "") << ", "
      << result.selected.size() << " of " << members.size() << " documents selected\n";
  return kExitOk;
}

int cmd_evaluate(const Options& o, const Config& c, std::ostream& out) {
  require(o.input, "--input");
  require(o.output, "--output");
  require(o.ground_truth, "--ground-truth");
  const auto embedder = make_embedding_provider(c.provider);
  Stage stage(o, c);
  const auto predicted = load_policy_dir(o.input);
  std::map<std::string, PolicyDocument> truth;
  for (auto& d : load_policy_dir(o.ground_truth)) truth.emplace(d.policy_id, std::move(d));

  std::vector<evaluate::PassagePair> pairs;
  for (const auto& p : predicted) {
    auto it = truth.find(p.policy_id);
    if (it == truth.end()) throw Error(ErrorCode::IoError, "no ground truth for policy '" + p.policy_id + "'");
    auto aligned = evaluate::align(p, it->second);
    pairs.insert(pairs.end(), std::make_move_iterator(aligned.begin()), std::make_move_iterator(aligned.end()));
  }
  evaluate::EvalConfig ec;
  ec.tau = c.eval.tau;
  ec.strict_performed = c.eval.strict_performed;
  ec.embedder = embedder.get();
  ec.concurrency = c.concurrency;
  std::vector<evaluate::MetricsReport> reports{evaluate::label_metrics(pairs), evaluate::span_metrics(pairs, ec)};
  for (auto& r : reports) r.layer = o.layer;

  WorkspaceLock lock(o.output);
  const fs::path dir(o.output);
  write_file(dir / "report.json", evaluate::reports_to_json(reports, embedder->describe()).dump(2) + "\n");
  const std::string summary = evaluate::text_summary(reports);
  write_file(dir / "report.txt", summary);
  stage.counts() = {{"documents", predicted.size()}, {"passages", pairs.size()}};
  stage.commit(o.output);
  out << summary;
  return kExitOk;
}

fs::path event_log_path(const Options& o, const Config& c) {
  if (!o.events.empty()) return o.events;
  if (c.review.event_log) return *c.review.event_log;
  if (!o.output.empty()) return fs::path(o.output) / "events.jsonl";
  throw ConfigError("review.event_log", "required (or pass --events)");
}

std::atomic<review::ReviewServer*> g_server{nullptr};

extern "C" void handle_stop(int) {
  if (auto* s = g_server.load()) s->stop();
}

int cmd_serve(const Options& o, const Config& c, std::ostream& out) {
  require(o.input, "--input");
  const auto reviewers = resolve_reviewers(c.review);
  const fs::path log = event_log_path(o, c);
  const auto docs = load_policy_dir(o.input);
  const fs::path workspace = log.has_parent_path() ? log.parent_path() : fs::path(".");
  WorkspaceLock lock(workspace);

  review::ServiceConfig sc;
  sc.reviewers = reviewers;
  sc.event_log = log;
  sc.lease = std::chrono::minutes(c.review.lease_minutes);
  review::ReviewService service(docs, sc);
  review::ReviewServer server(service, c.review.static_dir);
  const std::string host = o.host.empty() ? c.review.host : o.host;
  const int port = server.bind(host, o.port >= 0 ? o.port : c.review.port);
  g_server = &server;
  std::signal(SIGINT, handle_stop);
  std::signal(SIGTERM, handle_stop);
  out << "serving " << docs.size() << " policies on http://" << host << ":" << port << std::endl;
  server.listen();
  g_server = nullptr;
  return kExitOk;
}

int cmd_export(const Options& o, const Config& c, std::ostream& out, std::ostream& err) {
  require(o.input, "--input");
  require(o.output, "--output");
  const fs::path log = event_log_path(o, c);
  Stage stage(o, c);
  if (!fs::exists(log)) throw Error(ErrorCode::IoError, "event log " + log.string() + " does not exist");
  const auto docs = load_policy_dir(o.input);
  review::ServiceConfig sc;
  sc.event_log = log;
  const review::ReviewService service(docs, sc);

  WorkspaceLock lock(o.output);
  std::vector<PolicyDocument> exported;
  std::vector<std::string> incomplete;
  for (const auto& d : docs) {
    if (!o.policy.empty() && d.policy_id != o.policy) continue;
    try {
      exported.push_back(service.export_ground_truth(d.policy_id));
    } catch (const IncompleteReview& e) {
      incomplete.push_back(d.policy_id);
      err << "export [" << to_string(e.code()) << "]: " << e.what() << "\n";
    }
  }
  if (!o.policy.empty() && exported.empty() && incomplete.empty()) {
    throw Error(ErrorCode::UnknownPolicy, "no policy '" + o.policy + "'");
  }
  write_documents(o.output, exported);
  stage.counts() = {{"exported", exported.size()}, {"incomplete", incomplete}};
  stage.commit(o.output);
  out << "export: " << exported.size() << " ground-truth documents written\n";
  return incomplete.empty() ? kExitOk : kExitError;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  Options o;
  CLI::App app{"GDPR transparency annotation toolkit for privacy policies", "policylens"};
  app.fallthrough();
  app.require_subcommand(1);
  app.add_option("--config", o.config, "JSON configuration file");
  app.add_option("--input", o.input, "Input file or directory");
  app.add_option("--output", o.output, "Output directory");
  app.add_option("--tau", o.tau, "Span similarity threshold (eval.tau)");
  app.add_option("--seed", o.seed, "Sampler seed");
  app.add_option("--k", o.k, "Cluster count or 'auto'");
  app.add_option("--sample-size", o.sample_size, "Evaluation sample size");
  app.add_option("--provider", o.provider, "Provider kind: openai or mock");
  app.add_flag("--mock", o.mock, "Use the offline mock chat model and embedder");

  app.add_subcommand("ingest", "Load a manifest or directory and deduplicate");
  app.add_subcommand("detect", "Keep documents the policy detector accepts");
  app.add_subcommand("preprocess", "Turn HTML into passage documents");
  app.add_subcommand("annotate", "Run the annotation layer");
  app.add_subcommand("correct", "Run the self-correction layer");
  auto* sample = app.add_subcommand("sample", "Cluster, weight and draw the evaluation sample");
  sample->add_option("--ids", o.ids, "id<TAB>word_count manifest matching the embedding rows");
  auto* eval = app.add_subcommand("evaluate", "Score predictions against ground truth");
  eval->add_option("--ground-truth", o.ground_truth, "Directory of ground-truth documents");
  eval->add_option("--layer", o.layer, "Layer name recorded in the report");
  auto* serve = app.add_subcommand("serve", "Run the review service");
  serve->add_option("--events", o.events, "Event log path");
  serve->add_option("--host", o.host, "Bind address");
  serve->add_option("--port", o.port, "Port");
  auto* exp = app.add_subcommand("export", "Write finalized ground-truth documents");
  exp->add_option("--events", o.events, "Event log path");
  exp->add_option("--policy", o.policy, "Export a single policy");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitConfig;
  }
  o.command = app.get_subcommands().front()->get_name();

  try {
    const Config c = effective_config(o);
    if (o.command == "ingest") return cmd_ingest(o, c, out);
    if (o.command == "detect") return cmd_detect(o, c, out);
    if (o.command == "preprocess") return cmd_preprocess(o, c, out);
    if (o.command == "annotate") return cmd_layer(o, c, annotate::Layer::Annotation, out);
    if (o.command == "correct") return cmd_layer(o, c, annotate::Layer::SelfCorrection, out);
    if (o.command == "sample") return cmd_sample(o, c, out);
    if (o.command == "evaluate") return cmd_evaluate(o, c, out);
    if (o.command == "serve") return cmd_serve(o, c, out);
    if (o.command == "export") return cmd_export(o, c, out, err);
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const Error& e) {
    err << "error [" << to_string(e.code()) << "]: " << e.what() << "\n";
    return kExitError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitError;
  }
  return kExitError;
}

}  // namespace policylens::cli
