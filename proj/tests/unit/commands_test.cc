#include <filesystem>
#include <fstream>
#include <unistd.h>

#include "doctest.h"
#include "textdiar/commands.h"
#include "textdiar/errors.h"
#include "textdiar/jsonl.h"

using namespace textdiar;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  explicit TempDir(const std::string& name)
      : path(fs::temp_directory_path() / ("textdiar-" + name + "-" + std::to_string(::getpid()))) {
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  std::string operator/(const std::string& f) const { return (path / f).string(); }
};

ErrorKind kind_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.kind();
  }
  FAIL("expected an error");
  return ErrorKind::kConfig;
}

CorpusConfig small_corpus(std::size_t conversations = 6, std::size_t speakers = 2) {
  CorpusConfig c;
  c.conversations = conversations;
  c.min_sentences = 12;
  c.max_sentences = 30;
  c.base.speakers = speakers;
  c.base.seed = 11;
  return c;
}

RunConfig oracle_config(double epsilon = 0.0) {
  RunConfig cfg;
  cfg.source = PredictorSource::kNoisyOracle;
  cfg.noise.epsilon = epsilon;
  cfg.window_len = 4;
  return cfg;
}

}  // namespace

TEST_CASE("config keys") {
  RunConfig cfg;
  apply_config(cfg, Json{{"mode", "spm"},
                         {"h", 2},
                         {"k", 1},
                         {"threshold", 0.6},
                         {"predictor", {{"source", "noisy-oracle"}, {"epsilon", 0.1}}},
                         {"train", {{"epochs", 5}}}});
  CHECK(cfg.mode == PredictorMode::kSpm);
  CHECK(cfg.front == 2);
  CHECK(cfg.back == 1);
  CHECK(cfg.policy.threshold == 0.6);
  CHECK(cfg.source == PredictorSource::kNoisyOracle);
  CHECK(cfg.noise.epsilon == 0.1);
  CHECK(cfg.train.epochs == 5);
  apply_config(cfg, Json{{"h", 3}});
  CHECK(cfg.front == 3);
  CHECK(cfg.back == 1);
  CHECK(kind_of([&] { apply_config(cfg, Json{{"windowlen", 3}}); }) == ErrorKind::kConfig);
  CHECK(kind_of([&] { apply_config(cfg, Json{{"stride", -1}}); }) == ErrorKind::kConfig);
  CHECK(kind_of([&] { apply_config(cfg, Json{{"predictor", {{"x", 1}}}}); }) ==
        ErrorKind::kConfig);
  CHECK(kind_of([] { load_run_config("/nonexistent/config.json"); }) == ErrorKind::kIo);
  RunConfig builtin;
  CHECK(kind_of([&] { make_predictor(builtin); }) == ErrorKind::kConfig);
}

TEST_CASE("align copies reference speakers") {
  TempDir dir("align");
  cmd_simulate(dir / "gold.jsonl", small_corpus(3));
  auto gold = read_transcripts(dir / "gold.jsonl");
  std::vector<Conversation> hyp;
  for (const auto& c : gold) {
    std::vector<Sentence> s = c.sentences();
    for (auto& x : s) x.speaker.reset();
    hyp.emplace_back(c.id(), s);
  }
  write_transcripts(dir / "hyp.jsonl", hyp);
  CHECK(cmd_align(dir / "gold.jsonl", dir / "hyp.jsonl", dir / "out.jsonl", {}, 2)
            .conversations == 3);
  auto out = read_transcripts(dir / "out.jsonl");
  REQUIRE(out.size() == 3);
  for (std::size_t i = 0; i < 3; ++i) {
    CHECK(gold_assignment(out[i]) == gold_assignment(gold[i]));
  }
  CHECK(kind_of([&] { cmd_align(dir / "missing.jsonl", dir / "hyp.jsonl", dir / "x.jsonl"); }) ==
        ErrorKind::kIo);
  CHECK(kind_of([&] { cmd_align(dir / "hyp.jsonl", dir / "hyp.jsonl", dir / "x.jsonl"); }) ==
        ErrorKind::kValidation);
}

TEST_CASE("training is deterministic and reduces loss") {
  TempDir dir("train");
  cmd_simulate(dir / "train.jsonl", small_corpus(8));
  RunConfig cfg;
  cfg.window_len = 4;
  cfg.train.epochs = 30;
  cfg.featurizer.hash_bits = 10;
  auto a = cmd_train(dir / "train.jsonl", dir / "a.txt", cfg);
  auto b = cmd_train(dir / "train.jsonl", dir / "b.txt", cfg);
  CHECK(a.final_loss.total() < a.initial_loss.total());
  CHECK(a.warnings.empty());
  CHECK(read_file(dir / "a.txt") == read_file(dir / "b.txt"));
  cfg.mode = PredictorMode::kSpm;
  auto s = cmd_train(dir / "train.jsonl", dir / "spm.txt", cfg);
  CHECK(s.final_loss.total() < s.initial_loss.total());
}

TEST_CASE("multispeaker training checks speaker counts") {
  RunConfig cfg;
  cfg.mode = PredictorMode::kMultispeaker;
  cfg.window_len = 4;
  cfg.train.epochs = 5;
  cfg.featurizer.hash_bits = 8;
  cfg.num_speakers = 3;
  auto two = generate_corpus(small_corpus(3, 2));
  auto s = train_from_conversations(two, cfg);
  CHECK_FALSE(s.warnings.empty());
  cfg.num_speakers = 2;
  auto four = generate_corpus(small_corpus(3, 4));
  CHECK(kind_of([&] { train_from_conversations(four, cfg); }) == ErrorKind::kValidation);
}

TEST_CASE("predict, evaluate and analyze with the oracle") {
  TempDir dir("predict");
  cmd_simulate(dir / "gold.jsonl", small_corpus(7));
  RunConfig cfg = oracle_config();
  cfg.jobs = 4;
  auto s = cmd_predict(dir / "gold.jsonl", dir / "pred.jsonl", cfg);
  CHECK(s.conversations == 7);
  CHECK(s.failures.empty());
  auto preds = read_predictions(dir / "pred.jsonl");
  REQUIRE(preds.size() == 7);
  for (std::size_t i = 1; i < preds.size(); ++i) CHECK(preds[i - 1].id < preds[i].id);
  CHECK(preds[0].votes.has_value());

  auto report = cmd_evaluate(dir / "pred.jsonl", dir / "gold.jsonl", dir / "report", {});
  CHECK(*report.overall.wder_pooled == 0.0);
  CHECK(fs::exists(dir / "report.jsonl"));
  CHECK(fs::exists(dir / "report.txt"));
  CHECK(fs::exists(dir / "report.series.csv"));

  auto a = cmd_analyze(dir / "pred.jsonl", dir / "gold.jsonl", dir / "an", {});
  REQUIRE(a.efficacy.has_value());
  CHECK(a.efficacy->total() == 0);
  CHECK(a.error_slices == 0);

  EvaluateOptions minutes;
  minutes.bucket_mode = BucketMode::kMinutes;
  CHECK(cmd_evaluate(dir / "pred.jsonl", dir / "gold.jsonl", dir / "m", minutes)
            .buckets.size() == 7);
}

TEST_CASE("noisy analysis sampling is reproducible") {
  TempDir dir("analyze");
  cmd_simulate(dir / "gold.jsonl", small_corpus(6));
  RunConfig cfg = oracle_config(0.3);
  cmd_predict(dir / "gold.jsonl", dir / "pred.jsonl", cfg);
  AnalyzeOptions opts;
  opts.sample = 4;
  opts.seed = 2;
  auto a = cmd_analyze(dir / "pred.jsonl", dir / "gold.jsonl", dir / "a", opts);
  auto b = cmd_analyze(dir / "pred.jsonl", dir / "gold.jsonl", dir / "b", opts);
  CHECK(a.error_slices == 4);
  CHECK(a.efficacy->total() > 0);
  CHECK(read_file(dir / "a.errors.jsonl") == read_file(dir / "b.errors.jsonl"));
  CHECK(read_file(dir / "a.efficacy.jsonl") == read_file(dir / "b.efficacy.jsonl"));
}

TEST_CASE("window sweep") {
  TempDir dir("sweep");
  cmd_simulate(dir / "gold.jsonl", small_corpus(4));
  RunConfig cfg = oracle_config(0.2);
  auto results = cmd_sweep(dir / "gold.jsonl", dir / "sweep", {4, 6, 8}, cfg, {});
  REQUIRE(results.size() == 3);
  for (const auto& r : results) {
    CHECK(fs::exists(r.directory + "/report.jsonl"));
    CHECK(fs::exists(r.directory + "/predictions.jsonl"));
    CHECK(r.report.overall.wder_pooled.has_value());
  }
  CHECK(results[1].directory.find("L6") != std::string::npos);
  cfg.mode = PredictorMode::kSpm;
  CHECK(kind_of([&] { cmd_sweep(dir / "gold.jsonl", dir / "s", {4}, cfg, {}); }) ==
        ErrorKind::kConfig);
}

TEST_CASE("prediction records round trip") {
  PredictionRecord r;
  r.id = "x";
  r.changes.decisions = {0, 1};
  r.changes.probabilities = {0.25, 0.75};
  r.speakers = {"A", "A", "B"};
  r.votes = std::vector<VoteSet>{{0, {{0, 0.25}}}, {1, {{0, 0.75}, {1, 0.5}}}};
  auto back = prediction_from_json(to_json(r), "test");
  CHECK(back.id == r.id);
  CHECK(back.changes == r.changes);
  CHECK(back.speakers == r.speakers);
  REQUIRE(back.votes.has_value());
  CHECK((*back.votes)[1].contributions == (*r.votes)[1].contributions);
  CHECK(kind_of([] { prediction_from_json(Json{{"id", "x"}}, "test"); }) == ErrorKind::kParse);
}
