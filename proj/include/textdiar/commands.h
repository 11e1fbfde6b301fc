#pragma once

// Library side of the command-line tool. Each cmd_* function reads and
// writes newline-delimited record files and is deterministic given its
// configuration (remote predictors excluded).

#include <cstddef>
#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "textdiar/aggregation.h"
#include "textdiar/errors.h"
#include "textdiar/alignment.h"
#include "textdiar/features.h"
#include "textdiar/jsonl.h"
#include "textdiar/metrics.h"
#include "textdiar/model.h"
#include "textdiar/multispeaker.h"
#include "textdiar/predictor.h"
#include "textdiar/remote.h"
#include "textdiar/synth.h"

namespace textdiar {

enum class PredictorSource { kBuiltin, kRemote, kNoisyOracle };

struct RunConfig {
  PredictorMode mode = PredictorMode::kMpm;
  std::size_t window_len = 8;
  std::size_t stride = 1;
  // SPM context: front (h) sentences ending at s_i, back (k) after s_{i+1}.
  std::size_t front = 4;
  std::size_t back = 3;
  AggregationPolicy policy;
  AgreementMode agreement = AgreementMode::kArgmax;

  PredictorSource source = PredictorSource::kBuiltin;
  std::string model_path;
  std::string endpoint;
  RemoteOptions remote;
  NoiseConfig noise;

  FeaturizerConfig featurizer;
  TrainConfig train;
  std::size_t num_speakers = 2;

  std::uint64_t seed = 0;
  std::size_t jobs = 1;
};

// Applies a JSON object of config keys; unknown keys are a config error.
void apply_config(RunConfig& cfg, const Json& j);
RunConfig load_run_config(const std::string& path);

// Builds the predictor selected by cfg (loading the model file for the
// builtin source).
PredictorHandle make_predictor(const RunConfig& cfg);

struct PredictionRecord {
  std::string id;
  ChangeSequence changes;
  std::vector<SpeakerLabel> speakers;
  // Per change point window votes (MPM runs only).
  std::optional<std::vector<VoteSet>> votes;
};

Json to_json(const PredictionRecord& r);
PredictionRecord prediction_from_json(const Json& j, const std::string& where);
std::vector<PredictionRecord> read_predictions(const std::string& path);
void write_predictions(const std::string& path,
                       const std::vector<PredictionRecord>& records);

// Predicts one conversation with the configured pipeline.
PredictionRecord predict_conversation(const Conversation& conv,
                                      const Predictor& predictor,
                                      const RunConfig& cfg);

struct Failure {
  std::string id;
  std::string message;
  ErrorKind kind;
};

struct PredictSummary {
  std::size_t conversations = 0;
  std::vector<Failure> failures;
};

// Runs fn(i) for i in [0, n) on `jobs` worker threads.
void parallel_for(std::size_t n, std::size_t jobs,
                  const std::function<void(std::size_t)>& fn);

struct AlignSummary {
  std::size_t conversations = 0;
};
AlignSummary cmd_align(const std::string& ref_path, const std::string& hyp_path,
                       const std::string& out_path,
                       const AlignmentScores& scores = {},
                       std::size_t jobs = 1);

struct TrainSummary {
  ModelParams params;
  LossValue initial_loss;
  LossValue final_loss;
  std::vector<std::string> warnings;
};
TrainSummary train_from_conversations(const std::vector<Conversation>& data,
                                      const RunConfig& cfg);
TrainSummary cmd_train(const std::string& data_path,
                       const std::string& model_path, const RunConfig& cfg);

// Output is sorted by conversation id; conversations whose predictor calls
// fail are reported in the summary and left out of the file.
PredictSummary cmd_predict(const std::string& transcripts_path,
                           const std::string& out_path, const RunConfig& cfg);
PredictSummary predict_corpus(const std::vector<Conversation>& conversations,
                              const Predictor& predictor, const RunConfig& cfg,
                              std::vector<PredictionRecord>& out);

struct EvaluateOptions {
  BucketMode bucket_mode = BucketMode::kSentences;
  std::vector<double> edges;  // empty: defaults for the mode
  std::optional<double> split;
  std::string model_label = "textdiar";
  // Extra table rows (e.g. externally scored systems), one JSON object
  // per line with fields model, short_wd, short_wds, long_wd, long_wds,
  // overall_wd, overall_wds.
  std::string extra_rows_path;
};

// Writes <prefix>.jsonl, <prefix>.txt and <prefix>.series.csv.
BucketReport cmd_evaluate(const std::string& predictions_path,
                          const std::string& gold_path,
                          const std::string& out_prefix,
                          const EvaluateOptions& options);
BucketReport evaluate_records(const std::vector<PredictionRecord>& predictions,
                              const std::vector<Conversation>& gold,
                              const EvaluateOptions& options);

struct SweepResult {
  std::size_t window_len = 0;
  std::string directory;
  BucketReport report;
};

// For each window length, predicts the gold corpus and evaluates it under
// <out_dir>/L<len>/. When train_path is set and the source is builtin, a
// model is trained per length first.
std::vector<SweepResult> cmd_sweep(const std::string& gold_path,
                                   const std::string& out_dir,
                                   const std::vector<std::size_t>& lengths,
                                   const RunConfig& cfg,
                                   const EvaluateOptions& options,
                                   const std::string& train_path = "");

struct AnalyzeOptions {
  std::size_t radius = 1;
  std::size_t sample = 0;  // 0 keeps every slice
  std::uint64_t seed = 0;
  double threshold = 0.5;
};

struct AnalyzeSummary {
  std::optional<EfficacyReport> efficacy;  // unset without recorded votes
  std::size_t error_slices = 0;
};

// Writes <prefix>.efficacy.jsonl / .efficacy.txt (when votes are present)
// and <prefix>.errors.jsonl.
AnalyzeSummary cmd_analyze(const std::string& predictions_path,
                           const std::string& gold_path,
                           const std::string& out_prefix,
                           const AnalyzeOptions& options);

void cmd_simulate(const std::string& out_path, const CorpusConfig& cfg);

}  // namespace textdiar
