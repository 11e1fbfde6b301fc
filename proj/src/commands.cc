#include "textdiar/commands.h"

#include <algorithm>
#include <atomic>
#include <filesystem>
#include <fstream>
#include <map>
#include <mutex>
#include <set>
#include <sstream>
#include <thread>

#include "textdiar/errors.h"
#include "textdiar/windowing.h"

namespace textdiar {

namespace {

std::size_t as_size(const Json& v, const std::string& key) {
  if (!v.is_number_integer() || v.get<long long>() < 0) {
    throw_config("config key '" + key + "' must be a non-negative integer");
  }
  return v.get<std::size_t>();
}

double as_double(const Json& v, const std::string& key) {
  if (!v.is_number()) throw_config("config key '" + key + "' must be a number");
  return v.get<double>();
}

std::string as_string(const Json& v, const std::string& key) {
  if (!v.is_string()) throw_config("config key '" + key + "' must be a string");
  return v.get<std::string>();
}

PredictorSource source_from_string(const std::string& s) {
  if (s == "builtin") return PredictorSource::kBuiltin;
  if (s == "remote") return PredictorSource::kRemote;
  if (s == "noisy-oracle") return PredictorSource::kNoisyOracle;
  throw_config("unknown predictor source '" + s +
               "' (expected builtin, remote or noisy-oracle)");
}

AgreementMode agreement_from_string(const std::string& s) {
  if (s == "argmax") return AgreementMode::kArgmax;
  if (s == "probability") return AgreementMode::kProbability;
  throw_config("unknown agreement mode '" + s +
               "' (expected argmax or probability)");
}

void apply_predictor(RunConfig& cfg, const Json& j) {
  if (!j.is_object()) throw_config("config key 'predictor' must be an object");
  for (const auto& [key, v] : j.items()) {
    if (key == "source") {
      cfg.source = source_from_string(as_string(v, key));
    } else if (key == "model") {
      cfg.model_path = as_string(v, key);
    } else if (key == "endpoint") {
      cfg.endpoint = as_string(v, key);
    } else if (key == "epsilon") {
      cfg.noise.epsilon = as_double(v, key);
    } else if (key == "rho") {
      cfg.noise.rho = as_double(v, key);
    } else if (key == "max_retries") {
      cfg.remote.max_retries = as_size(v, key);
    } else if (key == "timeout_ms") {
      cfg.remote.timeout = std::chrono::milliseconds(as_size(v, key));
    } else if (key == "backoff_ms") {
      cfg.remote.initial_backoff = std::chrono::milliseconds(as_size(v, key));
    } else if (key == "max_in_flight") {
      cfg.remote.max_in_flight = as_size(v, key);
    } else {
      throw_config("unknown predictor config key '" + key + "'");
    }
  }
}

void apply_train(RunConfig& cfg, const Json& j) {
  if (!j.is_object()) throw_config("config key 'train' must be an object");
  for (const auto& [key, v] : j.items()) {
    if (key == "learning_rate") {
      cfg.train.learning_rate = as_double(v, key);
    } else if (key == "epochs") {
      cfg.train.epochs = as_size(v, key);
    } else if (key == "l2") {
      cfg.train.l2 = as_double(v, key);
    } else if (key == "batch_size") {
      cfg.train.batch_size = as_size(v, key);
    } else if (key == "hash_bits") {
      cfg.featurizer.hash_bits = as_size(v, key);
    } else if (key == "bigrams") {
      if (!v.is_boolean()) throw_config("config key 'bigrams' must be a boolean");
      cfg.featurizer.bigrams = v.get<bool>();
    } else {
      throw_config("unknown train config key '" + key + "'");
    }
  }
}

Json votes_to_json(const std::vector<VoteSet>& votes) {
  Json out = Json::array();
  for (const auto& vs : votes) {
    Json point = Json::array();
    for (const auto& v : vs.contributions) {
      point.push_back(Json::array({v.window, v.probability}));
    }
    out.push_back(std::move(point));
  }
  return out;
}

std::vector<Conversation> require_speakers(std::vector<Conversation> convs,
                                           const std::string& path) {
  for (const auto& c : convs) {
    if (!c.has_speakers()) {
      throw_validation(path + ": conversation '" + c.id() +
                       "' lacks speaker labels on some sentences");
    }
  }
  return convs;
}

std::map<std::string, const PredictionRecord*> index_predictions(
    const std::vector<PredictionRecord>& predictions) {
  std::map<std::string, const PredictionRecord*> by_id;
  for (const auto& p : predictions) {
    if (!by_id.emplace(p.id, &p).second) {
      throw_validation("duplicate prediction for conversation '" + p.id + "'");
    }
  }
  return by_id;
}

const PredictionRecord& find_prediction(
    const std::map<std::string, const PredictionRecord*>& by_id,
    const Conversation& gold) {
  auto it = by_id.find(gold.id());
  if (it == by_id.end()) {
    throw_validation("no prediction for conversation '" + gold.id() + "'");
  }
  const PredictionRecord& p = *it->second;
  if (p.speakers.size() != gold.size()) {
    throw_validation("prediction for '" + gold.id() + "' has " +
                     std::to_string(p.speakers.size()) +
                     " speaker labels but the transcript has " +
                     std::to_string(gold.size()) + " sentences");
  }
  if (p.changes.size() + 1 != std::max<std::size_t>(gold.size(), 1)) {
    throw_validation("prediction for '" + gold.id() +
                     "' has the wrong number of change decisions");
  }
  return p;
}

void write_text(const std::string& path, const std::string& text) {
  std::ofstream out = open_output(path);
  out << text;
  if (!out) throw_io("failed writing " + path);
}

std::vector<TableRow> read_extra_rows(const std::string& path) {
  std::vector<TableRow> rows;
  if (path.empty()) return rows;
  std::ifstream in = open_input(path);
  for_each_record(in, path, [&](const Json& j, std::size_t) {
    rows.push_back(table_row_from_json(j));
  });
  return rows;
}

}  // namespace

void apply_config(RunConfig& cfg, const Json& j) {
  if (!j.is_object()) throw_config("config must be a JSON object");
  for (const auto& [key, v] : j.items()) {
    if (key == "mode") {
      cfg.mode = predictor_mode_from_string(as_string(v, key));
    } else if (key == "window_len") {
      cfg.window_len = as_size(v, key);
    } else if (key == "stride") {
      cfg.stride = as_size(v, key);
    } else if (key == "h") {
      cfg.front = as_size(v, key);
    } else if (key == "k") {
      cfg.back = as_size(v, key);
    } else if (key == "aggregation") {
      cfg.policy.kind = aggregation_kind_from_string(as_string(v, key));
    } else if (key == "threshold") {
      cfg.policy.threshold = as_double(v, key);
    } else if (key == "agreement") {
      cfg.agreement = agreement_from_string(as_string(v, key));
    } else if (key == "predictor") {
      apply_predictor(cfg, v);
    } else if (key == "train") {
      apply_train(cfg, v);
    } else if (key == "num_speakers") {
      cfg.num_speakers = as_size(v, key);
    } else if (key == "seed") {
      cfg.seed = as_size(v, key);
    } else if (key == "jobs") {
      cfg.jobs = as_size(v, key);
    } else {
      throw_config("unknown config key '" + key + "'");
    }
  }
  validate(cfg.policy);
}

RunConfig load_run_config(const std::string& path) {
  RunConfig cfg;
  Json j;
  try {
    j = Json::parse(read_file(path));
  } catch (const Json::parse_error& e) {
    throw_config(path + ": invalid JSON: " + e.what());
  }
  apply_config(cfg, j);
  return cfg;
}

PredictorHandle make_predictor(const RunConfig& cfg) {
  switch (cfg.source) {
    case PredictorSource::kBuiltin: {
      if (cfg.model_path.empty()) {
        throw_config("builtin predictor needs a model file (--model)");
      }
      auto p = load_builtin_predictor(cfg.model_path);
      if (p->mode() != cfg.mode) {
        throw_config("model " + cfg.model_path + " is a " +
                     to_string(p->mode()) + " model but mode is " +
                     to_string(cfg.mode));
      }
      return p;
    }
    case PredictorSource::kRemote:
      if (cfg.endpoint.empty()) {
        throw_config("remote predictor needs an endpoint (--endpoint)");
      }
      return std::make_shared<RemotePredictor>(cfg.endpoint, cfg.mode,
                                               cfg.remote);
    case PredictorSource::kNoisyOracle: {
      NoiseConfig noise = cfg.noise;
      noise.seed = cfg.seed;
      if (cfg.mode == PredictorMode::kMultispeaker) {
        return std::make_shared<PermutedOracleLabeler>(
            SpeakerLabelSet::letters(cfg.num_speakers), cfg.seed);
      }
      return std::make_shared<NoisyOraclePredictor>(cfg.mode, noise);
    }
  }
  throw_config("unknown predictor source");
}

Json to_json(const PredictionRecord& r) {
  Json j;
  j["id"] = r.id;
  Json decisions = Json::array();
  for (auto d : r.changes.decisions) decisions.push_back(static_cast<int>(d));
  j["decisions"] = std::move(decisions);
  j["probabilities"] = r.changes.probabilities;
  j["speakers"] = r.speakers;
  if (r.votes) j["votes"] = votes_to_json(*r.votes);
  return j;
}

PredictionRecord prediction_from_json(const Json& j, const std::string& where) {
  auto fail = [&](const std::string& msg) -> void {
    throw_parse(where + ": " + msg);
  };
  if (!j.is_object()) fail("prediction record must be an object");
  for (const char* key : {"id", "decisions", "probabilities", "speakers"}) {
    if (!j.contains(key)) fail(std::string("missing field '") + key + "'");
  }
  PredictionRecord r;
  try {
    r.id = j.at("id").get<std::string>();
    for (const auto& d : j.at("decisions")) {
      int v = d.get<int>();
      if (v != 0 && v != 1) fail("decisions must be 0 or 1");
      r.changes.decisions.push_back(static_cast<std::uint8_t>(v));
    }
    r.changes.probabilities = j.at("probabilities").get<std::vector<double>>();
    r.speakers = j.at("speakers").get<std::vector<std::string>>();
    if (j.contains("votes")) {
      std::vector<VoteSet> votes;
      std::size_t p = 0;
      for (const auto& point : j.at("votes")) {
        VoteSet vs;
        vs.change_point = p++;
        for (const auto& v : point) {
          vs.contributions.push_back(
              {v.at(0).get<std::size_t>(), v.at(1).get<double>()});
        }
        votes.push_back(std::move(vs));
      }
      r.votes = std::move(votes);
    }
  } catch (const Json::exception& e) {
    fail(std::string("malformed prediction record: ") + e.what());
  }
  if (r.changes.probabilities.size() != r.changes.decisions.size()) {
    fail("decisions and probabilities differ in length");
  }
  if (r.votes && r.votes->size() != r.changes.decisions.size()) {
    fail("votes and decisions differ in length");
  }
  return r;
}

std::vector<PredictionRecord> read_predictions(const std::string& path) {
  std::vector<PredictionRecord> out;
  std::ifstream in = open_input(path);
  for_each_record(in, path, [&](const Json& j, std::size_t line) {
    out.push_back(
        prediction_from_json(j, path + ":" + std::to_string(line)));
  });
  return out;
}

void write_predictions(const std::string& path,
                       const std::vector<PredictionRecord>& records) {
  std::ofstream out = open_output(path);
  for (const auto& r : records) write_record(out, to_json(r));
  if (!out) throw_io("failed writing " + path);
}

PredictionRecord predict_conversation(const Conversation& conv,
                                      const Predictor& predictor,
                                      const RunConfig& cfg) {
  PredictionRecord r;
  r.id = conv.id();
  switch (cfg.mode) {
    case PredictorMode::kSpm:
      r.changes = run_spm(conv, predictor, cfg.front, cfg.back,
                          cfg.policy.threshold);
      r.speakers = decode_speakers(r.changes).labels;
      break;
    case PredictorMode::kMpm: {
      MpmRun run = run_mpm(conv, predictor, cfg.window_len, cfg.stride,
                           cfg.policy);
      r.changes = std::move(run.changes);
      r.votes = std::move(run.votes);
      r.speakers = decode_speakers(r.changes).labels;
      break;
    }
    case PredictorMode::kMultispeaker: {
      MultispeakerRun run = run_multispeaker(
          conv, predictor, cfg.window_len, cfg.stride,
          SpeakerLabelSet::letters(predictor.num_speakers()), cfg.agreement);
      r.speakers = std::move(run.assignment.labels);
      r.changes = derive_change_sequence(SpeakerAssignment{r.speakers});
      break;
    }
  }
  return r;
}

void parallel_for(std::size_t n, std::size_t jobs,
                  const std::function<void(std::size_t)>& fn) {
  jobs = std::max<std::size_t>(1, std::min(jobs, n));
  if (jobs <= 1) {
    for (std::size_t i = 0; i < n; ++i) fn(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr first_error;
  std::mutex mu;
  std::vector<std::thread> workers;
  workers.reserve(jobs);
  for (std::size_t t = 0; t < jobs; ++t) {
    workers.emplace_back([&] {
      for (;;) {
        std::size_t i = next.fetch_add(1);
        if (i >= n) return;
        try {
          fn(i);
        } catch (...) {
          std::lock_guard<std::mutex> lock(mu);
          if (!first_error) first_error = std::current_exception();
          next.store(n);
        }
      }
    });
  }
  for (auto& w : workers) w.join();
  if (first_error) std::rethrow_exception(first_error);
}

AlignSummary cmd_align(const std::string& ref_path, const std::string& hyp_path,
                       const std::string& out_path,
                       const AlignmentScores& scores, std::size_t jobs) {
  auto refs = require_speakers(read_transcripts(ref_path), ref_path);
  auto hyps = read_transcripts(hyp_path);
  std::map<std::string, const Conversation*> ref_by_id;
  for (const auto& r : refs) {
    if (!ref_by_id.emplace(r.id(), &r).second) {
      throw_validation(ref_path + ": duplicate conversation id '" + r.id() + "'");
    }
  }
  std::vector<std::optional<Conversation>> aligned(hyps.size());
  parallel_for(hyps.size(), jobs, [&](std::size_t i) {
    auto it = ref_by_id.find(hyps[i].id());
    if (it == ref_by_id.end()) {
      throw_validation(hyp_path + ": conversation '" + hyps[i].id() +
                       "' has no reference transcript");
    }
    aligned[i] = align_conversation(*it->second, hyps[i], scores);
  });
  std::vector<Conversation> out;
  out.reserve(aligned.size());
  for (auto& a : aligned) out.push_back(std::move(*a));
  write_transcripts(out_path, out);
  return {out.size()};
}

TrainSummary train_from_conversations(const std::vector<Conversation>& data,
                                      const RunConfig& cfg) {
  TrainSummary s;
  TrainConfig tc = cfg.train;
  tc.seed = cfg.seed;
  TrainedModel m;
  switch (cfg.mode) {
    case PredictorMode::kSpm:
      m = train_baseline_spm(data, cfg.featurizer, cfg.front, cfg.back, tc);
      break;
    case PredictorMode::kMpm:
      m = train_baseline_mpm(data, cfg.featurizer, cfg.window_len, cfg.stride,
                             tc);
      break;
    case PredictorMode::kMultispeaker: {
      std::set<SpeakerLabel> labels;
      for (const auto& c : data) {
        for (const auto& s : c.sentences()) labels.insert(*s.speaker);
      }
      std::size_t max_in_window = 0;
      for (const auto& c : data) {
        if (c.size() == 0) continue;
        auto ws = build_mpm_windows(c, cfg.window_len, cfg.stride);
        for (const auto& w : ws.windows()) {
          std::set<SpeakerLabel> in_window;
          for (std::size_t i = w.first; i <= w.last; ++i) {
            in_window.insert(*c[i].speaker);
          }
          max_in_window = std::max(max_in_window, in_window.size());
        }
      }
      if (max_in_window > cfg.num_speakers) {
        throw_validation("training data has windows with " +
                         std::to_string(max_in_window) +
                         " speakers but num_speakers is " +
                         std::to_string(cfg.num_speakers));
      }
      if (labels.size() < cfg.num_speakers) {
        s.warnings.push_back("training data has " +
                             std::to_string(labels.size()) +
                             " distinct speakers but num_speakers is " +
                             std::to_string(cfg.num_speakers));
      }
      m = train_baseline_multispeaker(data, cfg.featurizer, cfg.window_len,
                                      cfg.stride, cfg.num_speakers, tc);
      break;
    }
  }
  s.params = std::move(m.params);
  s.initial_loss = m.initial_loss;
  s.final_loss = m.final_loss;
  return s;
}

TrainSummary cmd_train(const std::string& data_path,
                       const std::string& model_path, const RunConfig& cfg) {
  auto data = require_speakers(read_transcripts(data_path), data_path);
  TrainSummary s = train_from_conversations(data, cfg);
  save_model(model_path, s.params);
  return s;
}

PredictSummary predict_corpus(const std::vector<Conversation>& conversations,
                              const Predictor& predictor, const RunConfig& cfg,
                              std::vector<PredictionRecord>& out) {
  PredictSummary summary;
  summary.conversations = conversations.size();
  std::vector<std::optional<PredictionRecord>> results(conversations.size());
  std::vector<std::optional<Failure>> failures(conversations.size());
  parallel_for(conversations.size(), cfg.jobs, [&](std::size_t i) {
    try {
      results[i] = predict_conversation(conversations[i], predictor, cfg);
    } catch (const Error& e) {
      if (e.kind() != ErrorKind::kTransport &&
          e.kind() != ErrorKind::kProtocol) {
        throw;
      }
      failures[i] = Failure{conversations[i].id(), e.what(), e.kind()};
    }
  });
  out.clear();
  for (std::size_t i = 0; i < results.size(); ++i) {
    if (results[i]) out.push_back(std::move(*results[i]));
    if (failures[i]) summary.failures.push_back(std::move(*failures[i]));
  }
  std::stable_sort(out.begin(), out.end(),
                   [](const auto& a, const auto& b) { return a.id < b.id; });
  return summary;
}

PredictSummary cmd_predict(const std::string& transcripts_path,
                           const std::string& out_path, const RunConfig& cfg) {
  validate(cfg.policy);
  auto conversations = read_transcripts(transcripts_path);
  if (cfg.source == PredictorSource::kNoisyOracle) {
    conversations = require_speakers(std::move(conversations), transcripts_path);
  }
  PredictorHandle predictor = make_predictor(cfg);
  std::vector<PredictionRecord> records;
  PredictSummary s = predict_corpus(conversations, *predictor, cfg, records);
  write_predictions(out_path, records);
  return s;
}

BucketReport evaluate_records(const std::vector<PredictionRecord>& predictions,
                              const std::vector<Conversation>& gold,
                              const EvaluateOptions& options) {
  auto by_id = index_predictions(predictions);
  std::vector<ConversationScore> scores;
  scores.reserve(gold.size());
  for (const auto& g : gold) {
    scores.push_back(score_conversation(g, find_prediction(by_id, g).speakers));
  }
  std::vector<double> edges = options.edges.empty()
                                  ? default_bucket_edges(options.bucket_mode)
                                  : options.edges;
  double split = options.split.value_or(default_split(options.bucket_mode));
  return bucket_report(scores, options.bucket_mode, edges, split);
}

BucketReport cmd_evaluate(const std::string& predictions_path,
                          const std::string& gold_path,
                          const std::string& out_prefix,
                          const EvaluateOptions& options) {
  auto gold = require_speakers(read_transcripts(gold_path), gold_path);
  auto predictions = read_predictions(predictions_path);
  BucketReport report = evaluate_records(predictions, gold, options);

  std::vector<TableRow> rows = read_extra_rows(options.extra_rows_path);
  rows.push_back(table_row(report, options.model_label));

  {
    std::ofstream out = open_output(out_prefix + ".jsonl");
    for (const auto& rec : report_records(report)) write_record(out, rec);
    write_record(out, [&] {
      Json j = to_json(rows.back());
      j["type"] = "table_row";
      return j;
    }());
    if (!out) throw_io("failed writing " + out_prefix + ".jsonl");
  }
  write_text(out_prefix + ".txt", format_wder_table(rows, report));
  write_text(out_prefix + ".series.csv", format_bucket_series(report));
  return report;
}

std::vector<SweepResult> cmd_sweep(const std::string& gold_path,
                                   const std::string& out_dir,
                                   const std::vector<std::size_t>& lengths,
                                   const RunConfig& cfg,
                                   const EvaluateOptions& options,
                                   const std::string& train_path) {
  if (lengths.empty()) throw_config("sweep needs at least one window length");
  if (cfg.mode == PredictorMode::kSpm) {
    throw_config("window sweeps need mpm or multispeaker mode");
  }
  auto gold = require_speakers(read_transcripts(gold_path), gold_path);
  std::vector<Conversation> train_data;
  bool train_per_length =
      !train_path.empty() && cfg.source == PredictorSource::kBuiltin;
  if (train_per_length) {
    train_data = require_speakers(read_transcripts(train_path), train_path);
  }
  std::filesystem::create_directories(out_dir);

  std::vector<SweepResult> results;
  for (std::size_t len : lengths) {
    RunConfig run = cfg;
    run.window_len = len;
    std::string dir = out_dir + "/L" + std::to_string(len);
    std::filesystem::create_directories(dir);

    PredictorHandle predictor;
    if (train_per_length) {
      TrainSummary t = train_from_conversations(train_data, run);
      save_model(dir + "/model.txt", t.params);
      predictor = std::make_shared<BuiltinPredictor>(std::move(t.params));
    } else {
      predictor = make_predictor(run);
    }
    std::vector<PredictionRecord> records;
    PredictSummary ps = predict_corpus(gold, *predictor, run, records);
    if (!ps.failures.empty()) {
      const Failure& f = ps.failures.front();
      throw Error(f.kind, "window length " + std::to_string(len) +
                              ": conversation '" + f.id + "': " + f.message);
    }
    write_predictions(dir + "/predictions.jsonl", records);
    EvaluateOptions opts = options;
    opts.model_label =
        options.model_label + " L=" + std::to_string(len);
    BucketReport report = cmd_evaluate(dir + "/predictions.jsonl", gold_path,
                                       dir + "/report", opts);
    results.push_back({len, dir, std::move(report)});
  }
  return results;
}

AnalyzeSummary cmd_analyze(const std::string& predictions_path,
                           const std::string& gold_path,
                           const std::string& out_prefix,
                           const AnalyzeOptions& options) {
  auto gold = require_speakers(read_transcripts(gold_path), gold_path);
  auto predictions = read_predictions(predictions_path);
  auto by_id = index_predictions(predictions);

  AnalyzeSummary summary;
  bool have_votes = std::all_of(predictions.begin(), predictions.end(),
                                [](const auto& p) { return p.votes.has_value(); });
  EfficacyReport total;
  std::vector<ErrorSlice> slices;
  for (const auto& g : gold) {
    const PredictionRecord& p = find_prediction(by_id, g);
    ChangeSequence gold_changes = derive_change_sequence(gold_assignment(g));
    if (have_votes) {
      total += efficacy_analysis(*p.votes, p.changes, gold_changes,
                                 options.threshold);
    }
    auto s = error_slices(g, p.changes, p.speakers, options.radius);
    slices.insert(slices.end(), std::make_move_iterator(s.begin()),
                  std::make_move_iterator(s.end()));
  }
  if (options.sample > 0) {
    slices = sample_slices(std::move(slices), options.sample, options.seed);
  }

  if (have_votes && !predictions.empty()) {
    std::ofstream out = open_output(out_prefix + ".efficacy.jsonl");
    for (auto c : {EfficacyCategory::kPartialToCorrect,
                   EfficacyCategory::kPartialToIncorrect,
                   EfficacyCategory::kConsistentlyIncorrect}) {
      Json j;
      j["type"] = "category";
      j["category"] = category_label(c);
      j["count"] = total.counts[static_cast<std::size_t>(c)];
      j["percent"] = total.percent(c);
      write_record(out, j);
    }
    Json s;
    s["type"] = "summary";
    s["change_points"] = total.points;
    s["with_incorrect_vote"] = total.total();
    write_record(out, s);
    if (!out) throw_io("failed writing " + out_prefix + ".efficacy.jsonl");
    write_text(out_prefix + ".efficacy.txt", format_efficacy_table(total));
    summary.efficacy = total;
  }

  std::ofstream out = open_output(out_prefix + ".errors.jsonl");
  for (const auto& s : slices) write_record(out, to_json(s));
  if (!out) throw_io("failed writing " + out_prefix + ".errors.jsonl");
  summary.error_slices = slices.size();
  return summary;
}

void cmd_simulate(const std::string& out_path, const CorpusConfig& cfg) {
  write_transcripts(out_path, generate_corpus(cfg));
}

}  // namespace textdiar
