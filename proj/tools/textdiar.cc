#include <cstdlib>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "textdiar/commands.h"
#include "textdiar/errors.h"

using namespace textdiar;

namespace {

struct CommonFlags {
  std::string config;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> jobs;
  std::optional<std::string> mode;
  std::optional<std::size_t> window_len;
  std::optional<std::size_t> stride;
  std::optional<std::string> endpoint;
  std::optional<std::string> model;
  std::optional<std::string> predictor;
  std::optional<std::string> aggregation;
  std::optional<double> threshold;
  std::optional<double> epsilon;
  std::optional<double> rho;
  std::optional<std::size_t> num_speakers;
  std::optional<std::size_t> h;
  std::optional<std::size_t> k;
};

void add_common(CLI::App* app, CommonFlags& f) {
  app->add_option("--config", f.config, "JSON run configuration");
  app->add_option("--seed", f.seed, "Random seed");
  app->add_option("--jobs", f.jobs, "Worker threads over conversations");
  app->add_option("--mode", f.mode, "spm, mpm or multispeaker");
  app->add_option("--window-len", f.window_len, "MPM window length");
  app->add_option("--stride", f.stride, "MPM window stride");
  app->add_option("--endpoint", f.endpoint, "Remote predictor URL");
}

void add_predictor_flags(CLI::App* app, CommonFlags& f) {
  app->add_option("--model", f.model, "Builtin model file");
  app->add_option("--predictor", f.predictor,
                  "builtin, remote or noisy-oracle");
  app->add_option("--aggregation", f.aggregation, "majority or weighted-mean");
  app->add_option("--threshold", f.threshold, "Decision threshold");
  app->add_option("--epsilon", f.epsilon, "Noisy oracle flip rate");
  app->add_option("--rho", f.rho, "Noisy oracle consistent-error rate");
  app->add_option("--num-speakers", f.num_speakers, "Speakers per window");
  app->add_option("-H,--front", f.h, "SPM sentences up to the boundary");
  app->add_option("-K,--back", f.k, "SPM sentences after the boundary");
}

RunConfig resolve(const CommonFlags& f) {
  RunConfig cfg = f.config.empty() ? RunConfig{} : load_run_config(f.config);
  Json o = Json::object();
  Json pred = Json::object();
  if (f.mode) o["mode"] = *f.mode;
  if (f.window_len) o["window_len"] = *f.window_len;
  if (f.stride) o["stride"] = *f.stride;
  if (f.seed) o["seed"] = *f.seed;
  if (f.jobs) o["jobs"] = *f.jobs;
  if (f.aggregation) o["aggregation"] = *f.aggregation;
  if (f.threshold) o["threshold"] = *f.threshold;
  if (f.num_speakers) o["num_speakers"] = *f.num_speakers;
  if (f.h) o["h"] = *f.h;
  if (f.k) o["k"] = *f.k;
  if (f.model) {
    pred["model"] = *f.model;
    pred["source"] = "builtin";
  }
  if (f.endpoint) {
    pred["endpoint"] = *f.endpoint;
    pred["source"] = "remote";
  }
  if (f.predictor) pred["source"] = *f.predictor;
  if (f.epsilon) pred["epsilon"] = *f.epsilon;
  if (f.rho) pred["rho"] = *f.rho;
  if (!pred.empty()) o["predictor"] = pred;
  apply_config(cfg, o);
  return cfg;
}

std::vector<std::size_t> parse_lengths(const std::string& s) {
  std::vector<std::size_t> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    try {
      std::size_t used = 0;
      long long v = std::stoll(item, &used);
      if (used != item.size() || v < 2) throw std::invalid_argument(item);
      out.push_back(static_cast<std::size_t>(v));
    } catch (const std::exception&) {
      throw_config("invalid window length '" + item + "' in --sweep");
    }
  }
  return out;
}

std::vector<double> parse_edges(const std::string& s) {
  std::vector<double> out;
  std::stringstream ss(s);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item == "inf") {
      out.push_back(std::numeric_limits<double>::infinity());
      continue;
    }
    try {
      out.push_back(std::stod(item));
    } catch (const std::exception&) {
      throw_config("invalid bucket edge '" + item + "'");
    }
  }
  return out;
}

void print_loss(const char* what, const LossValue& l) {
  std::cout << what << " loss " << l.total() << " (data " << l.data
            << ", penalty " << l.penalty << ")\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Text-only speaker diarization via speaker change detection"};
  app.require_subcommand(1);
  CommonFlags flags;

  std::string ref, hyp, in, out, gold, model_out, prefix, sweep, train_data;
  std::string bucket_mode = "sentences", edges, extra_rows, label = "textdiar";
  std::optional<double> split;
  std::size_t radius = 1, sample = 0;
  CorpusConfig corpus;

  auto* align = app.add_subcommand("align", "Transfer reference speakers onto hypothesis transcripts");
  add_common(align, flags);
  align->add_option("--ref", ref, "Reference transcripts")->required();
  align->add_option("--hyp", hyp, "Hypothesis transcripts")->required();
  align->add_option("--out", out, "Labeled output transcripts")->required();

  auto* train = app.add_subcommand("train", "Train the builtin lexical predictor");
  add_common(train, flags);
  add_predictor_flags(train, flags);
  std::optional<std::size_t> epochs, hash_bits, batch;
  std::optional<double> lr, l2;
  train->add_option("--data", in, "Labeled training transcripts")->required();
  train->add_option("--out", model_out, "Model file to write")->required();
  train->add_option("--epochs", epochs);
  train->add_option("--learning-rate", lr);
  train->add_option("--l2", l2);
  train->add_option("--batch-size", batch, "0 for full batch");
  train->add_option("--hash-bits", hash_bits);

  auto* predict = app.add_subcommand("predict", "Predict speaker changes");
  add_common(predict, flags);
  add_predictor_flags(predict, flags);
  predict->add_option("--in", in, "Transcripts")->required();
  predict->add_option("--out", out, "Prediction records")->required();

  auto* evaluate = app.add_subcommand("evaluate", "Score predictions with WDER");
  add_common(evaluate, flags);
  add_predictor_flags(evaluate, flags);
  evaluate->add_option("--predictions", in, "Prediction records");
  evaluate->add_option("--gold", gold, "Gold transcripts")->required();
  evaluate->add_option("--out", prefix, "Output prefix (or directory with --sweep)")->required();
  evaluate->add_option("--buckets", bucket_mode, "minutes or sentences");
  evaluate->add_option("--edges", edges, "Comma-separated bucket edges, 'inf' allowed");
  evaluate->add_option("--split", split, "Short/long split");
  evaluate->add_option("--extra-rows", extra_rows, "Additional table rows");
  evaluate->add_option("--label", label, "Model name in the table");
  evaluate->add_option("--sweep", sweep, "Comma-separated window lengths to predict and evaluate");
  evaluate->add_option("--train-data", train_data, "Train a builtin model per swept length");

  auto* analyze = app.add_subcommand("analyze", "Aggregation efficacy and error slices");
  add_common(analyze, flags);
  analyze->add_option("--predictions", in, "Prediction records")->required();
  analyze->add_option("--gold", gold, "Gold transcripts")->required();
  analyze->add_option("--out", prefix, "Output prefix")->required();
  analyze->add_option("--context", radius, "Sentences either side of an error");
  analyze->add_option("--sample", sample, "Keep K sampled slices (0 keeps all)");

  auto* simulate = app.add_subcommand("simulate", "Generate a synthetic labeled corpus");
  add_common(simulate, flags);
  simulate->add_option("--out", out, "Transcripts to write")->required();
  simulate->add_option("--conversations", corpus.conversations);
  simulate->add_option("--min-sentences", corpus.min_sentences);
  simulate->add_option("--max-sentences", corpus.max_sentences);
  simulate->add_option("--speakers", corpus.base.speakers);
  simulate->add_option("--change-probability", corpus.base.change_probability);
  simulate->add_option("--vocabulary", corpus.base.vocabulary);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? 0 : exit_code(ErrorKind::kConfig);
  }

  try {
    RunConfig cfg = resolve(flags);
    if (align->parsed()) {
      AlignSummary s = cmd_align(ref, hyp, out, {}, cfg.jobs);
      std::cerr << "aligned " << s.conversations << " conversations\n";
    } else if (train->parsed()) {
      if (epochs) cfg.train.epochs = *epochs;
      if (lr) cfg.train.learning_rate = *lr;
      if (l2) cfg.train.l2 = *l2;
      if (batch) cfg.train.batch_size = *batch;
      if (hash_bits) cfg.featurizer.hash_bits = *hash_bits;
      TrainSummary s = cmd_train(in, model_out, cfg);
      for (const auto& w : s.warnings) std::cerr << "warning: " << w << "\n";
      print_loss("initial", s.initial_loss);
      print_loss("final", s.final_loss);
    } else if (predict->parsed()) {
      PredictSummary s = cmd_predict(in, out, cfg);
      for (const auto& f : s.failures) {
        std::cerr << "error: " << f.id << ": " << f.message << "\n";
      }
      if (!s.failures.empty()) return exit_code(s.failures.front().kind);
    } else if (evaluate->parsed()) {
      EvaluateOptions opts;
      opts.bucket_mode = bucket_mode_from_string(bucket_mode);
      if (!edges.empty()) opts.edges = parse_edges(edges);
      opts.split = split;
      opts.extra_rows_path = extra_rows;
      opts.model_label = label;
      if (!sweep.empty()) {
        auto results =
            cmd_sweep(gold, prefix, parse_lengths(sweep), cfg, opts, train_data);
        for (const auto& r : results) {
          std::cout << "L=" << r.window_len << " WDER "
                    << r.report.overall.wder_pooled.value_or(0.0) << " -> "
                    << r.directory << "\n";
        }
      } else {
        if (in.empty()) throw_config("evaluate needs --predictions or --sweep");
        BucketReport r = cmd_evaluate(in, gold, prefix, opts);
        std::cout << "WDER " << r.overall.wder_pooled.value_or(0.0)
                  << " WDER-S " << r.overall.wder_s.value_or(0.0) << "\n";
      }
    } else if (analyze->parsed()) {
      AnalyzeOptions opts;
      opts.radius = radius;
      opts.sample = sample;
      opts.seed = cfg.seed;
      opts.threshold = cfg.policy.threshold;
      AnalyzeSummary s = cmd_analyze(in, gold, prefix, opts);
      if (s.efficacy) std::cout << format_efficacy_table(*s.efficacy);
      std::cout << s.error_slices << " error slices\n";
    } else if (simulate->parsed()) {
      corpus.base.seed = cfg.seed;
      cmd_simulate(out, corpus);
    }
  } catch (const Error& e) {
    std::cerr << "error (" << to_string(e.kind()) << "): " << e.what() << "\n";
    return exit_code(e.kind());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
