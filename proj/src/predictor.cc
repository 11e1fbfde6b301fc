#include "textdiar/predictor.h"

#include <cmath>

#include "textdiar/errors.h"

namespace textdiar {

std::string to_string(PredictorMode mode) {
  switch (mode) {
    case PredictorMode::kSpm:
      return "spm";
    case PredictorMode::kMpm:
      return "mpm";
    case PredictorMode::kMultispeaker:
      return "multispeaker";
  }
  return "unknown";
}

PredictorMode predictor_mode_from_string(const std::string& s) {
  if (s == "spm") return PredictorMode::kSpm;
  if (s == "mpm") return PredictorMode::kMpm;
  if (s == "multispeaker") return PredictorMode::kMultispeaker;
  throw_config("unknown mode '" + s + "' (expected spm, mpm or multispeaker)");
}

double Predictor::predict_spm(const Conversation&, const SpmContext&) const {
  throw_config("predictor in " + to_string(mode()) +
               " mode cannot make SPM predictions");
}

WindowPrediction Predictor::predict_mpm(const Conversation&,
                                        const MpmWindow&) const {
  throw_config("predictor in " + to_string(mode()) +
               " mode cannot make MPM predictions");
}

WindowLabelScores Predictor::predict_labels(const Conversation&,
                                            const MpmWindow&) const {
  throw_config("predictor in " + to_string(mode()) +
               " mode cannot make speaker-label predictions");
}

std::vector<double> Predictor::predict_spm_all(
    const Conversation& conv, std::span<const SpmContext> contexts) const {
  std::vector<double> out;
  out.reserve(contexts.size());
  for (const auto& ctx : contexts) out.push_back(predict_spm(conv, ctx));
  return out;
}

std::vector<WindowPrediction> Predictor::predict_mpm_all(
    const Conversation& conv, const WindowSet& windows) const {
  std::vector<WindowPrediction> out;
  out.reserve(windows.size());
  for (const auto& w : windows.windows()) out.push_back(predict_mpm(conv, w));
  return out;
}

void validate_probabilities(std::span<const double> probabilities,
                            std::size_t expected, const std::string& what) {
  if (probabilities.size() != expected) {
    throw_protocol(what + ": expected " + std::to_string(expected) +
                   " probabilities, got " +
                   std::to_string(probabilities.size()));
  }
  for (double p : probabilities) {
    if (!(p >= 0.0 && p <= 1.0)) {
      throw_protocol(what + ": probability outside [0, 1]");
    }
  }
}

BuiltinPredictor::BuiltinPredictor(ModelParams params)
    : params_(std::move(params)) {
  const std::size_t expected =
      params_.featurizer.dimension() * params_.num_classes;
  if (params_.weights.size() != expected) {
    throw_validation("model has " + std::to_string(params_.weights.size()) +
                     " weights, expected " + std::to_string(expected));
  }
  if (params_.kind == ModelKind::kMultispeaker && params_.num_classes < 2) {
    throw_validation("multi-speaker model needs at least 2 classes");
  }
  if (params_.kind != ModelKind::kMultispeaker && params_.num_classes != 1) {
    throw_validation("binary model must have exactly 1 weight row");
  }
}

PredictorKind BuiltinPredictor::kind() const {
  switch (params_.kind) {
    case ModelKind::kSpm:
      return PredictorKind::kBuiltinSpm;
    case ModelKind::kMpm:
      return PredictorKind::kBuiltinMpm;
    case ModelKind::kMultispeaker:
      return PredictorKind::kBuiltinMultispeaker;
  }
  return PredictorKind::kBuiltinMpm;
}

PredictorMode BuiltinPredictor::mode() const {
  switch (params_.kind) {
    case ModelKind::kSpm:
      return PredictorMode::kSpm;
    case ModelKind::kMpm:
      return PredictorMode::kMpm;
    case ModelKind::kMultispeaker:
      return PredictorMode::kMultispeaker;
  }
  return PredictorMode::kMpm;
}

double BuiltinPredictor::predict_spm(const Conversation& conv,
                                     const SpmContext& ctx) const {
  if (params_.kind != ModelKind::kSpm) return Predictor::predict_spm(conv, ctx);
  return sigmoid(
      spm_context_features(params_.featurizer, conv, ctx).dot(params_.weights));
}

WindowPrediction BuiltinPredictor::predict_mpm(const Conversation& conv,
                                               const MpmWindow& w) const {
  if (params_.kind != ModelKind::kMpm) return Predictor::predict_mpm(conv, w);
  WindowPrediction out;
  out.window_index = w.index;
  out.probabilities.reserve(w.num_boundaries());
  for (std::size_t i = 0; i < w.num_boundaries(); ++i) {
    out.probabilities.push_back(sigmoid(
        mpm_boundary_features(params_.featurizer, conv, w, i)
            .dot(params_.weights)));
  }
  return out;
}

WindowLabelScores BuiltinPredictor::predict_labels(const Conversation& conv,
                                                   const MpmWindow& w) const {
  if (params_.kind != ModelKind::kMultispeaker) {
    return Predictor::predict_labels(conv, w);
  }
  std::span<const Sentence> all(conv.sentences());
  const auto window = all.subspan(w.first, w.size());
  WindowLabelScores out;
  out.rows = w.size();
  out.cols = params_.num_classes;
  out.values.reserve(out.rows * out.cols);
  for (std::size_t i = 0; i < w.size(); ++i) {
    const auto probs =
        softmax_scores(params_.weights, params_.num_classes,
                       featurize_position(params_.featurizer, window, i));
    out.values.insert(out.values.end(), probs.begin(), probs.end());
  }
  return out;
}

ModelParams zero_model(ModelKind kind, const FeaturizerConfig& featurizer,
                       std::size_t num_classes) {
  ModelParams p;
  p.kind = kind;
  p.featurizer = featurizer;
  p.num_classes = kind == ModelKind::kMultispeaker ? num_classes : 1;
  p.weights.assign(featurizer.dimension() * p.num_classes, 0.0);
  return p;
}

PredictorHandle load_builtin_predictor(const std::string& path) {
  return std::make_shared<BuiltinPredictor>(load_model(path));
}

ConstantPredictor::ConstantPredictor(PredictorMode mode, double probability)
    : mode_(mode), probability_(probability) {
  if (!(probability >= 0.0 && probability <= 1.0)) {
    throw_config("constant probability must be in [0, 1]");
  }
  if (mode == PredictorMode::kMultispeaker) {
    throw_config("constant predictor supports spm and mpm modes only");
  }
}

double ConstantPredictor::predict_spm(const Conversation& conv,
                                      const SpmContext& ctx) const {
  if (mode_ != PredictorMode::kSpm) return Predictor::predict_spm(conv, ctx);
  return probability_;
}

WindowPrediction ConstantPredictor::predict_mpm(const Conversation& conv,
                                                const MpmWindow& w) const {
  if (mode_ != PredictorMode::kMpm) return Predictor::predict_mpm(conv, w);
  return {w.index, std::vector<double>(w.num_boundaries(), probability_)};
}

}  // namespace textdiar
