#pragma once

#include <cstddef>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "textdiar/model.h"
#include "textdiar/transcript.h"
#include "textdiar/windowing.h"

namespace textdiar {

enum class PredictorMode { kSpm, kMpm, kMultispeaker };
enum class PredictorKind {
  kBuiltinSpm,
  kBuiltinMpm,
  kBuiltinMultispeaker,
  kRemote,
  // Test instruments (synthetic oracles, constants).
  kSynthetic,
};

std::string to_string(PredictorMode mode);
PredictorMode predictor_mode_from_string(const std::string& s);

struct WindowPrediction {
  std::size_t window_index = 0;
  std::vector<double> probabilities;  // |w| - 1 values in [0, 1]
};

// Row-major |w| x p distribution over window-local speaker labels.
struct WindowLabelScores {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> values;

  double at(std::size_t r, std::size_t c) const { return values[r * cols + c]; }
};

// A speaker-change predictor. Implementations override the entry points
// matching their mode; the others raise a config error. All methods are
// const and may be called concurrently.
class Predictor {
 public:
  virtual ~Predictor() = default;

  virtual PredictorKind kind() const = 0;
  virtual PredictorMode mode() const = 0;

  // f(C_i): probability of a change at ctx.change_index.
  virtual double predict_spm(const Conversation& conv,
                             const SpmContext& ctx) const;
  // g(w_j): one probability per adjacent pair inside the window.
  virtual WindowPrediction predict_mpm(const Conversation& conv,
                                       const MpmWindow& w) const;
  virtual WindowLabelScores predict_labels(const Conversation& conv,
                                           const MpmWindow& w) const;
  virtual std::size_t num_speakers() const { return 2; }

  // Batch entry points; the defaults loop over the single-item calls.
  // Remote predictors override these to keep several requests in flight.
  virtual std::vector<double> predict_spm_all(
      const Conversation& conv, std::span<const SpmContext> contexts) const;
  virtual std::vector<WindowPrediction> predict_mpm_all(
      const Conversation& conv, const WindowSet& windows) const;
};

using PredictorHandle = std::shared_ptr<const Predictor>;

// Sigmoid-of-linear-score predictor backed by trained parameters.
class BuiltinPredictor final : public Predictor {
 public:
  explicit BuiltinPredictor(ModelParams params);

  PredictorKind kind() const override;
  PredictorMode mode() const override;
  double predict_spm(const Conversation& conv,
                     const SpmContext& ctx) const override;
  WindowPrediction predict_mpm(const Conversation& conv,
                               const MpmWindow& w) const override;
  WindowLabelScores predict_labels(const Conversation& conv,
                                   const MpmWindow& w) const override;
  std::size_t num_speakers() const override { return params_.num_classes; }

  const ModelParams& params() const { return params_; }

 private:
  ModelParams params_;
};

// Zero-weight builtin model of the given kind (every probability 0.5,
// every label distribution uniform).
ModelParams zero_model(ModelKind kind, const FeaturizerConfig& featurizer,
                       std::size_t num_classes = 1);

PredictorHandle load_builtin_predictor(const std::string& path);

// Returns the same probability for every boundary.
class ConstantPredictor final : public Predictor {
 public:
  ConstantPredictor(PredictorMode mode, double probability);

  PredictorKind kind() const override { return PredictorKind::kSynthetic; }
  PredictorMode mode() const override { return mode_; }
  double predict_spm(const Conversation& conv,
                     const SpmContext& ctx) const override;
  WindowPrediction predict_mpm(const Conversation& conv,
                               const MpmWindow& w) const override;

 private:
  PredictorMode mode_;
  double probability_;
};

// Checks a probability vector against the window contract; throws a
// protocol error on length mismatch or values outside [0, 1].
void validate_probabilities(std::span<const double> probabilities,
                            std::size_t expected, const std::string& what);

}  // namespace textdiar
