#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "textdiar/features.h"
#include "textdiar/transcript.h"
#include "textdiar/windowing.h"

namespace textdiar {

struct BinaryExample {
  FeatureVector x;
  double y = 0.0;  // 0 or 1
};

struct CategoricalExample {
  FeatureVector x;
  std::size_t label = 0;
};

struct TrainConfig {
  double learning_rate = 0.5;
  std::size_t epochs = 200;
  double l2 = 1e-4;
  // 0 means full batch.
  std::size_t batch_size = 0;
  std::uint64_t seed = 0;
};

// Cross-entropy averaged over prediction points, with the L2 penalty
// (l2 / 2 * |w|^2) reported separately.
struct LossValue {
  double data = 0.0;
  double penalty = 0.0;
  double total() const { return data + penalty; }
};

double sigmoid(double z);

// Mean binary cross-entropy of sigmoid(w.x) over the examples.
LossValue binary_loss(std::span<const double> weights,
                      std::span<const BinaryExample> examples, double l2);
// Gradient of binary_loss(...).total().
std::vector<double> binary_gradient(std::span<const double> weights,
                                    std::span<const BinaryExample> examples,
                                    double l2);

// Mean multi-class cross-entropy of softmax(W x); weights are row-major
// num_classes x dimension.
LossValue categorical_loss(std::span<const double> weights,
                           std::size_t num_classes,
                           std::span<const CategoricalExample> examples,
                           double l2);
std::vector<double> categorical_gradient(
    std::span<const double> weights, std::size_t num_classes,
    std::span<const CategoricalExample> examples, double l2);

std::vector<double> softmax_scores(std::span<const double> weights,
                                   std::size_t num_classes,
                                   const FeatureVector& x);

struct TrainResult {
  std::vector<double> weights;
  LossValue initial_loss;
  LossValue final_loss;
};

TrainResult train_logistic(std::span<const BinaryExample> examples,
                           std::size_t dimension, const TrainConfig& cfg);
TrainResult train_softmax(std::span<const CategoricalExample> examples,
                          std::size_t dimension, std::size_t num_classes,
                          const TrainConfig& cfg);

// Loss normalizers: number of boundary predictions sum(|w|-1) for MPM and
// number of labeled positions sum(|w|) for the multi-speaker head.
std::size_t mpm_normalizer(const WindowSet& windows);
std::size_t multispeaker_normalizer(const WindowSet& windows);

// Labels of a window renamed by order of first appearance (0, 1, ...), so
// window-local label spaces are canonical for training.
std::vector<std::size_t> canonical_window_labels(
    std::span<const SpeakerLabel> labels);

enum class ModelKind { kSpm, kMpm, kMultispeaker };

std::string to_string(ModelKind kind);
ModelKind model_kind_from_string(const std::string& s);

// Parameters of a builtin predictor plus the configuration it was trained
// with.
struct ModelParams {
  ModelKind kind = ModelKind::kMpm;
  FeaturizerConfig featurizer;
  std::size_t num_classes = 1;  // softmax classes; 1 for logistic heads
  std::size_t context_front = 4;
  std::size_t context_back = 3;
  std::size_t window_len = 8;
  std::size_t stride = 1;
  std::vector<double> weights;

  bool operator==(const ModelParams&) const = default;
};

// Text format: magic line, version, key/value header, then the non-zero
// weights as "index hexfloat" lines and a terminating "end".
inline constexpr const char* kModelMagic = "TEXTDIAR-MODEL";
inline constexpr int kModelVersion = 1;

void save_model(std::ostream& out, const ModelParams& params);
void save_model(const std::string& path, const ModelParams& params);
ModelParams load_model(std::istream& in, const std::string& source = "model");
ModelParams load_model(const std::string& path);

// Training set construction from gold-labeled conversations.
std::vector<BinaryExample> spm_examples(const Conversation& conv,
                                        const FeaturizerConfig& cfg,
                                        std::size_t front, std::size_t back);
std::vector<BinaryExample> mpm_examples(const Conversation& conv,
                                        const FeaturizerConfig& cfg,
                                        std::size_t window_len,
                                        std::size_t stride);
std::vector<CategoricalExample> multispeaker_examples(
    const Conversation& conv, const FeaturizerConfig& cfg,
    std::size_t window_len, std::size_t stride, std::size_t num_classes);

// Features of boundary i (left member at window position i) inside window w.
FeatureVector mpm_boundary_features(const FeaturizerConfig& cfg,
                                    const Conversation& conv,
                                    const MpmWindow& w, std::size_t i);
FeatureVector spm_context_features(const FeaturizerConfig& cfg,
                                   const Conversation& conv,
                                   const SpmContext& ctx);

struct TrainedModel {
  ModelParams params;
  LossValue initial_loss;
  LossValue final_loss;
};

TrainedModel train_baseline_spm(std::span<const Conversation> data,
                                const FeaturizerConfig& featurizer,
                                std::size_t front, std::size_t back,
                                const TrainConfig& cfg);
TrainedModel train_baseline_mpm(std::span<const Conversation> data,
                                const FeaturizerConfig& featurizer,
                                std::size_t window_len, std::size_t stride,
                                const TrainConfig& cfg);
TrainedModel train_baseline_multispeaker(std::span<const Conversation> data,
                                         const FeaturizerConfig& featurizer,
                                         std::size_t window_len,
                                         std::size_t stride,
                                         std::size_t num_speakers,
                                         const TrainConfig& cfg);

}  // namespace textdiar
