#include "textdiar/model.h"

#include <algorithm>
#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <istream>
#include <map>
#include <numeric>
#include <ostream>
#include <random>
#include <sstream>

#include "textdiar/errors.h"
#include "textdiar/jsonl.h"
#include "textdiar/simd/kernels.h"

namespace textdiar {

double sigmoid(double z) {
  if (z >= 0) return 1.0 / (1.0 + std::exp(-z));
  const double e = std::exp(z);
  return e / (1.0 + e);
}

namespace {

// -[y log s(z) + (1-y) log(1-s(z))] without overflow.
double bce_from_logit(double z, double y) {
  return std::max(z, 0.0) - y * z + std::log1p(std::exp(-std::abs(z)));
}

void check_weights(std::span<const double> weights, std::size_t dimension,
                   const char* what) {
  if (weights.size() != dimension) {
    throw_validation(std::string(what) + ": weight size " +
                     std::to_string(weights.size()) + " != " +
                     std::to_string(dimension));
  }
}

std::size_t dimension_of(std::span<const BinaryExample> ex) {
  return ex.empty() ? 0 : ex.front().x.dimension;
}
std::size_t dimension_of(std::span<const CategoricalExample> ex) {
  return ex.empty() ? 0 : ex.front().x.dimension;
}

void accumulate_binary_gradient(std::span<const double> weights,
                                std::span<const BinaryExample> examples,
                                std::span<double> grad) {
  const double inv_n = 1.0 / static_cast<double>(examples.size());
  for (const auto& ex : examples) {
    const double residual = sigmoid(ex.x.dot(weights)) - ex.y;
    ex.x.add_to(grad, residual * inv_n);
  }
}

void accumulate_categorical_gradient(
    std::span<const double> weights, std::size_t num_classes,
    std::span<const CategoricalExample> examples, std::span<double> grad) {
  const double inv_n = 1.0 / static_cast<double>(examples.size());
  const std::size_t dim = examples.front().x.dimension;
  for (const auto& ex : examples) {
    const auto probs = softmax_scores(weights, num_classes, ex.x);
    for (std::size_t k = 0; k < num_classes; ++k) {
      const double residual = probs[k] - (k == ex.label ? 1.0 : 0.0);
      ex.x.add_to(grad.subspan(k * dim, dim), residual * inv_n);
    }
  }
}

}  // namespace

LossValue binary_loss(std::span<const double> weights,
                      std::span<const BinaryExample> examples, double l2) {
  if (examples.empty()) throw_validation("binary_loss: no examples");
  check_weights(weights, dimension_of(examples), "binary_loss");
  double acc = 0.0;
  for (const auto& ex : examples) {
    acc += bce_from_logit(ex.x.dot(weights), ex.y);
  }
  LossValue out;
  out.data = acc / static_cast<double>(examples.size());
  out.penalty = 0.5 * l2 * simd::sum_squares(weights);
  return out;
}

std::vector<double> binary_gradient(std::span<const double> weights,
                                    std::span<const BinaryExample> examples,
                                    double l2) {
  if (examples.empty()) throw_validation("binary_gradient: no examples");
  check_weights(weights, dimension_of(examples), "binary_gradient");
  std::vector<double> grad(weights.size(), 0.0);
  accumulate_binary_gradient(weights, examples, grad);
  simd::axpy(l2, weights, grad);
  return grad;
}

std::vector<double> softmax_scores(std::span<const double> weights,
                                   std::size_t num_classes,
                                   const FeatureVector& x) {
  const std::size_t dim = x.dimension;
  std::vector<double> z(num_classes);
  for (std::size_t k = 0; k < num_classes; ++k) {
    z[k] = x.dot(weights.subspan(k * dim, dim));
  }
  const double zmax = *std::max_element(z.begin(), z.end());
  double sum = 0.0;
  for (auto& v : z) {
    v = std::exp(v - zmax);
    sum += v;
  }
  for (auto& v : z) v /= sum;
  return z;
}

LossValue categorical_loss(std::span<const double> weights,
                           std::size_t num_classes,
                           std::span<const CategoricalExample> examples,
                           double l2) {
  if (examples.empty()) throw_validation("categorical_loss: no examples");
  if (num_classes < 2) throw_config("categorical_loss: need >= 2 classes");
  const std::size_t dim = dimension_of(examples);
  check_weights(weights, dim * num_classes, "categorical_loss");
  double acc = 0.0;
  for (const auto& ex : examples) {
    if (ex.label >= num_classes) {
      throw_validation("label " + std::to_string(ex.label) +
                       " >= number of speakers " + std::to_string(num_classes));
    }
    std::vector<double> z(num_classes);
    for (std::size_t k = 0; k < num_classes; ++k) {
      z[k] = ex.x.dot(weights.subspan(k * dim, dim));
    }
    const double zmax = *std::max_element(z.begin(), z.end());
    double sum = 0.0;
    for (double v : z) sum += std::exp(v - zmax);
    acc += zmax + std::log(sum) - z[ex.label];
  }
  LossValue out;
  out.data = acc / static_cast<double>(examples.size());
  out.penalty = 0.5 * l2 * simd::sum_squares(weights);
  return out;
}

std::vector<double> categorical_gradient(
    std::span<const double> weights, std::size_t num_classes,
    std::span<const CategoricalExample> examples, double l2) {
  if (examples.empty()) throw_validation("categorical_gradient: no examples");
  const std::size_t dim = dimension_of(examples);
  check_weights(weights, dim * num_classes, "categorical_gradient");
  std::vector<double> grad(weights.size(), 0.0);
  accumulate_categorical_gradient(weights, num_classes, examples, grad);
  simd::axpy(l2, weights, grad);
  return grad;
}

namespace {

// Plain gradient descent; batch order is a seeded shuffle when mini-batches
// are requested.
template <typename Example, typename Accumulate, typename Loss>
TrainResult descend(std::span<const Example> examples, std::size_t num_weights,
                    const TrainConfig& cfg, Accumulate accumulate, Loss loss) {
  if (examples.empty()) throw_validation("training set is empty");
  if (!(cfg.learning_rate > 0)) throw_config("learning_rate must be > 0");
  if (cfg.l2 < 0) throw_config("l2 must be >= 0");

  TrainResult out;
  out.weights.assign(num_weights, 0.0);
  out.initial_loss = loss(out.weights, examples);

  const std::size_t n = examples.size();
  const std::size_t batch =
      cfg.batch_size == 0 ? n : std::min(cfg.batch_size, n);
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::mt19937_64 rng(cfg.seed);
  std::vector<Example> scratch;
  std::vector<double> grad(num_weights, 0.0);

  for (std::size_t epoch = 0; epoch < cfg.epochs; ++epoch) {
    if (batch < n) std::shuffle(order.begin(), order.end(), rng);
    for (std::size_t start = 0; start < n; start += batch) {
      const std::size_t stop = std::min(n, start + batch);
      std::span<const Example> view;
      if (batch == n) {
        view = examples;
      } else {
        scratch.clear();
        for (std::size_t i = start; i < stop; ++i) {
          scratch.push_back(examples[order[i]]);
        }
        view = scratch;
      }
      std::fill(grad.begin(), grad.end(), 0.0);
      accumulate(out.weights, view, grad);
      simd::decay_step(out.weights, grad, cfg.learning_rate, cfg.l2);
    }
  }
  out.final_loss = loss(out.weights, examples);
  return out;
}

}  // namespace

TrainResult train_logistic(std::span<const BinaryExample> examples,
                           std::size_t dimension, const TrainConfig& cfg) {
  for (const auto& ex : examples) {
    if (ex.y != 0.0 && ex.y != 1.0) throw_validation("labels must be 0 or 1");
    if (ex.x.dimension != dimension) {
      throw_validation("example dimension mismatch");
    }
  }
  return descend<BinaryExample>(
      examples, dimension, cfg,
      [](std::span<const double> w, std::span<const BinaryExample> ex,
         std::span<double> g) { accumulate_binary_gradient(w, ex, g); },
      [&](std::span<const double> w, std::span<const BinaryExample> ex) {
        return binary_loss(w, ex, cfg.l2);
      });
}

TrainResult train_softmax(std::span<const CategoricalExample> examples,
                          std::size_t dimension, std::size_t num_classes,
                          const TrainConfig& cfg) {
  if (num_classes < 2) throw_config("number of speakers must be >= 2");
  for (const auto& ex : examples) {
    if (ex.label >= num_classes) {
      throw_validation("label " + std::to_string(ex.label) +
                       " >= number of speakers " + std::to_string(num_classes));
    }
    if (ex.x.dimension != dimension) {
      throw_validation("example dimension mismatch");
    }
  }
  return descend<CategoricalExample>(
      examples, dimension * num_classes, cfg,
      [num_classes](std::span<const double> w,
                    std::span<const CategoricalExample> ex,
                    std::span<double> g) {
        accumulate_categorical_gradient(w, num_classes, ex, g);
      },
      [&](std::span<const double> w, std::span<const CategoricalExample> ex) {
        return categorical_loss(w, num_classes, ex, cfg.l2);
      });
}

std::size_t mpm_normalizer(const WindowSet& windows) {
  std::size_t total = 0;
  for (const auto& w : windows.windows()) total += w.size() - 1;
  return total;
}

std::size_t multispeaker_normalizer(const WindowSet& windows) {
  std::size_t total = 0;
  for (const auto& w : windows.windows()) total += w.size();
  return total;
}

std::vector<std::size_t> canonical_window_labels(
    std::span<const SpeakerLabel> labels) {
  std::vector<std::size_t> out;
  out.reserve(labels.size());
  std::map<SpeakerLabel, std::size_t> seen;
  for (const auto& l : labels) {
    auto [it, inserted] = seen.emplace(l, seen.size());
    out.push_back(it->second);
  }
  return out;
}

std::string to_string(ModelKind kind) {
  switch (kind) {
    case ModelKind::kSpm:
      return "builtin-spm";
    case ModelKind::kMpm:
      return "builtin-mpm";
    case ModelKind::kMultispeaker:
      return "builtin-multispeaker";
  }
  return "unknown";
}

ModelKind model_kind_from_string(const std::string& s) {
  if (s == "builtin-spm") return ModelKind::kSpm;
  if (s == "builtin-mpm") return ModelKind::kMpm;
  if (s == "builtin-multispeaker") return ModelKind::kMultispeaker;
  throw_parse("unknown model kind '" + s + "'");
}

void save_model(std::ostream& out, const ModelParams& p) {
  const std::size_t expected = p.featurizer.dimension() * p.num_classes;
  if (p.weights.size() != expected) {
    throw_validation("model weights have size " +
                     std::to_string(p.weights.size()) + ", expected " +
                     std::to_string(expected));
  }
  std::size_t nonzero = 0;
  for (double w : p.weights) nonzero += (w != 0.0);
  out << kModelMagic << '\n'
      << "version " << kModelVersion << '\n'
      << "kind " << to_string(p.kind) << '\n'
      << "hash_bits " << p.featurizer.hash_bits << '\n'
      << "bigrams " << (p.featurizer.bigrams ? 1 : 0) << '\n'
      << "classes " << p.num_classes << '\n'
      << "context_front " << p.context_front << '\n'
      << "context_back " << p.context_back << '\n'
      << "window_len " << p.window_len << '\n'
      << "stride " << p.stride << '\n'
      << "nonzero " << nonzero << '\n';
  char buf[64];
  for (std::size_t i = 0; i < p.weights.size(); ++i) {
    if (p.weights[i] == 0.0) continue;
    std::snprintf(buf, sizeof(buf), "%zu %a\n", i, p.weights[i]);
    out << buf;
  }
  out << "end\n";
}

void save_model(const std::string& path, const ModelParams& params) {
  auto out = open_output(path);
  save_model(out, params);
  if (!out) throw_io("write failed: " + path);
}

ModelParams load_model(std::istream& in, const std::string& source) {
  std::string line;
  std::size_t line_no = 0;
  auto next = [&]() -> std::string {
    if (!std::getline(in, line)) {
      throw_parse(source + ": unexpected end of model file");
    }
    ++line_no;
    return line;
  };
  auto where = [&] { return source + ":" + std::to_string(line_no); };

  if (next() != kModelMagic) throw_parse(where() + ": not a model file");
  std::map<std::string, std::string> header;
  std::size_t nonzero = 0;
  for (;;) {
    std::istringstream ss(next());
    std::string key, value;
    if (!(ss >> key >> value)) throw_parse(where() + ": malformed header");
    header[key] = value;
    if (key == "nonzero") {
      nonzero = std::stoull(value);
      break;
    }
  }
  auto get = [&](const std::string& key) -> std::string {
    auto it = header.find(key);
    if (it == header.end()) throw_parse(source + ": missing header '" + key + "'");
    return it->second;
  };
  auto get_size = [&](const std::string& key) -> std::size_t {
    try {
      return std::stoull(get(key));
    } catch (const std::logic_error&) {
      throw_parse(source + ": header '" + key + "' is not an integer");
    }
  };

  if (get_size("version") != static_cast<std::size_t>(kModelVersion)) {
    throw_parse(source + ": unsupported model version " + get("version"));
  }
  ModelParams p;
  p.kind = model_kind_from_string(get("kind"));
  p.featurizer.hash_bits = static_cast<std::uint32_t>(get_size("hash_bits"));
  if (p.featurizer.hash_bits < 5 || p.featurizer.hash_bits > 26) {
    throw_parse(source + ": hash_bits out of range");
  }
  p.featurizer.bigrams = get_size("bigrams") != 0;
  p.num_classes = get_size("classes");
  p.context_front = get_size("context_front");
  p.context_back = get_size("context_back");
  p.window_len = get_size("window_len");
  p.stride = get_size("stride");
  if (p.num_classes < 1 || p.num_classes > 64) {
    throw_parse(source + ": classes out of range");
  }
  p.weights.assign(p.featurizer.dimension() * p.num_classes, 0.0);
  for (std::size_t i = 0; i < nonzero; ++i) {
    next();
    char* end = nullptr;
    const unsigned long long index = std::strtoull(line.c_str(), &end, 10);
    if (end == line.c_str() || *end != ' ') {
      throw_parse(where() + ": malformed weight line");
    }
    const char* value_begin = end + 1;
    const double value = std::strtod(value_begin, &end);
    if (end == value_begin || index >= p.weights.size() || !std::isfinite(value)) {
      throw_parse(where() + ": malformed weight line");
    }
    p.weights[index] = value;
  }
  if (next() != "end") throw_parse(where() + ": expected 'end'");
  return p;
}

ModelParams load_model(const std::string& path) {
  auto in = open_input(path);
  return load_model(in, path);
}

FeatureVector spm_context_features(const FeaturizerConfig& cfg,
                                   const Conversation& conv,
                                   const SpmContext& ctx) {
  std::span<const Sentence> all(conv.sentences());
  return featurize(cfg, conv[ctx.change_index], conv[ctx.change_index + 1],
                   all.subspan(ctx.first, ctx.size()), ctx.boundary_offset());
}

FeatureVector mpm_boundary_features(const FeaturizerConfig& cfg,
                                    const Conversation& conv,
                                    const MpmWindow& w, std::size_t i) {
  std::span<const Sentence> all(conv.sentences());
  auto window = all.subspan(w.first, w.size());
  auto x = featurize(cfg, window[i], window[i + 1], window, i);
  return x;
}

std::vector<BinaryExample> spm_examples(const Conversation& conv,
                                        const FeaturizerConfig& cfg,
                                        std::size_t front, std::size_t back) {
  const auto gold = derive_change_sequence(gold_assignment(conv));
  std::vector<BinaryExample> out;
  for (const auto& ctx : build_spm_contexts(conv, front, back)) {
    out.push_back({spm_context_features(cfg, conv, ctx),
                   static_cast<double>(gold.decisions[ctx.change_index])});
  }
  return out;
}

std::vector<BinaryExample> mpm_examples(const Conversation& conv,
                                        const FeaturizerConfig& cfg,
                                        std::size_t window_len,
                                        std::size_t stride) {
  std::vector<BinaryExample> out;
  if (conv.size() < 2) return out;
  const auto gold = derive_change_sequence(gold_assignment(conv));
  const auto ws = build_mpm_windows(conv, window_len, stride);
  for (const auto& w : ws.windows()) {
    for (std::size_t i = 0; i < w.num_boundaries(); ++i) {
      out.push_back({mpm_boundary_features(cfg, conv, w, i),
                     static_cast<double>(gold.decisions[w.first + i])});
    }
  }
  return out;
}

std::vector<CategoricalExample> multispeaker_examples(
    const Conversation& conv, const FeaturizerConfig& cfg,
    std::size_t window_len, std::size_t stride, std::size_t num_classes) {
  std::vector<CategoricalExample> out;
  if (conv.size() < 2) return out;
  const auto gold = gold_assignment(conv);
  const auto ws = build_mpm_windows(conv, window_len, stride);
  std::span<const Sentence> all(conv.sentences());
  std::span<const SpeakerLabel> labels(gold.labels);
  for (const auto& w : ws.windows()) {
    const auto canon = canonical_window_labels(labels.subspan(w.first, w.size()));
    const auto window = all.subspan(w.first, w.size());
    for (std::size_t i = 0; i < w.size(); ++i) {
      if (canon[i] >= num_classes) {
        throw_validation("conversation '" + conv.id() + "' window " +
                         std::to_string(w.index) + " has more than " +
                         std::to_string(num_classes) + " speakers");
      }
      out.push_back({featurize_position(cfg, window, i), canon[i]});
    }
  }
  return out;
}

namespace {

template <typename Example, typename Build>
std::vector<Example> collect(std::span<const Conversation> data, Build build) {
  std::vector<Example> out;
  for (const auto& conv : data) {
    auto ex = build(conv);
    std::move(ex.begin(), ex.end(), std::back_inserter(out));
  }
  if (out.empty()) {
    throw_validation("training data has no prediction points");
  }
  return out;
}

}  // namespace

TrainedModel train_baseline_spm(std::span<const Conversation> data,
                                const FeaturizerConfig& featurizer,
                                std::size_t front, std::size_t back,
                                const TrainConfig& cfg) {
  const auto examples = collect<BinaryExample>(data, [&](const Conversation& c) {
    return spm_examples(c, featurizer, front, back);
  });
  auto r = train_logistic(examples, featurizer.dimension(), cfg);
  TrainedModel out;
  out.params.kind = ModelKind::kSpm;
  out.params.featurizer = featurizer;
  out.params.context_front = front;
  out.params.context_back = back;
  out.params.window_len = front + back + 1;
  out.params.weights = std::move(r.weights);
  out.initial_loss = r.initial_loss;
  out.final_loss = r.final_loss;
  return out;
}

TrainedModel train_baseline_mpm(std::span<const Conversation> data,
                                const FeaturizerConfig& featurizer,
                                std::size_t window_len, std::size_t stride,
                                const TrainConfig& cfg) {
  const auto examples = collect<BinaryExample>(data, [&](const Conversation& c) {
    return mpm_examples(c, featurizer, window_len, stride);
  });
  auto r = train_logistic(examples, featurizer.dimension(), cfg);
  TrainedModel out;
  out.params.kind = ModelKind::kMpm;
  out.params.featurizer = featurizer;
  out.params.window_len = window_len;
  out.params.stride = stride;
  const auto split = split_context_length(window_len);
  out.params.context_front = split.front;
  out.params.context_back = split.back;
  out.params.weights = std::move(r.weights);
  out.initial_loss = r.initial_loss;
  out.final_loss = r.final_loss;
  return out;
}

TrainedModel train_baseline_multispeaker(std::span<const Conversation> data,
                                         const FeaturizerConfig& featurizer,
                                         std::size_t window_len,
                                         std::size_t stride,
                                         std::size_t num_speakers,
                                         const TrainConfig& cfg) {
  if (num_speakers < 2) throw_config("number of speakers must be >= 2");
  const auto examples =
      collect<CategoricalExample>(data, [&](const Conversation& c) {
        return multispeaker_examples(c, featurizer, window_len, stride,
                                     num_speakers);
      });
  auto r = train_softmax(examples, featurizer.dimension(), num_speakers, cfg);
  TrainedModel out;
  out.params.kind = ModelKind::kMultispeaker;
  out.params.featurizer = featurizer;
  out.params.num_classes = num_speakers;
  out.params.window_len = window_len;
  out.params.stride = stride;
  const auto split = split_context_length(window_len);
  out.params.context_front = split.front;
  out.params.context_back = split.back;
  out.params.weights = std::move(r.weights);
  out.initial_loss = r.initial_loss;
  out.final_loss = r.final_loss;
  return out;
}

}  // namespace textdiar
