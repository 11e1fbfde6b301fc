#include <cmath>
#include <random>
#include <sstream>

#include "doctest.h"
#include "oracles.h"
#include "textdiar/errors.h"
#include "textdiar/model.h"
#include "textdiar/synth.h"
#include "textdiar/windowing.h"

using namespace textdiar;

namespace {

const double kLn2 = 0.6931471805599453;
const double kLn3 = 1.0986122886681098;

FeatureVector sparse(std::size_t dim, std::vector<std::pair<std::uint32_t, double>> nz) {
  FeatureVector x;
  x.dimension = dim;
  for (auto [i, v] : nz) {
    x.indices.push_back(i);
    x.values.push_back(v);
  }
  return x;
}

std::vector<Conversation> corpus(std::size_t count, std::size_t speakers,
                                 std::uint64_t seed) {
  CorpusConfig cfg;
  cfg.conversations = count;
  cfg.min_sentences = 6;
  cfg.max_sentences = 14;
  cfg.base.speakers = speakers;
  cfg.base.seed = seed;
  return generate_corpus(cfg);
}

std::vector<double> random_weights(std::mt19937_64& rng, std::size_t n) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  std::vector<double> w(n);
  for (auto& v : w) v = u(rng);
  return w;
}

}  // namespace

TEST_CASE("zero weights give ln 2 for spm and mpm objectives") {
  FeaturizerConfig f{10, true};
  auto data = corpus(3, 2, 1);
  std::vector<BinaryExample> spm, mpm;
  for (const auto& c : data) {
    auto a = spm_examples(c, f, 4, 3);
    auto b = mpm_examples(c, f, 6, 1);
    spm.insert(spm.end(), a.begin(), a.end());
    mpm.insert(mpm.end(), b.begin(), b.end());
  }
  std::vector<double> w(f.dimension(), 0.0);
  CHECK(std::fabs(binary_loss(w, spm, 1e-4).total() - kLn2) < 1e-9);
  CHECK(std::fabs(binary_loss(w, mpm, 1e-4).total() - kLn2) < 1e-9);
  auto trained = train_baseline_mpm(data, f, 6, 1, {0.5, 0, 1e-4, 0, 0});
  CHECK(std::fabs(trained.initial_loss.total() - kLn2) < 1e-9);
}

TEST_CASE("uniform softmax gives ln p") {
  FeaturizerConfig f{10, true};
  for (std::size_t p : {2, 3, 4}) {
    auto data = corpus(3, std::min<std::size_t>(p, 3), 2);
    std::vector<CategoricalExample> ex;
    for (const auto& c : data) {
      auto e = multispeaker_examples(c, f, 6, 1, p);
      ex.insert(ex.end(), e.begin(), e.end());
    }
    std::vector<double> w(f.dimension() * p, 0.0);
    CHECK(std::fabs(categorical_loss(w, p, ex, 1e-4).total() - std::log(double(p))) < 1e-9);
  }
  std::vector<CategoricalExample> one{{sparse(8, {{0, 1.0}}), 2}};
  std::vector<double> w(24, 0.0);
  CHECK(std::fabs(categorical_loss(w, 3, one, 0).data - kLn3) < 1e-9);
}

TEST_CASE("loss normalizers") {
  WindowSet ws(5, {{0, 0, 3}, {1, 2, 4}});
  CHECK(mpm_normalizer(ws) == 5);
  WindowSet single(2, {{0, 0, 1}});
  CHECK(multispeaker_normalizer(single) == 2);
  auto built = build_mpm_windows(6, 4, 1);
  CHECK(mpm_normalizer(built) == 9);
  CHECK(multispeaker_normalizer(built) == 12);
}

TEST_CASE("mpm loss is averaged over every window boundary") {
  FeaturizerConfig f{8, false};
  auto data = corpus(1, 2, 3);
  auto ex = mpm_examples(data[0], f, 4, 1);
  CHECK(ex.size() == mpm_normalizer(build_mpm_windows(data[0], 4, 1)));
}

TEST_CASE("binary gradient matches central differences") {
  FeaturizerConfig f{6, true};
  auto data = corpus(4, 2, 4);
  std::vector<BinaryExample> ex;
  for (const auto& c : data) {
    auto e = mpm_examples(c, f, 4, 1);
    ex.insert(ex.end(), e.begin(), e.end());
  }
  std::mt19937_64 rng(17);
  const double l2 = 1e-3;
  for (int t = 0; t < 10; ++t) {
    auto w = random_weights(rng, f.dimension());
    auto g = binary_gradient(w, ex, l2);
    double err = oracles::gradient_check(
        [&](const std::vector<double>& v) { return binary_loss(v, ex, l2).total(); },
        g, w);
    CHECK(err < 1e-4);
  }
}

TEST_CASE("categorical gradient matches central differences") {
  FeaturizerConfig f{5, true};
  auto data = corpus(3, 3, 5);
  std::vector<CategoricalExample> ex;
  for (const auto& c : data) {
    auto e = multispeaker_examples(c, f, 4, 1, 3);
    ex.insert(ex.end(), e.begin(), e.end());
  }
  std::mt19937_64 rng(19);
  for (int t = 0; t < 5; ++t) {
    auto w = random_weights(rng, f.dimension() * 3);
    auto g = categorical_gradient(w, 3, ex, 1e-3);
    double err = oracles::gradient_check(
        [&](const std::vector<double>& v) {
          return categorical_loss(v, 3, ex, 1e-3).total();
        },
        g, w);
    CHECK(err < 1e-4);
  }
}

TEST_CASE("gradient at a symmetric optimum and of the penalty at zero") {
  std::vector<BinaryExample> ex{{sparse(4, {{0, 1.0}}), 1.0},
                                {sparse(4, {{0, 1.0}}), 0.0}};
  std::vector<double> w(4, 0.0);
  for (double g : binary_gradient(w, ex, 0.3)) CHECK(g == 0.0);
  auto with = binary_gradient(w, ex, 0.3);
  auto without = binary_gradient(w, ex, 0.0);
  CHECK(with == without);
  CHECK(binary_loss(w, ex, 0.3).penalty == 0.0);
}

TEST_CASE("toy separable sets converge") {
  std::vector<BinaryExample> two{{sparse(16, {{0, 1.0}, {3, 1.0}}), 1.0},
                                 {sparse(16, {{0, 1.0}, {7, 1.0}}), 0.0}};
  TrainConfig tc;
  tc.learning_rate = 1.0;
  tc.epochs = 2000;
  auto r = train_logistic(two, 16, tc);
  CHECK(sigmoid(two[0].x.dot(r.weights)) >= 0.99);
  CHECK(sigmoid(two[1].x.dot(r.weights)) <= 0.01);

  std::vector<BinaryExample> four{{sparse(16, {{0, 1.0}, {1, 1.0}}), 1.0},
                                  {sparse(16, {{0, 1.0}, {2, 1.0}}), 1.0},
                                  {sparse(16, {{0, 1.0}, {3, 1.0}}), 0.0},
                                  {sparse(16, {{0, 1.0}, {4, 1.0}}), 0.0}};
  auto r4 = train_logistic(four, 16, tc);
  CHECK(r4.final_loss.data < 0.01);
  CHECK(r4.final_loss.total() < r4.initial_loss.total());
}

TEST_CASE("gradient step does not increase the regularized loss") {
  FeaturizerConfig f{8, true};
  auto data = corpus(3, 2, 6);
  std::vector<BinaryExample> ex;
  for (const auto& c : data) {
    auto e = spm_examples(c, f, 4, 3);
    ex.insert(ex.end(), e.begin(), e.end());
  }
  std::mt19937_64 rng(23);
  for (int t = 0; t < 20; ++t) {
    auto w = random_weights(rng, f.dimension());
    double before = binary_loss(w, ex, 1e-2).total();
    auto g = binary_gradient(w, ex, 1e-2);
    for (std::size_t i = 0; i < w.size(); ++i) w[i] -= 0.01 * g[i];
    CHECK(binary_loss(w, ex, 1e-2).total() <= before);
    CHECK(binary_loss(w, ex, 1e-2).data >= 0.0);
  }
}

TEST_CASE("training preconditions") {
  FeaturizerConfig f{8, true};
  std::vector<Conversation> none;
  CHECK_THROWS_AS(train_baseline_spm(none, f, 4, 3, {}), Error);
  std::vector<CategoricalExample> bad{{sparse(8, {{0, 1.0}}), 3}};
  try {
    train_softmax(bad, 8, 3, {});
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::kValidation);
  }
  std::vector<BinaryExample> single_class{{sparse(8, {{0, 1.0}}), 1.0},
                                          {sparse(8, {{0, 1.0}, {2, 1.0}}), 1.0}};
  auto r = train_logistic(single_class, 8, {});
  CHECK(r.final_loss.data < r.initial_loss.data);
  for (double w : r.weights) CHECK(std::isfinite(w));
}

TEST_CASE("training is deterministic for a seed") {
  FeaturizerConfig f{9, true};
  auto data = corpus(3, 2, 7);
  TrainConfig tc;
  tc.epochs = 20;
  tc.batch_size = 7;
  tc.seed = 99;
  auto a = train_baseline_mpm(data, f, 4, 1, tc);
  auto b = train_baseline_mpm(data, f, 4, 1, tc);
  CHECK(a.params == b.params);
  std::stringstream sa, sb;
  save_model(sa, a.params);
  save_model(sb, b.params);
  CHECK(sa.str() == sb.str());
}

TEST_CASE("model files round trip exactly") {
  FeaturizerConfig f{7, false};
  auto data = corpus(2, 3, 8);
  TrainConfig tc;
  tc.epochs = 10;
  auto m = train_baseline_multispeaker(data, f, 5, 2, 3, tc);
  std::stringstream buf;
  save_model(buf, m.params);
  auto back = load_model(buf);
  CHECK(back == m.params);
  CHECK(buf.str().rfind(kModelMagic, 0) == 0);
}

TEST_CASE("corrupt model files are parse errors") {
  auto expect_parse = [](const std::string& text) {
    std::istringstream in(text);
    try {
      load_model(in);
      FAIL("expected an error");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::kParse);
    }
  };
  expect_parse("NOT-A-MODEL\n");
  expect_parse("TEXTDIAR-MODEL\nversion 99\n");
  std::stringstream good;
  ModelParams p;
  p.featurizer.hash_bits = 5;
  p.weights.assign(32, 0.0);
  p.weights[3] = 0.25;
  save_model(good, p);
  std::string text = good.str();
  expect_parse(text.substr(0, text.size() - 4));
}

TEST_CASE("canonical window labels use first appearance") {
  std::vector<SpeakerLabel> l{"C", "A", "C", "B"};
  CHECK(canonical_window_labels(l) == std::vector<std::size_t>{0, 1, 0, 2});
}
