#include <cmath>

#include "doctest.h"
#include "textdiar/features.h"

using namespace textdiar;

namespace {

Sentence s(const std::string& text, std::size_t i = 0) {
  return {i, text, {}, {}, {}};
}

}  // namespace

TEST_CASE("overlap feature") {
  FeaturizerConfig cfg{12, true};
  std::vector<Sentence> ctx{s("How are you?"), s("How are you?", 1)};
  auto same = featurize(cfg, ctx[0], ctx[1], ctx, 0);
  CHECK(same.value_at(kOverlap) == 1.0);
  std::vector<Sentence> ctx2{s("How are you?"), s("Fine thanks.", 1)};
  auto disjoint = featurize(cfg, ctx2[0], ctx2[1], ctx2, 0);
  CHECK(disjoint.value_at(kOverlap) == 0.0);
  CHECK(token_jaccard("a b c", "b c d") == doctest::Approx(0.5));
  CHECK(token_jaccard("...", "!!") == 0.0);
}

TEST_CASE("dense slots") {
  FeaturizerConfig cfg{10, false};
  std::vector<Sentence> ctx{s("Is it late?"), s("Yes it is.", 1)};
  auto x = featurize(cfg, ctx[0], ctx[1], ctx, 0);
  CHECK(x.value_at(kBias) == 1.0);
  CHECK(x.value_at(kLeftQuestion) == 1.0);
  CHECK(x.value_at(kRightQuestion) == 0.0);
  CHECK(x.value_at(kQuestionThenStatement) == 1.0);
  CHECK(x.value_at(kLeftTokens) == doctest::Approx(std::log1p(3.0) / 2.0));
}

TEST_CASE("feature vectors are deterministic, sorted and in range") {
  FeaturizerConfig cfg{8, true};
  std::vector<Sentence> ctx{s("Well, I think so."), s("Do you? Really!", 1),
                            s("Yes.", 2)};
  auto a = featurize(cfg, ctx[0], ctx[1], ctx, 0);
  auto b = featurize(cfg, ctx[0], ctx[1], ctx, 0);
  CHECK(a == b);
  CHECK(a.dimension == 256);
  for (std::size_t i = 0; i < a.nnz(); ++i) {
    CHECK(a.indices[i] < a.dimension);
    CHECK(std::isfinite(a.values[i]));
    if (i > 0) CHECK(a.indices[i - 1] < a.indices[i]);
  }
  auto dense = a.to_dense();
  CHECK(dense.size() == 256);
  std::vector<double> w(256, 0.5);
  double expect = 0;
  for (double v : dense) expect += 0.5 * v;
  CHECK(a.dot(w) == doctest::Approx(expect));
}

TEST_CASE("position features") {
  FeaturizerConfig cfg{9, true};
  std::vector<Sentence> w{s("Hello there."), s("Hi."), s("Hello there again.")};
  auto x0 = featurize_position(cfg, w, 0);
  auto x2 = featurize_position(cfg, w, 2);
  CHECK(x0.value_at(kOverlap) == 1.0);
  CHECK(x2.value_at(kOverlap) > 0.0);
  CHECK_FALSE(x0 == x2);
}
