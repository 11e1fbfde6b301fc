#include <cmath>
#include <random>

#include "doctest.h"
#include "oracles.h"
#include "textdiar/errors.h"
#include "textdiar/metrics.h"

using namespace textdiar;

namespace {

using L = std::vector<SpeakerLabel>;

ConversationScore score(std::string id, std::size_t sentences, std::size_t words,
                        std::size_t errors, std::optional<double> minutes = {}) {
  ConversationScore s;
  s.id = std::move(id);
  s.sentences = sentences;
  s.words = words;
  s.errors = errors;
  s.minutes = minutes;
  return s;
}

Conversation conv(const std::string& id, const std::vector<std::string>& texts,
                  const L& speakers) {
  std::vector<Sentence> s;
  for (std::size_t i = 0; i < texts.size(); ++i) s.push_back({i, texts[i], speakers[i], {}, {}});
  return Conversation(id, std::move(s));
}

}  // namespace

TEST_CASE("speaker mapping examples") {
  auto swap = optimal_speaker_mapping({"A", "A", "B", "B"}, {"B", "B", "A", "A"});
  CHECK(swap.mismatches == 0);
  CHECK(swap.hyp_to_ref.at("B") == "A");
  auto one = optimal_speaker_mapping({"A", "B"}, {"A", "A"});
  CHECK(one.mismatches == 1);
  CHECK(one.hyp_to_ref.at("A") == "A");
  auto same = optimal_speaker_mapping({"A", "B", "A"}, {"A", "B", "A"});
  CHECK(same.mismatches == 0);
  CHECK(same.hyp_to_ref.at("B") == "B");
  CHECK_THROWS_AS(optimal_speaker_mapping({"A"}, {"A", "B"}), Error);
}

TEST_CASE("speaker mapping equals brute force") {
  std::mt19937_64 rng(67);
  for (int t = 0; t < 500; ++t) {
    std::size_t n = 1 + rng() % 25;
    std::size_t kr = 1 + rng() % 6, kh = 1 + rng() % 6;
    L ref(n), hyp(n);
    for (auto& x : ref) x = std::string(1, char('A' + rng() % kr));
    for (auto& x : hyp) x = std::string(1, char('p' + rng() % kh));
    CHECK(optimal_speaker_mapping(ref, hyp).mismatches ==
          oracles::brute_force_mismatches(ref, hyp));
  }
}

TEST_CASE("wder examples") {
  L ref(10, "A"), hyp(10, "A");
  ref[3] = ref[7] = "B";
  hyp[3] = hyp[7] = "A";
  hyp[0] = "A";
  CHECK(wder(ref, hyp).wder() == doctest::Approx(0.2));
  CHECK(wder(ref, ref).wder() == 0.0);
  L alt, constant(8, "A");
  for (int i = 0; i < 8; ++i) alt.push_back(i % 2 ? "B" : "A");
  CHECK(wder(alt, constant).wder() == 0.5);
  auto empty = wder({}, {});
  CHECK(empty.empty);
  CHECK(empty.wder() == 0.0);
}

TEST_CASE("wder is invariant under hypothesis relabeling") {
  std::mt19937_64 rng(71);
  for (int t = 0; t < 1000; ++t) {
    std::size_t n = 1 + rng() % 40, k = 2 + rng() % 4;
    L ref(n), hyp(n);
    for (auto& x : ref) x = std::string(1, char('A' + rng() % k));
    for (auto& x : hyp) x = std::string(1, char('A' + rng() % k));
    std::vector<char> perm{'A', 'B', 'C', 'D', 'E'};
    std::shuffle(perm.begin(), perm.begin() + k, rng);
    L relabeled(n);
    for (std::size_t i = 0; i < n; ++i) relabeled[i] = std::string(1, perm[hyp[i][0] - 'A']);
    CHECK(wder(ref, hyp).errors == wder(ref, relabeled).errors);
    bool two = k == 2 && std::count(ref.begin(), ref.end(), "A") > 0 &&
               std::count(ref.begin(), ref.end(), "B") > 0;
    if (two) CHECK(wder(ref, hyp).wder() <= 0.5);
  }
}

TEST_CASE("wder-s") {
  std::vector<ConversationScore> s{score("a", 2, 10, 1), score("b", 8, 10, 3)};
  CHECK(std::fabs(wder_s(s) - 0.26) < 1e-12);
  std::vector<ConversationScore> same{score("a", 3, 10, 2), score("b", 7, 20, 4)};
  CHECK(wder_s(same) == doctest::Approx(0.2));
  CHECK(wder_s({score("a", 5, 8, 2)}) == 0.25);
  CHECK_THROWS_AS(wder_s({}), Error);
}

TEST_CASE("corpus summary bounds") {
  std::vector<ConversationScore> s{score("a", 2, 10, 1), score("b", 8, 30, 9),
                                   score("c", 4, 5, 0)};
  auto sum = summarize(s);
  CHECK(*sum.wder_pooled == doctest::Approx(10.0 / 45.0));
  CHECK(*sum.wder_mean == doctest::Approx((0.1 + 0.3 + 0.0) / 3));
  CHECK(*sum.wder_pooled >= 0.0);
  CHECK(*sum.wder_pooled <= 0.3);
  CHECK(*sum.wder_s <= 0.3);
}

TEST_CASE("score_conversation weights errors by words") {
  auto gold = conv("g", {"one two three", "four", "five six"}, {"A", "B", "A"});
  auto s = score_conversation(gold, {"A", "A", "A"});
  CHECK(s.words == 6);
  CHECK(s.errors == 1);
  CHECK(s.sentences == 3);
  CHECK(score_conversation(gold, {"B", "A", "B"}).errors == 0);
}

TEST_CASE("bucket report") {
  std::vector<ConversationScore> s{score("long", 40, 100, 10, 20.0),
                                   score("short", 10, 50, 5, 3.0),
                                   score("mid", 20, 50, 0, 12.0)};
  auto r = bucket_report(s, BucketMode::kMinutes, default_bucket_edges(BucketMode::kMinutes),
                         default_split(BucketMode::kMinutes));
  REQUIRE(r.buckets.size() == 7);
  CHECK(r.buckets[2].lower == 10.0);
  CHECK(r.buckets[2].members == std::vector<std::string>{"mid"});
  CHECK(r.buckets[0].members == std::vector<std::string>{"short"});
  CHECK(r.buckets[4].members == std::vector<std::string>{"long"});
  CHECK(r.buckets[1].summary.words == 0);
  CHECK_FALSE(r.buckets[1].summary.wder_pooled.has_value());
  CHECK(r.at_most_split.members.size() == 2);
  CHECK(r.above_split.members == std::vector<std::string>{"long"});
  CHECK(r.conversations.front().id == "long");

  auto records = report_records(r);
  bool saw_empty = false;
  for (const auto& j : records) {
    if (j["type"] == "bucket" && j["words"] == 0) {
      saw_empty = true;
      CHECK_FALSE(j.contains("wder"));
    }
  }
  CHECK(saw_empty);

  std::vector<ConversationScore> no_time{score("x", 3, 9, 0)};
  try {
    bucket_report(no_time, BucketMode::kMinutes, default_bucket_edges(BucketMode::kMinutes), 15);
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::kValidation);
    CHECK(std::string(e.what()).find("sentence") != std::string::npos);
  }
  auto by_sentences = bucket_report(no_time, BucketMode::kSentences,
                                    default_bucket_edges(BucketMode::kSentences), 50);
  CHECK(by_sentences.buckets[0].members.size() == 1);
}

TEST_CASE("table and series output") {
  std::vector<ConversationScore> s{score("a", 10, 100, 10, 3.0), score("b", 20, 100, 30, 18.0)};
  auto r = bucket_report(s, BucketMode::kMinutes, default_bucket_edges(BucketMode::kMinutes), 15);
  auto row = table_row(r, "mine");
  CHECK(*row.short_wd == doctest::Approx(0.1));
  CHECK(*row.long_wd == doctest::Approx(0.3));
  auto back = table_row_from_json(to_json(row));
  CHECK(back.model == "mine");
  CHECK(*back.overall_wd == doctest::Approx(*row.overall_wd));
  TableRow external;
  external.model = "audio";
  external.overall_wd = 0.4;
  auto table = format_wder_table({external, row}, r);
  CHECK(table.find("mine") != std::string::npos);
  CHECK(table.find("audio") != std::string::npos);
  CHECK(table.find("15 Min.") != std::string::npos);
  auto csv = format_bucket_series(r);
  CHECK(std::count(csv.begin(), csv.end(), '\n') == 8);
}

TEST_CASE("error slices") {
  auto gold = conv("g", {"a", "b", "c", "d", "e"}, {"A", "A", "B", "B", "A"});
  ChangeSequence perfect;
  perfect.decisions = {0, 1, 0, 1};
  perfect.probabilities = {0, 1, 0, 1};
  CHECK(error_slices(gold, perfect, {"A", "A", "B", "B", "A"}, 1).empty());
  ChangeSequence one = perfect;
  one.decisions[2] = 1;
  auto slices = error_slices(gold, one, {"A", "A", "B", "A", "B"}, 1);
  REQUIRE(slices.size() == 1);
  CHECK(slices[0].change_index == 2);
  CHECK(slices[0].dialogue.size() == 4);
  auto j = to_json(slices[0]);
  CHECK(j.contains("model_prediction"));
  CHECK(j.contains("correct_label"));
}

TEST_CASE("seeded slice sampling") {
  std::vector<ErrorSlice> all(200);
  for (std::size_t i = 0; i < all.size(); ++i) all[i].change_index = i;
  auto a = sample_slices(all, 50, 7);
  auto b = sample_slices(all, 50, 7);
  auto c = sample_slices(all, 50, 8);
  REQUIRE(a.size() == 50);
  bool same = true, differs = false;
  for (std::size_t i = 0; i < 50; ++i) {
    same &= a[i].change_index == b[i].change_index;
    differs |= a[i].change_index != c[i].change_index;
  }
  CHECK(same);
  CHECK(differs);
  CHECK(sample_slices(all, 500, 1).size() == 200);
}
