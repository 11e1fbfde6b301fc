#include <random>
#include <sstream>

#include "doctest.h"
#include "textdiar/errors.h"
#include "textdiar/transcript.h"

using namespace textdiar;

namespace {

Conversation make(std::vector<std::string> speakers) {
  std::vector<Sentence> s;
  for (std::size_t i = 0; i < speakers.size(); ++i) {
    s.push_back({i, "sentence " + std::to_string(i), speakers[i], {}, {}});
  }
  return Conversation("c", std::move(s));
}

std::vector<std::uint8_t> bits(std::initializer_list<int> v) {
  return {v.begin(), v.end()};
}

}  // namespace

TEST_CASE("parse_transcripts reads records in order") {
  std::istringstream in(
      R"({"id":"x","sentences":[{"index":0,"text":"Hi.","speaker":"A"},{"index":1,"text":"Hey.","speaker":"A"},{"index":2,"text":"Yo.","speaker":"B","extra":1}]})"
      "\n"
      R"({"id":"y","sentences":[{"index":0,"text":"One.","speaker":null,"start_time":0,"end_time":1.5}]})"
      "\n");
  auto convs = parse_transcripts(in);
  REQUIRE(convs.size() == 2);
  CHECK(convs[0].id() == "x");
  CHECK(convs[0].size() == 3);
  CHECK(*convs[0][2].speaker == "B");
  CHECK(convs[1].id() == "y");
  CHECK_FALSE(convs[1][0].speaker.has_value());
  CHECK(convs[1].duration_seconds().value() == doctest::Approx(1.5));
}

TEST_CASE("parse_transcripts rejects empty text") {
  std::istringstream in(
      R"({"id":"x","sentences":[{"index":0,"text":"  ","speaker":"A"}]})");
  try {
    parse_transcripts(in);
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::kValidation);
  }
}

TEST_CASE("parse_transcripts reports malformed lines") {
  std::istringstream in("{\"id\":\"x\",\"sentences\":[]}\n{not json\n");
  try {
    parse_transcripts(in);
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK((e.kind() == ErrorKind::kParse || e.kind() == ErrorKind::kValidation));
  }
  std::istringstream bad("{not json\n");
  try {
    parse_transcripts(bad);
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::kParse);
    CHECK(std::string(e.what()).find(":1") != std::string::npos);
  }
}

TEST_CASE("conversation invariants") {
  CHECK_THROWS_AS(Conversation("c", {}), Error);
  CHECK_THROWS_AS(
      Conversation("c", {{1, "a", {}, {}, {}}}), Error);
  CHECK_THROWS_AS(Conversation("c", {{0, "a", {}, 2.0, 1.0}}), Error);
}

TEST_CASE("transcripts round trip through the record format") {
  std::vector<Conversation> convs{make({"A", "B", "B"})};
  std::stringstream buf;
  write_transcripts(buf, convs);
  auto back = parse_transcripts(buf);
  REQUIRE(back.size() == 1);
  CHECK(back[0].size() == 3);
  CHECK(*back[0][1].speaker == "B");
  CHECK(back[0][2].text == "sentence 2");
}

TEST_CASE("segment_sentences examples") {
  using V = std::vector<std::string>;
  CHECK(segment_sentences("Hi. How are you?") == V{"Hi.", "How are you?"});
  CHECK(segment_sentences("It's 3:40.") == V{"It's 3:40."});
  CHECK(segment_sentences("ok") == V{"ok"});
  CHECK(segment_sentences("  Wait!  \"Really?\" yes.  ") ==
        V{"Wait!", "\"Really?\"", "yes."});
  CHECK(segment_sentences("v1.2 is out. ok") == V{"v1.2 is out.", "ok"});
  CHECK_THROWS_AS(segment_sentences("   "), Error);
}

TEST_CASE("segmenter property: non-empty pieces reproduce the input") {
  std::mt19937_64 rng(5);
  const char alphabet[] = "ab .!?\n";
  for (int t = 0; t < 500; ++t) {
    std::string s;
    std::size_t len = 1 + rng() % 30;
    for (std::size_t i = 0; i < len; ++i) s += alphabet[rng() % 7];
    if (s.find_first_not_of(" \n") == std::string::npos) s += "x";
    auto parts = segment_sentences(s);
    std::string joined, squeezed;
    for (const auto& p : parts) {
      CHECK_FALSE(p.empty());
      for (char c : p) if (c != ' ' && c != '\n') joined += c;
    }
    for (char c : s) if (c != ' ' && c != '\n') squeezed += c;
    CHECK(joined == squeezed);
  }
}

TEST_CASE("derive_change_sequence examples") {
  CHECK(derive_change_sequence({{"A", "A", "B", "A"}}).decisions ==
        bits({0, 1, 1}));
  CHECK(derive_change_sequence({{"A"}}).decisions.empty());
  CHECK(derive_change_sequence({{"A", "B", "A", "B", "A", "A"}}).decisions ==
        bits({1, 1, 1, 1, 0}));
}

TEST_CASE("decode_speakers examples") {
  using V = std::vector<SpeakerLabel>;
  ChangeSequence c;
  c.decisions = bits({0, 1, 1});
  CHECK(decode_speakers(c, "A").labels == V{"A", "A", "B", "A"});
  CHECK(decode_speakers(ChangeSequence{}, "A").labels == V{"A"});
  c.decisions = bits({1, 1, 1, 1, 0});
  CHECK(decode_speakers(c, "B").labels == V{"B", "A", "B", "A", "B", "B"});
  CHECK(decode_speakers(c, "x", "y").labels ==
        V{"x", "y", "x", "y", "x", "x"});
}

TEST_CASE("round trip and change count over random assignments") {
  std::mt19937_64 rng(11);
  for (int t = 0; t < 1000; ++t) {
    std::size_t n = 1 + rng() % 50;
    SpeakerAssignment a;
    for (std::size_t i = 0; i < n; ++i) a.labels.push_back(rng() % 2 ? "A" : "B");
    ChangeSequence r = derive_change_sequence(a);
    CHECK(r.size() == n - 1);
    CHECK(decode_speakers(r, a.labels[0]) == a);
    std::size_t changes = 0, disagreements = 0;
    for (auto d : r.decisions) changes += d;
    auto decoded = decode_speakers(r, "A");
    for (std::size_t i = 0; i + 1 < n; ++i) {
      disagreements += decoded.labels[i] != decoded.labels[i + 1];
    }
    CHECK(changes == disagreements);
  }
}

TEST_CASE("sentence_word_counts") {
  Conversation c("c", {{0, "one two  three", {}, {}, {}}, {1, "four", {}, {}, {}}});
  CHECK(sentence_word_counts(c) == std::vector<std::size_t>{3, 1});
}
