#include "textdiar/transcript.h"

#include <algorithm>
#include <fstream>
#include <istream>
#include <ostream>

#include "textdiar/errors.h"
#include "textdiar/jsonl.h"
#include "textdiar/text.h"

namespace textdiar {

Conversation::Conversation(std::string id, std::vector<Sentence> sentences,
                           std::optional<double> duration)
    : id_(std::move(id)), sentences_(std::move(sentences)), duration_(duration) {
  if (sentences_.empty()) {
    throw_validation("conversation '" + id_ + "' has no sentences");
  }
  for (std::size_t i = 0; i < sentences_.size(); ++i) {
    const auto& s = sentences_[i];
    const std::string where =
        "conversation '" + id_ + "' sentence " + std::to_string(i);
    if (s.index != i) {
      throw_validation(where + ": index " + std::to_string(s.index) +
                       " out of order");
    }
    if (is_blank(s.text)) throw_validation(where + ": empty text");
    if (s.start_time && *s.start_time < 0) {
      throw_validation(where + ": negative start_time");
    }
    if (s.end_time && *s.end_time < 0) {
      throw_validation(where + ": negative end_time");
    }
    if (s.start_time && s.end_time && *s.start_time > *s.end_time) {
      throw_validation(where + ": start_time after end_time");
    }
  }
  if (duration_ && *duration_ < 0) {
    throw_validation("conversation '" + id_ + "': negative duration");
  }
}

bool Conversation::has_speakers() const {
  return std::all_of(sentences_.begin(), sentences_.end(),
                     [](const Sentence& s) { return s.speaker.has_value(); });
}

std::optional<double> Conversation::duration_seconds() const {
  if (duration_) return duration_;
  std::optional<double> lo;
  std::optional<double> hi;
  for (const auto& s : sentences_) {
    if (s.start_time) lo = lo ? std::min(*lo, *s.start_time) : *s.start_time;
    if (s.end_time) hi = hi ? std::max(*hi, *s.end_time) : *s.end_time;
  }
  if (!lo || !hi) return std::nullopt;
  return std::max(0.0, *hi - *lo);
}

Conversation Conversation::with_speakers(
    const std::vector<SpeakerLabel>& labels) const {
  if (labels.size() != sentences_.size()) {
    throw_validation("conversation '" + id_ + "': " +
                     std::to_string(labels.size()) + " labels for " +
                     std::to_string(sentences_.size()) + " sentences");
  }
  auto copy = sentences_;
  for (std::size_t i = 0; i < copy.size(); ++i) copy[i].speaker = labels[i];
  return Conversation(id_, std::move(copy), duration_);
}

SpeakerAssignment gold_assignment(const Conversation& conv) {
  SpeakerAssignment a;
  a.labels.reserve(conv.size());
  for (const auto& s : conv.sentences()) {
    if (!s.speaker) {
      throw_validation("conversation '" + conv.id() + "' sentence " +
                       std::to_string(s.index) + " has no speaker");
    }
    a.labels.push_back(*s.speaker);
  }
  return a;
}

ChangeSequence derive_change_sequence(const SpeakerAssignment& assignment) {
  ChangeSequence out;
  const auto& l = assignment.labels;
  if (l.size() < 2) return out;
  out.decisions.reserve(l.size() - 1);
  for (std::size_t i = 0; i + 1 < l.size(); ++i) {
    out.decisions.push_back(l[i] != l[i + 1] ? 1 : 0);
  }
  return out;
}

SpeakerLabel default_partner(const SpeakerLabel& label) {
  return label == "B" ? "A" : "B";
}

SpeakerAssignment decode_speakers(const ChangeSequence& changes,
                                  const SpeakerLabel& initial,
                                  const SpeakerLabel& other) {
  const SpeakerLabel partner = other.empty() ? default_partner(initial) : other;
  SpeakerAssignment out;
  out.labels.reserve(changes.size() + 1);
  out.labels.push_back(initial);
  bool first = true;
  for (auto d : changes.decisions) {
    if (d) first = !first;
    out.labels.push_back(first ? initial : partner);
  }
  return out;
}

std::vector<std::string> segment_sentences(const std::string& raw_text) {
  if (is_blank(raw_text)) throw_validation("cannot segment blank text");
  auto is_terminal = [](char c) { return c == '.' || c == '!' || c == '?'; };
  auto is_closer = [](char c) {
    return c == '"' || c == '\'' || c == ')' || c == ']';
  };
  auto is_ws = [](char c) {
    return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' ||
           c == '\v';
  };

  std::vector<std::string> out;
  std::size_t start = 0;
  const std::size_t n = raw_text.size();
  for (std::size_t i = 0; i < n; ++i) {
    if (!is_terminal(raw_text[i])) continue;
    std::size_t end = i + 1;
    while (end < n && (is_terminal(raw_text[end]) || is_closer(raw_text[end]))) {
      ++end;
    }
    if (end == n || is_ws(raw_text[end])) {
      auto piece = trim(std::string_view(raw_text).substr(start, end - start));
      if (!piece.empty()) out.emplace_back(piece);
      start = end;
    }
    i = end - 1;
  }
  if (start < n) {
    auto piece = trim(std::string_view(raw_text).substr(start));
    if (!piece.empty()) out.emplace_back(piece);
  }
  return out;
}

namespace {

std::optional<double> optional_number(const Json& obj, const char* key,
                                      const std::string& where) {
  auto it = obj.find(key);
  if (it == obj.end() || it->is_null()) return std::nullopt;
  if (!it->is_number()) {
    throw_parse(where + ": field '" + key + "' must be a number or null");
  }
  return it->get<double>();
}

Conversation conversation_from_json(const Json& rec, const std::string& where) {
  auto id_it = rec.find("id");
  if (id_it == rec.end() || !id_it->is_string()) {
    throw_parse(where + ": missing string field 'id'");
  }
  auto s_it = rec.find("sentences");
  if (s_it == rec.end() || !s_it->is_array()) {
    throw_parse(where + ": missing array field 'sentences'");
  }
  std::vector<Sentence> sentences;
  sentences.reserve(s_it->size());
  std::size_t pos = 0;
  for (const auto& js : *s_it) {
    const std::string swhere = where + ": sentence " + std::to_string(pos);
    if (!js.is_object()) throw_parse(swhere + ": not an object");
    Sentence s;
    auto idx = js.find("index");
    if (idx == js.end() || !idx->is_number_integer() ||
        idx->get<long long>() < 0) {
      throw_parse(swhere + ": missing non-negative integer 'index'");
    }
    s.index = idx->get<std::size_t>();
    auto text = js.find("text");
    if (text == js.end() || !text->is_string()) {
      throw_parse(swhere + ": missing string field 'text'");
    }
    s.text = text->get<std::string>();
    auto spk = js.find("speaker");
    if (spk != js.end() && !spk->is_null()) {
      if (!spk->is_string()) {
        throw_parse(swhere + ": field 'speaker' must be a string or null");
      }
      s.speaker = spk->get<std::string>();
    }
    s.start_time = optional_number(js, "start_time", swhere);
    s.end_time = optional_number(js, "end_time", swhere);
    sentences.push_back(std::move(s));
    ++pos;
  }
  auto duration = optional_number(rec, "duration", where);
  try {
    return Conversation(id_it->get<std::string>(), std::move(sentences),
                        duration);
  } catch (const Error& e) {
    throw Error(e.kind(), where + ": " + e.what());
  }
}

Json conversation_to_json(const Conversation& conv) {
  Json sentences = Json::array();
  for (const auto& s : conv.sentences()) {
    Json js;
    js["index"] = s.index;
    js["text"] = s.text;
    js["speaker"] = s.speaker ? Json(*s.speaker) : Json(nullptr);
    js["start_time"] = s.start_time ? Json(*s.start_time) : Json(nullptr);
    js["end_time"] = s.end_time ? Json(*s.end_time) : Json(nullptr);
    sentences.push_back(std::move(js));
  }
  Json rec;
  rec["id"] = conv.id();
  rec["sentences"] = std::move(sentences);
  if (conv.duration()) rec["duration"] = *conv.duration();
  return rec;
}

}  // namespace

std::vector<Conversation> parse_transcripts(std::istream& in) {
  std::vector<Conversation> out;
  for_each_record(in, "transcripts", [&](const Json& rec, std::size_t line) {
    out.push_back(
        conversation_from_json(rec, "record at line " + std::to_string(line)));
  });
  return out;
}

std::vector<Conversation> read_transcripts(const std::string& path) {
  auto in = open_input(path);
  std::vector<Conversation> out;
  for_each_record(in, path, [&](const Json& rec, std::size_t line) {
    out.push_back(conversation_from_json(rec, path + ":" + std::to_string(line)));
  });
  return out;
}

void write_transcripts(std::ostream& out,
                       const std::vector<Conversation>& conversations) {
  for (const auto& c : conversations) write_record(out, conversation_to_json(c));
}

void write_transcripts(const std::string& path,
                       const std::vector<Conversation>& conversations) {
  auto out = open_output(path);
  write_transcripts(out, conversations);
  if (!out) throw_io("write failed: " + path);
}

std::vector<std::size_t> sentence_word_counts(const Conversation& conv) {
  std::vector<std::size_t> out;
  out.reserve(conv.size());
  for (const auto& s : conv.sentences()) {
    out.push_back(split_words(s.text).size());
  }
  return out;
}

}  // namespace textdiar
