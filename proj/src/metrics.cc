#include "textdiar/metrics.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numeric>
#include <random>
#include <set>
#include <sstream>

#include "textdiar/assignment.h"
#include "textdiar/errors.h"
#include "textdiar/text.h"

namespace textdiar {

SpeakerMapping optimal_speaker_mapping(const std::vector<SpeakerLabel>& ref,
                                       const std::vector<SpeakerLabel>& hyp) {
  if (ref.size() != hyp.size()) {
    throw_validation("speaker mapping: " + std::to_string(ref.size()) +
                     " reference words vs " + std::to_string(hyp.size()) +
                     " hypothesis words");
  }
  const std::set<SpeakerLabel> rset(ref.begin(), ref.end());
  const std::set<SpeakerLabel> hset(hyp.begin(), hyp.end());
  if (rset.size() > kMaxMappingLabels || hset.size() > kMaxMappingLabels) {
    throw_validation("speaker mapping supports at most " +
                     std::to_string(kMaxMappingLabels) + " labels per side");
  }
  const std::vector<SpeakerLabel> rl(rset.begin(), rset.end());
  const std::vector<SpeakerLabel> hl(hset.begin(), hset.end());
  auto index_of = [](const std::vector<SpeakerLabel>& v, const SpeakerLabel& x) {
    return static_cast<std::size_t>(
        std::lower_bound(v.begin(), v.end(), x) - v.begin());
  };

  const std::size_t n = std::max(rl.size(), hl.size());
  ScoreMatrix agree(n);
  for (std::size_t w = 0; w < ref.size(); ++w) {
    agree(index_of(hl, hyp[w]), index_of(rl, ref[w])) += 1.0;
  }
  const Assignment a = max_assignment(agree);

  SpeakerMapping out;
  std::size_t matched = 0;
  for (std::size_t h = 0; h < hl.size(); ++h) {
    if (a[h] < rl.size()) {
      out.hyp_to_ref[hl[h]] = rl[a[h]];
      matched += static_cast<std::size_t>(agree(h, a[h]));
    }
  }
  out.mismatches = ref.size() - matched;
  return out;
}

WderResult wder(const std::vector<SpeakerLabel>& ref_words,
                const std::vector<SpeakerLabel>& hyp_words) {
  WderResult out;
  out.words = ref_words.size();
  out.empty = ref_words.empty();
  if (out.empty) {
    if (!hyp_words.empty()) throw_validation("wder: length mismatch");
    return out;
  }
  out.errors = optimal_speaker_mapping(ref_words, hyp_words).mismatches;
  return out;
}

std::vector<SpeakerLabel> word_labels(const Conversation& conv,
                                      const std::vector<SpeakerLabel>& labels) {
  if (labels.size() != conv.size()) {
    throw_validation("conversation '" + conv.id() + "': " +
                     std::to_string(labels.size()) + " labels for " +
                     std::to_string(conv.size()) + " sentences");
  }
  std::vector<SpeakerLabel> out;
  const auto counts = sentence_word_counts(conv);
  for (std::size_t s = 0; s < counts.size(); ++s) {
    out.insert(out.end(), counts[s], labels[s]);
  }
  return out;
}

ConversationScore score_conversation(const Conversation& gold,
                                     const std::vector<SpeakerLabel>& predicted) {
  const auto ref = word_labels(gold, gold_assignment(gold).labels);
  const auto hyp = word_labels(gold, predicted);
  const auto r = wder(ref, hyp);
  ConversationScore out;
  out.id = gold.id();
  out.sentences = gold.size();
  out.words = r.words;
  out.errors = r.errors;
  if (auto d = gold.duration_seconds()) out.minutes = *d / 60.0;
  return out;
}

double wder_s(const std::vector<ConversationScore>& scores) {
  if (scores.empty()) throw_validation("WDER-S of an empty corpus");
  double num = 0.0;
  double den = 0.0;
  for (const auto& s : scores) {
    num += static_cast<double>(s.sentences) * s.wder();
    den += static_cast<double>(s.sentences);
  }
  return den == 0.0 ? 0.0 : num / den;
}

CorpusSummary summarize(const std::vector<ConversationScore>& scores) {
  CorpusSummary out;
  out.conversations = scores.size();
  double mean = 0.0;
  for (const auto& s : scores) {
    out.sentences += s.sentences;
    out.words += s.words;
    out.errors += s.errors;
    mean += s.wder();
  }
  if (out.words > 0) {
    out.wder_pooled =
        static_cast<double>(out.errors) / static_cast<double>(out.words);
  }
  if (!scores.empty()) {
    out.wder_mean = mean / static_cast<double>(scores.size());
    out.wder_s = wder_s(scores);
  }
  return out;
}

std::string to_string(BucketMode mode) {
  return mode == BucketMode::kMinutes ? "minutes" : "sentences";
}

BucketMode bucket_mode_from_string(const std::string& s) {
  if (s == "minutes") return BucketMode::kMinutes;
  if (s == "sentences") return BucketMode::kSentences;
  throw_config("unknown bucket mode '" + s + "' (expected minutes or sentences)");
}

std::vector<double> default_bucket_edges(BucketMode mode) {
  const double inf = std::numeric_limits<double>::infinity();
  if (mode == BucketMode::kMinutes) return {0, 5, 10, 15, 20, 25, 30, inf};
  return {0, 10, 25, 50, 100, 200, inf};
}

double default_split(BucketMode mode) {
  return mode == BucketMode::kMinutes ? 15.0 : 50.0;
}

namespace {

double length_of(const ConversationScore& s, BucketMode mode) {
  if (mode == BucketMode::kSentences) return static_cast<double>(s.sentences);
  return *s.minutes;
}

void finish(LengthBucket& b, const std::vector<ConversationScore>& all) {
  std::vector<ConversationScore> members;
  for (const auto& s : all) {
    if (std::find(b.members.begin(), b.members.end(), s.id) != b.members.end()) {
      members.push_back(s);
    }
  }
  b.summary = summarize(members);
}

}  // namespace

BucketReport bucket_report(const std::vector<ConversationScore>& scores,
                           BucketMode mode, const std::vector<double>& edges,
                           double split) {
  if (edges.size() < 2 || !std::is_sorted(edges.begin(), edges.end()) ||
      std::adjacent_find(edges.begin(), edges.end()) != edges.end()) {
    throw_config("bucket edges must be strictly increasing with >= 2 values");
  }
  if (mode == BucketMode::kMinutes) {
    for (const auto& s : scores) {
      if (!s.minutes) {
        throw_validation("conversation '" + s.id +
                         "' has no duration or timestamps; use sentence "
                         "bucket mode");
      }
    }
  }
  BucketReport out;
  out.mode = mode;
  out.split = split;
  out.conversations = scores;
  std::sort(out.conversations.begin(), out.conversations.end(),
            [](const auto& a, const auto& b) { return a.id < b.id; });
  for (std::size_t i = 0; i + 1 < edges.size(); ++i) {
    LengthBucket b;
    b.lower = edges[i];
    b.upper = edges[i + 1];
    out.buckets.push_back(std::move(b));
  }
  out.at_most_split.lower = 0.0;
  out.at_most_split.upper = split;
  out.above_split.lower = split;

  for (const auto& s : out.conversations) {
    const double len = length_of(s, mode);
    for (auto& b : out.buckets) {
      if (len >= b.lower && len < b.upper) {
        b.members.push_back(s.id);
        break;
      }
    }
    (len <= split ? out.at_most_split : out.above_split).members.push_back(s.id);
  }
  for (auto& b : out.buckets) finish(b, out.conversations);
  finish(out.at_most_split, out.conversations);
  finish(out.above_split, out.conversations);
  out.overall = summarize(out.conversations);
  return out;
}

namespace {

Json opt(const std::optional<double>& v) { return v ? Json(*v) : Json(nullptr); }

Json bound(double v) { return std::isinf(v) ? Json(nullptr) : Json(v); }

Json summary_json(const CorpusSummary& s) {
  Json j;
  j["conversations"] = s.conversations;
  j["sentences"] = s.sentences;
  j["words"] = s.words;
  j["errors"] = s.errors;
  if (s.words > 0) j["wder"] = *s.wder_pooled;
  if (s.wder_mean) j["wder_mean"] = *s.wder_mean;
  if (s.wder_s) j["wder_s"] = *s.wder_s;
  return j;
}

}  // namespace

std::vector<Json> report_records(const BucketReport& r) {
  std::vector<Json> out;
  for (const auto& c : r.conversations) {
    Json j{{"type", "conversation"},
           {"id", c.id},
           {"sentences", c.sentences},
           {"words", c.words},
           {"errors", c.errors},
           {"wder", c.wder()},
           {"minutes", opt(c.minutes)}};
    out.push_back(std::move(j));
  }
  for (const auto& b : r.buckets) {
    Json j = summary_json(b.summary);
    j["type"] = "bucket";
    j["mode"] = to_string(r.mode);
    j["lower"] = bound(b.lower);
    j["upper"] = bound(b.upper);
    out.push_back(std::move(j));
  }
  for (const auto* half : {&r.at_most_split, &r.above_split}) {
    Json j = summary_json(half->summary);
    j["type"] = "split";
    j["mode"] = to_string(r.mode);
    j["half"] = half == &r.at_most_split ? "at_most" : "above";
    j["threshold"] = r.split;
    out.push_back(std::move(j));
  }
  Json j = summary_json(r.overall);
  j["type"] = "overall";
  j["mode"] = to_string(r.mode);
  out.push_back(std::move(j));
  return out;
}

TableRow table_row(const BucketReport& r, const std::string& model) {
  TableRow row;
  row.model = model;
  row.short_wd = r.at_most_split.summary.wder_pooled;
  row.short_wds = r.at_most_split.summary.wder_s;
  row.long_wd = r.above_split.summary.wder_pooled;
  row.long_wds = r.above_split.summary.wder_s;
  row.overall_wd = r.overall.wder_pooled;
  row.overall_wds = r.overall.wder_s;
  return row;
}

TableRow table_row_from_json(const Json& j) {
  TableRow row;
  if (!j.contains("model") || !j["model"].is_string()) {
    throw_parse("table row needs a string 'model'");
  }
  row.model = j["model"].get<std::string>();
  auto get = [&](const char* key) -> std::optional<double> {
    auto it = j.find(key);
    if (it == j.end() || it->is_null()) return std::nullopt;
    if (!it->is_number()) throw_parse(std::string("table row field '") + key +
                                      "' must be a number");
    return it->get<double>();
  };
  row.short_wd = get("short_wd");
  row.short_wds = get("short_wds");
  row.long_wd = get("long_wd");
  row.long_wds = get("long_wds");
  row.overall_wd = get("overall_wd");
  row.overall_wds = get("overall_wds");
  return row;
}

Json to_json(const TableRow& row) {
  return Json{{"model", row.model},
              {"short_wd", opt(row.short_wd)},
              {"short_wds", opt(row.short_wds)},
              {"long_wd", opt(row.long_wd)},
              {"long_wds", opt(row.long_wds)},
              {"overall_wd", opt(row.overall_wd)},
              {"overall_wds", opt(row.overall_wds)}};
}

std::string format_wder_table(const std::vector<TableRow>& rows,
                              const BucketReport& reference) {
  std::size_t width = 5;
  for (const auto& r : rows) width = std::max(width, r.model.size());
  char split[32];
  std::snprintf(split, sizeof(split), "%g", reference.split);
  const std::string unit =
      reference.mode == BucketMode::kMinutes ? " Min." : " Sent.";
  const std::string le = "<= " + std::string(split) + unit;
  const std::string gt = "> " + std::string(split) + unit;

  auto cell = [](const std::optional<double>& v) {
    char buf[16];
    if (!v) return std::string("     -");
    std::snprintf(buf, sizeof(buf), "%6.1f", 100.0 * *v);
    return std::string(buf);
  };
  auto pad = [](std::string s, std::size_t w) {
    if (s.size() < w) s.append(w - s.size(), ' ');
    return s;
  };

  std::ostringstream os;
  os << pad("", width) << " | " << pad(le, 13) << " | " << pad(gt, 13)
     << " | " << pad("Overall", 13) << '\n';
  os << pad("Model", width) << " |     WD   WD-S |     WD   WD-S |     WD   WD-S\n";
  os << std::string(width + 48, '-') << '\n';
  for (const auto& r : rows) {
    os << pad(r.model, width) << " | " << cell(r.short_wd) << ' '
       << cell(r.short_wds) << " | " << cell(r.long_wd) << ' '
       << cell(r.long_wds) << " | " << cell(r.overall_wd) << ' '
       << cell(r.overall_wds) << '\n';
  }
  return os.str();
}

std::string format_bucket_series(const BucketReport& r) {
  std::ostringstream os;
  os << "mode,lower,upper,conversations,words,errors,wder,wder_s\n";
  auto num = [](const std::optional<double>& v) {
    if (!v) return std::string();
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.6f", *v);
    return std::string(buf);
  };
  auto edge = [](double v) {
    if (std::isinf(v)) return std::string("inf");
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%g", v);
    return std::string(buf);
  };
  for (const auto& b : r.buckets) {
    os << to_string(r.mode) << ',' << edge(b.lower) << ',' << edge(b.upper)
       << ',' << b.summary.conversations << ',' << b.summary.words << ','
       << b.summary.errors << ',' << num(b.summary.wder_pooled) << ','
       << num(b.summary.wder_s) << '\n';
  }
  return os.str();
}

std::vector<ErrorSlice> error_slices(
    const Conversation& gold, const ChangeSequence& predicted,
    const std::vector<SpeakerLabel>& predicted_labels, std::size_t radius) {
  const auto gold_labels = gold_assignment(gold).labels;
  const auto gold_changes = derive_change_sequence({gold_labels});
  if (predicted.size() != gold_changes.size()) {
    throw_validation("conversation '" + gold.id() + "': " +
                     std::to_string(predicted.size()) +
                     " predicted decisions for " +
                     std::to_string(gold_changes.size()) + " change points");
  }
  if (predicted_labels.size() != gold.size()) {
    throw_validation("conversation '" + gold.id() +
                     "': predicted speakers do not match sentence count");
  }
  std::vector<ErrorSlice> out;
  for (std::size_t p = 0; p < predicted.size(); ++p) {
    if (predicted.decisions[p] == gold_changes.decisions[p]) continue;
    ErrorSlice s;
    s.id = gold.id();
    s.change_index = p;
    s.predicted = predicted.decisions[p];
    s.gold = gold_changes.decisions[p];
    s.first = p >= radius ? p - radius : 0;
    const std::size_t last = std::min(gold.size() - 1, p + 1 + radius);
    for (std::size_t i = s.first; i <= last; ++i) {
      s.dialogue.push_back(gold[i].text);
      s.predicted_labels.push_back(predicted_labels[i]);
      s.gold_labels.push_back(gold_labels[i]);
    }
    out.push_back(std::move(s));
  }
  return out;
}

std::vector<ErrorSlice> sample_slices(std::vector<ErrorSlice> slices,
                                      std::size_t k, std::uint64_t seed) {
  if (k == 0 || slices.size() <= k) return slices;
  std::vector<std::size_t> idx(slices.size());
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  // Partial Fisher-Yates with raw engine output so the sample does not
  // depend on the standard library's distribution implementations.
  std::mt19937_64 rng(seed);
  for (std::size_t i = 0; i < k; ++i) {
    const std::size_t j = i + static_cast<std::size_t>(rng() % (idx.size() - i));
    std::swap(idx[i], idx[j]);
  }
  idx.resize(k);
  std::sort(idx.begin(), idx.end());
  std::vector<ErrorSlice> out;
  out.reserve(k);
  for (std::size_t i : idx) out.push_back(std::move(slices[i]));
  return out;
}

Json to_json(const ErrorSlice& s) {
  return Json{{"id", s.id},
              {"change_index", s.change_index},
              {"predicted_change", s.predicted},
              {"gold_change", s.gold},
              {"first_sentence", s.first},
              {"dialogue", s.dialogue},
              {"model_prediction", s.predicted_labels},
              {"correct_label", s.gold_labels}};
}

}  // namespace textdiar
