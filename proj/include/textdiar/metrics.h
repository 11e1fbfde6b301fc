#pragma once

#include <cstddef>
#include <cstdint>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "textdiar/jsonl.h"
#include "textdiar/transcript.h"

namespace textdiar {

struct SpeakerMapping {
  // hypothesis label -> reference label; hypothesis labels left unmatched
  // (more hypothesis than reference speakers) are absent.
  std::map<SpeakerLabel, SpeakerLabel> hyp_to_ref;
  std::size_t mismatches = 0;
};

inline constexpr std::size_t kMaxMappingLabels = 12;

// Bijection between label sets minimizing word-level mismatches. Labels are
// ordered lexicographically; up to 6 labels the first optimal permutation in
// lexicographic order wins, larger sets use the Hungarian method.
SpeakerMapping optimal_speaker_mapping(const std::vector<SpeakerLabel>& ref,
                                       const std::vector<SpeakerLabel>& hyp);

struct WderResult {
  std::size_t errors = 0;
  std::size_t words = 0;
  // True when no words were evaluated (WDER reported as 0).
  bool empty = false;

  double wder() const {
    return words == 0 ? 0.0
                      : static_cast<double>(errors) / static_cast<double>(words);
  }
};

// Word-level speaker error rate after optimal mapping.
WderResult wder(const std::vector<SpeakerLabel>& ref_words,
                const std::vector<SpeakerLabel>& hyp_words);

// Expands sentence labels to one label per word (whitespace tokens).
std::vector<SpeakerLabel> word_labels(const Conversation& conv,
                                      const std::vector<SpeakerLabel>& labels);

struct ConversationScore {
  std::string id;
  std::size_t sentences = 0;
  std::size_t words = 0;
  std::size_t errors = 0;
  std::optional<double> minutes;

  double wder() const {
    return words == 0 ? 0.0
                      : static_cast<double>(errors) / static_cast<double>(words);
  }
};

ConversationScore score_conversation(const Conversation& gold,
                                     const std::vector<SpeakerLabel>& predicted);

// sum(n_c * WDER_c) / sum(n_c); validation error on an empty corpus.
double wder_s(const std::vector<ConversationScore>& scores);

struct CorpusSummary {
  std::size_t conversations = 0;
  std::size_t sentences = 0;
  std::size_t words = 0;
  std::size_t errors = 0;
  // Unset when there are no words / no conversations.
  std::optional<double> wder_pooled;
  std::optional<double> wder_mean;
  std::optional<double> wder_s;
};

CorpusSummary summarize(const std::vector<ConversationScore>& scores);

enum class BucketMode { kMinutes, kSentences };

std::string to_string(BucketMode mode);
BucketMode bucket_mode_from_string(const std::string& s);

struct LengthBucket {
  double lower = 0.0;
  double upper = std::numeric_limits<double>::infinity();
  std::vector<std::string> members;
  CorpusSummary summary;
};

struct BucketReport {
  BucketMode mode = BucketMode::kMinutes;
  std::vector<LengthBucket> buckets;  // [lower, upper)
  double split = 15.0;
  LengthBucket at_most_split;  // length <= split
  LengthBucket above_split;    // length > split
  CorpusSummary overall;
  std::vector<ConversationScore> conversations;
};

std::vector<double> default_bucket_edges(BucketMode mode);
double default_split(BucketMode mode);

// Minutes mode needs a duration (explicit or from timestamps) for every
// conversation; otherwise a validation error suggests sentence mode.
BucketReport bucket_report(const std::vector<ConversationScore>& scores,
                           BucketMode mode, const std::vector<double>& edges,
                           double split);

// One record per conversation, bucket, split half and the overall summary.
std::vector<Json> report_records(const BucketReport& report);
// One row of the WD / WD-S comparison table (fractions, not percent).
// Rows for external systems can be supplied alongside computed ones.
struct TableRow {
  std::string model;
  std::optional<double> short_wd, short_wds;
  std::optional<double> long_wd, long_wds;
  std::optional<double> overall_wd, overall_wds;
};

TableRow table_row(const BucketReport& report, const std::string& model);
TableRow table_row_from_json(const Json& record);
Json to_json(const TableRow& row);

// Aligned text table: WD and WD-S in percent for <= split, > split and
// overall (word-pooled WD).
std::string format_wder_table(const std::vector<TableRow>& rows,
                              const BucketReport& reference);
// CSV series (one row per bucket) for external plotting.
std::string format_bucket_series(const BucketReport& report);

struct ErrorSlice {
  std::string id;
  std::size_t change_index = 0;
  std::uint8_t predicted = 0;
  std::uint8_t gold = 0;
  std::size_t first = 0;  // first sentence in the slice
  std::vector<std::string> dialogue;
  std::vector<SpeakerLabel> predicted_labels;
  std::vector<SpeakerLabel> gold_labels;
};

// Every wrong change decision with +-radius sentences of context.
std::vector<ErrorSlice> error_slices(const Conversation& gold,
                                     const ChangeSequence& predicted,
                                     const std::vector<SpeakerLabel>& predicted_labels,
                                     std::size_t radius);

// Seeded sample of at most k slices (order of the input kept); k = 0 keeps
// all.
std::vector<ErrorSlice> sample_slices(std::vector<ErrorSlice> slices,
                                      std::size_t k, std::uint64_t seed);

Json to_json(const ErrorSlice& slice);

}  // namespace textdiar
