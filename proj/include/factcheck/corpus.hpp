#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "factcheck/text.hpp"

namespace fc {

/// The nine fact-checking organisations that annotated the debates.
enum class Source : std::uint8_t { kCT, kABC, kCNN, kWP, kNPR, kPF, kTG, kNYT, kFC };

inline constexpr std::size_t kNumSources = 9;
inline constexpr std::array<std::string_view, kNumSources> kSourceNames = {
    "CT", "ABC", "CNN", "WP", "NPR", "PF", "TG", "NYT", "FC"};

/// Label-matrix column of the derived ANY task (columns 0..8 are the sources).
inline constexpr std::size_t kAnyColumn = kNumSources;

std::optional<Source> source_from_name(std::string_view name);

enum class SystemEvent : std::uint8_t { kApplause, kLaugh, kCrosstalk };
inline constexpr std::array<std::string_view, 3> kEventNames = {"applause", "laugh", "crosstalk"};

struct Sentence {
  int id = 0;
  std::string text;
  std::string speaker;
  bool is_moderator = false;
  /// System messages that follow this sentence in the transcript.
  std::array<bool, 3> events{};
  std::vector<Token> tokens;

  bool has_event(SystemEvent e) const { return events[static_cast<std::size_t>(e)]; }
  bool operator==(const Sentence&) const = default;
};

/// Binary sentence x source selections; row i belongs to debate.sentences[i].
class AnnotationMatrix {
 public:
  using Row = std::array<std::uint8_t, kNumSources>;

  void add_row(int sentence_id, const Row& row);

  std::size_t rows() const { return cells_.size(); }
  int sentence_id(std::size_t row) const { return ids_[row]; }
  bool get(std::size_t row, Source s) const {
    return cells_[row][static_cast<std::size_t>(s)] != 0;
  }
  const Row& row(std::size_t r) const { return cells_[r]; }
  /// Logical OR of the nine sources.
  bool any(std::size_t row) const;
  /// Number of sources that selected the sentence (the "All" column).
  int votes(std::size_t row) const;

  std::size_t count(Source s) const;
  std::size_t any_count() const;

  /// Labels for training: columns 0..8 sources, column 9 ANY.
  std::array<std::uint8_t, kNumSources + 1> labels(std::size_t row) const;

  bool operator==(const AnnotationMatrix&) const = default;

 private:
  std::vector<int> ids_;
  std::vector<Row> cells_;
};

struct Candidate {
  std::string speaker;
  /// Name forms that count as a mention of this speaker ("Donald", "Trump").
  std::vector<std::string> names;
  bool operator==(const Candidate&) const = default;
};

struct Debate {
  std::string id;
  std::vector<Sentence> sentences;
  AnnotationMatrix annotations;
  std::vector<std::string> moderators;
  /// Non-moderator speakers in order of first appearance (at most the two
  /// debaters are used for speaker identity features).
  std::vector<Candidate> candidates;

  bool is_moderator(std::string_view speaker) const;
  /// Index of the speaker among candidates, or -1.
  int candidate_index(std::string_view speaker) const;
  bool operator==(const Debate&) const = default;
};

/// A maximal run of consecutive sentences by one speaker (a turn).
struct Segment {
  std::string speaker;
  std::vector<int> sentence_ids;
  /// Index of the first sentence in Debate::sentences.
  std::size_t begin = 0;
  std::size_t index_in_debate = 0;

  std::size_t size() const { return sentence_ids.size(); }
  std::size_t end() const { return begin + sentence_ids.size(); }
  bool operator==(const Segment&) const = default;
};

std::vector<Segment> segment_debate(const Debate& debate);

/// Segment index for every sentence index of the debate.
std::vector<std::size_t> segment_lookup(const std::vector<Segment>& segments);

/// Reads transcripts. `sidecar_path` optionally supplies tokens/POS/NE keyed by
/// "<debate_id>/<sentence_id>"; sentences without sidecar entries are tokenized
/// and tagged with the fallback tools.
std::vector<Debate> load_debates(const std::string& path,
                                 const std::optional<std::string>& sidecar_path = std::nullopt);
/// Same format with the annotations field optional (missing means all zero);
/// for transcripts that are only to be ranked.
std::vector<Debate> load_transcript(const std::string& path,
                                    const std::optional<std::string>& sidecar_path = std::nullopt);
std::vector<Debate> parse_debates(std::istream& in, std::istream* sidecar = nullptr,
                                  bool require_annotations = true);

void save_debates(const std::string& path, const std::vector<Debate>& debates,
                  const std::optional<std::string>& sidecar_path = std::nullopt);
void write_debates(std::ostream& out, const std::vector<Debate>& debates,
                   std::ostream* sidecar = nullptr);

// ---------------------------------------------------------------------------
// Community question answering

enum class QuestionClass : std::uint8_t { kNone, kFactual, kOpinion, kSocializing };
enum class Goodness : std::uint8_t { kNone, kGood, kPotentiallyUseful, kBad };
enum class Factuality : std::uint8_t { kNone, kPositive, kNegative };
enum class FineLabel : std::uint8_t {
  kNone,
  kTrue,
  kFalse,
  kPartiallyTrue,
  kConditionallyTrue,
  kResponderUnsure,
  kNonFactual,
};

inline constexpr std::array<std::string_view, 6> kFineLabelNames = {
    "Factual - True",
    "Factual - False",
    "Factual - Partially True",
    "Factual - Conditionally True",
    "Factual - Responder Unsure",
    "NonFactual"};

std::string_view to_string(QuestionClass c);
std::string_view to_string(Goodness g);
std::string_view to_string(Factuality f);
std::string_view to_string(FineLabel l);

/// Coarse label implied by a fine label (True -> Positive, the rest Negative).
Factuality coarse_of(FineLabel l);

struct Question {
  std::string id;
  std::string subject;
  std::string body;
  std::string category;
  std::string datetime;
  std::string user;
  QuestionClass question_class = QuestionClass::kNone;
  /// Multi-question posts are kept but excluded from experiments.
  bool excluded = false;
  std::vector<Token> tokens;

  std::string text() const;
  bool operator==(const Question&) const = default;
};

struct Answer {
  std::string id;
  std::string text;
  std::string user;
  Goodness goodness = Goodness::kNone;
  Factuality factuality = Factuality::kNone;
  FineLabel fine = FineLabel::kNone;
  std::vector<Token> tokens;
  bool operator==(const Answer&) const = default;
};

struct CqaThread {
  Question question;
  std::vector<Answer> answers;
  bool operator==(const CqaThread&) const = default;
};

std::vector<CqaThread> load_cqa(const std::string& path,
                                const std::optional<std::string>& sidecar_path = std::nullopt);
std::vector<CqaThread> parse_cqa(std::istream& in, std::istream* sidecar = nullptr);
void save_cqa(const std::string& path, const std::vector<CqaThread>& threads);
void write_cqa(std::ostream& out, const std::vector<CqaThread>& threads);

struct CqaCounts {
  std::size_t factual = 0;
  std::size_t opinion = 0;
  std::size_t socializing = 0;
  std::size_t excluded = 0;
  std::size_t positive = 0;
  std::size_t negative = 0;
  /// Questions with at least one factuality-labelled answer.
  std::size_t labelled_threads = 0;
};

CqaCounts count_cqa(const std::vector<CqaThread>& threads);

struct DebateCounts {
  std::size_t sentences = 0;
  std::size_t positives = 0;
  std::array<std::size_t, kNumSources> per_source{};
};

DebateCounts count_debate(const Debate& debate);

}  // namespace fc
