#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "factcheck/corpus.hpp"
#include "factcheck/discourse.hpp"
#include "factcheck/embeddings.hpp"
#include "factcheck/features.hpp"
#include "factcheck/kernels.hpp"
#include "factcheck/lexicons.hpp"
#include "factcheck/tfidf.hpp"
#include "factcheck/topics.hpp"

namespace fc {

enum class DebateGroup : std::uint8_t {
  kPosition,
  kSegmentSizes,
  kMetadata,
  kTopics,
  kEmbeddings,
  kContradictions,
  kKnownSimilarity,
  kDiscourse,
  kClaimbuster,
  kSentiment,
  kNamedEntities,
  kLinguistic,
  kTense,
  kLength,
};

inline constexpr std::size_t kNumDebateGroups = 14;
inline constexpr std::array<std::string_view, kNumDebateGroups> kDebateGroupNames = {
    "position",    "segment_sizes", "metadata",  "topics",         "embeddings",
    "contradictions", "known_similarity", "discourse", "claimbuster", "sentiment",
    "named_entities", "linguistic", "tense",      "length"};

std::optional<DebateGroup> debate_group_from_name(std::string_view name);

/// The 25 part-of-speech tags counted in the claimbuster group.
inline constexpr std::array<std::string_view, 25> kPosTagSet = {
    "CC", "CD", "DT",  "EX",   "IN",  "JJ",   "JJR", "JJS", "MD",  "NN",  "NNS", "NNP", "NNPS",
    "PRP", "PRP$", "RB", "RBR", "RBS", "TO", "VB",  "VBD", "VBG", "VBN", "VBP", "VBZ"};

/// The 20 named-entity types of the claimbuster histogram. Unknown labels go to
/// MISC; capitalised-run fallback spans are ENTITY.
inline constexpr std::array<std::string_view, 20> kEntityTypes = {
    "PERSON",  "NORP",     "FAC",      "ORG",     "GPE",      "LOC",     "PRODUCT",
    "EVENT",   "WORK_OF_ART", "LAW",   "LANGUAGE", "DATE",    "TIME",    "PERCENT",
    "MONEY",   "QUANTITY", "ORDINAL",  "CARDINAL", "MISC",    "ENTITY"};

std::size_t entity_type_index(std::string_view label);

/// Column layout. With the default slot counts the total is 1,711.
class DebateLayout {
 public:
  DebateLayout() : DebateLayout(300, 300, 998) {}
  DebateLayout(std::size_t topic_slots, std::size_t embedding_slots, std::size_t bow_slots);

  std::size_t offset(DebateGroup g) const { return offset_[static_cast<std::size_t>(g)]; }
  std::size_t size(DebateGroup g) const { return size_[static_cast<std::size_t>(g)]; }
  std::size_t total() const { return total_; }
  std::size_t topic_slots() const { return topic_slots_; }
  std::size_t embedding_slots() const { return embedding_slots_; }
  std::size_t bow_slots() const { return bow_slots_; }

  /// "group:index" per column.
  std::vector<std::string> column_names() const;

  /// Columns of the composite "context" group: position, segment sizes,
  /// metadata, the topic and embedding context cosines, the neighbour
  /// contradiction counts and the 18 discourse indicators.
  std::vector<std::size_t> context_columns() const;
  /// Columns named by a group name or "context".
  std::vector<std::size_t> columns_of(std::string_view name) const;

  /// Mask (1 = keep). `only` empty keeps everything not ablated.
  std::vector<std::uint8_t> mask(std::span<const std::string> ablate,
                                 std::span<const std::string> only = {}) const;

 private:
  std::size_t topic_slots_, embedding_slots_, bow_slots_;
  std::array<std::size_t, kNumDebateGroups> offset_{};
  std::array<std::size_t, kNumDebateGroups> size_{};
  std::size_t total_ = 0;
};

/// Zeroes masked-out columns in place.
void apply_mask(FeatureMatrix& m, std::span<const std::uint8_t> mask);

/// A previously seen sentence used for the known-similarity features.
struct ReferenceSentence {
  /// "<debate_id>/<sentence_id>" for transcript sentences; excluded when equal
  /// to the target's key.
  std::string key;
  std::string speaker;
  bool check_worthy = true;
  std::vector<std::string> words;
};

std::vector<ReferenceSentence> reference_sentences(const std::vector<Debate>& debates,
                                                   std::size_t label_column = kAnyColumn);

struct DebateResources {
  const LexiconSet* lexicons = nullptr;    // mandatory
  const Vocabulary* vocabulary = nullptr;  // mandatory
  const VectorStore* vectors = nullptr;
  const TopicModel* topics = nullptr;
  /// Trees keyed "<debate_id>:<segment_index>".
  const std::map<std::string, RstTree>* discourse = nullptr;
  std::span<const ReferenceSentence> training_refs;
  std::span<const ReferenceSentence> external_claims;
  InferOptions topic_inference;
};

enum class Tense : std::int8_t { kPast = -1, kPresent = 0, kFuture = 1 };

/// Future ("will", "'ll", "have to") wins over Past (any VBD); else Present.
Tense tense(std::span<const Token> tokens);

/// One sentence with its segment and the neighbouring segments.
struct SentenceContext {
  const Debate* debate = nullptr;
  const std::vector<Segment>* segments = nullptr;
  std::size_t sentence = 0;
  std::size_t segment = 0;

  const Sentence& target() const { return debate->sentences[sentence]; }
  const Segment& current() const { return (*segments)[segment]; }
  const Segment* previous() const { return segment > 0 ? &(*segments)[segment - 1] : nullptr; }
  const Segment* next() const {
    return segment + 1 < segments->size() ? &(*segments)[segment + 1] : nullptr;
  }
  std::size_t rank_in_segment() const { return sentence - current().begin + 1; }
};

std::array<double, 3> position_features(const SentenceContext& ctx);
std::array<double, 3> segment_size_features(const SentenceContext& ctx);
std::array<double, 8> metadata_features(const SentenceContext& ctx);
std::array<double, 5> contradiction_features(const SentenceContext& ctx, const LexiconSet& lex);
std::array<double, 3> known_similarity_features(const SentenceContext& ctx,
                                                std::span<const ReferenceSentence> training_refs,
                                                std::span<const ReferenceSentence> external_claims);
std::vector<double> claimbuster_features(const Sentence& s, const Vocabulary& vocab,
                                         const LexiconSet& lex);
std::array<double, 2> sentiment_counts(std::span<const std::string> words, const LexiconSet& lex);
double sentiment_score(std::span<const std::string> words, const LexiconSet& lex);
double length_chars(std::string_view text);
double ne_count(std::span<const Token> tokens);

/// True if the tokens contain any name form of a candidate other than `speaker`.
bool mentions_opponent(const Debate& debate, const Sentence& s);

/// Precomputes per-segment aggregates of one debate; extract() is then a pure
/// function of the sentence index.
class DebateFeatureExtractor {
 public:
  DebateFeatureExtractor(const Debate& debate, const DebateResources& res,
                         DebateLayout layout = {});

  const DebateLayout& layout() const { return layout_; }
  SentenceContext context(std::size_t sentence) const;
  std::vector<double> extract(std::size_t sentence) const;
  std::string row_id(std::size_t sentence) const;

 private:
  const Debate& debate_;
  const DebateResources& res_;
  DebateLayout layout_;
  std::vector<Segment> segments_;
  std::vector<std::size_t> lookup_;
  std::vector<std::vector<std::string>> words_;
  std::vector<std::vector<double>> segment_topics_;
  std::vector<std::vector<double>> segment_vectors_;
};

/// All sentences of all debates, rows in debate then sentence order. The
/// parallel policy extracts rows concurrently and produces the same matrix.
FeatureMatrix extract_debate_features(const std::vector<Debate>& debates,
                                      const DebateResources& res, const DebateLayout& layout = {},
                                      kernels::Policy policy = kernels::Policy::kParallel);

}  // namespace fc
