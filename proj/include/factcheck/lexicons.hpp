#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

namespace fc {

enum class BiasType : std::uint8_t {
  kFactives,
  kImplicatives,
  kAssertives,
  kHedges,
  kReportVerbs,
  kWikiBias,
  kModals,
  kNegations,
  kStrongSubj,
  kWeakSubj,
  kPositives,
  kNegatives,
};

inline constexpr std::size_t kNumBiasTypes = 12;
/// File stems under a lexicon directory (`<stem>.txt`), in BiasType order.
inline constexpr std::array<std::string_view, kNumBiasTypes> kBiasTypeNames = {
    "factives",   "implicatives", "assertives", "hedges",      "report_verbs", "wiki_bias",
    "modals",     "negations",    "strong_subj", "weak_subj",  "positives",    "negatives"};

std::optional<BiasType> bias_type_from_name(std::string_view name);

/// A set of lowercase cues; entries may be multi-word (space separated).
class Lexicon {
 public:
  Lexicon() = default;
  explicit Lexicon(std::span<const std::string> entries);
  Lexicon(std::initializer_list<std::string_view> entries);

  /// UTF-8, one cue per line, '#' starts a comment.
  static Lexicon load(const std::string& path);

  bool contains(std::string_view word) const;
  std::size_t size() const { return entries_.size(); }
  bool empty() const { return entries_.empty(); }
  std::size_t max_ngram() const { return max_ngram_; }

  /// Greedy left-to-right longest-match count without overlap. Tokens are
  /// compared case-insensitively.
  std::size_t count_matches(std::span<const std::string> tokens) const;

 private:
  void insert(std::string_view entry);

  std::unordered_set<std::string> entries_;
  std::size_t max_ngram_ = 0;
};

struct CueFrequency {
  BiasType bias_type;
  double value = 0.0;
};

/// Cue matches normalised by the number of tokens. Throws on an empty list.
CueFrequency cue_frequency(std::span<const std::string> tokens, const Lexicon& lexicon,
                           BiasType type);
double cue_frequency(std::span<const std::string> tokens, const Lexicon& lexicon);

/// All twelve bias lexicons plus the sentiment word lists.
class LexiconSet {
 public:
  LexiconSet() = default;

  /// Loads `<dir>/<stem>.txt` for all twelve stems (all required) and optionally
  /// `sentiment_positive.txt` / `sentiment_negative.txt` for word-level sentiment
  /// counts; without them the positives/negatives lexicons are used.
  static LexiconSet load(const std::string& dir);

  const Lexicon& get(BiasType t) const { return lexicons_[static_cast<std::size_t>(t)]; }
  void set(BiasType t, Lexicon lex) { lexicons_[static_cast<std::size_t>(t)] = std::move(lex); }

  const Lexicon& sentiment_positive() const;
  const Lexicon& sentiment_negative() const;
  void set_sentiment(Lexicon positive, Lexicon negative);

  /// I/we + [modal] + [adverb] + verb patterns; tokens must be lowercased.
  std::size_t multiword_cue_count(std::span<const std::string> tokens) const;

  std::size_t negation_count(std::span<const std::string> tokens) const;

  /// The 13 linguistic features: twelve cue frequencies then the multi-word
  /// count. Empty input gives all zeros.
  std::array<double, 13> linguistic_features(std::span<const std::string> tokens) const;

 private:
  bool is_cue_verb(const std::string& w) const;
  bool is_subjective_adverb(const std::string& w) const;

  std::array<Lexicon, kNumBiasTypes> lexicons_;
  std::optional<Lexicon> sentiment_positive_;
  std::optional<Lexicon> sentiment_negative_;
};

}  // namespace fc
