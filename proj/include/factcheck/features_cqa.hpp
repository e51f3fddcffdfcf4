#pragma once

#include <array>
#include <cstddef>
#include <functional>
#include <map>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "factcheck/corpus.hpp"
#include "factcheck/discourse.hpp"
#include "factcheck/embeddings.hpp"
#include "factcheck/evidence.hpp"
#include "factcheck/features.hpp"
#include "factcheck/kernels.hpp"
#include "factcheck/lexicons.hpp"
#include "factcheck/tfidf.hpp"

namespace fc {

/// (cosine to the other Good answers, reciprocal rank, reciprocal rank among
/// Good answers, percentile, percentile among Good answers). Non-Good answers
/// get 0 for the Good-only values.
std::array<double, 5> thread_support(const CqaThread& thread, std::size_t answer,
                                     const VectorStore* vectors);

inline constexpr std::size_t kCredibilityFeatures = 31;
/// Slot names of credibility_features, in order.
extern const std::array<std::string_view, kCredibilityFeatures> kCredibilityNames;

/// Surface, punctuation, part-of-speech and pronoun statistics of an answer.
/// `vectors` decides what counts as out-of-vocabulary (0 without it).
std::array<double, kCredibilityFeatures> credibility_features(const Answer& answer,
                                                              const VectorStore* vectors = nullptr);

/// Sentences of the high-quality posts, pre-split and tokenized.
class HqIndex {
 public:
  HqIndex() = default;
  explicit HqIndex(std::span<const std::string> posts);
  std::size_t size() const { return sentences_.size(); }
  const std::string& sentence(std::size_t i) const { return sentences_[i]; }
  const std::vector<std::string>& words(std::size_t i) const { return words_[i]; }

 private:
  std::vector<std::string> sentences_;
  std::vector<std::vector<std::string>> words_;
};

/// Ranks hq sentences by TF-IDF cosine to the Q&A query and returns the proxy
/// entailment score of the answer for the k best, sorted descending and padded
/// with zeros.
std::vector<double> hq_support(const Question& question, const Answer& answer, const HqIndex& hq,
                               const IdfTable& idf, const VectorStore* vectors, std::size_t k);

std::vector<double> web_support(std::string_view question, std::string_view answer,
                                std::span<const EvidenceResult> results,
                                const SimilarityResources& res, const BundleSelection& selection);

SparseVector question_bow(const Question& question, const Vocabulary& vocab);

struct CqaFeatureConfig {
  bool thread = true;
  bool forum = true;
  bool hq = true;
  bool web = true;
  bool credibility = true;
  bool linguistic = true;
  bool discourse = true;
  std::size_t hq_k = 4;
  BundleSelection web_selection = BundleSelection::source_copies();
  BundleSelection forum_selection = BundleSelection::unfiltered();
  std::vector<std::string> web_engines = {"google", "bing"};
  std::string forum_engine = "forum";
  /// Extract only answers with a factuality label.
  bool labelled_only = true;
};

/// Returns the evidence list of (thread, answer, engine); typically a cache
/// lookup through fetch_with_retry in offline mode.
using EvidenceLookup =
    std::function<std::vector<EvidenceResult>(const CqaThread&, const Answer&, std::string_view)>;

struct CqaResources {
  const VectorStore* vectors = nullptr;
  const LexiconSet* lexicons = nullptr;
  const IdfTable* idf = nullptr;
  const HqIndex* hq = nullptr;
  /// Trees keyed by answer id; question sentences carry negative sentence ids,
  /// answer sentences non-negative ones.
  const std::map<std::string, RstTree>* discourse = nullptr;
  EvidenceLookup evidence;
};

/// Column names of the configured groups ("group:index").
std::vector<std::string> cqa_columns(const CqaFeatureConfig& cfg);

std::vector<double> extract_answer_features(const CqaThread& thread, std::size_t answer,
                                            const CqaResources& res, const CqaFeatureConfig& cfg);

FeatureMatrix extract_cqa_features(const std::vector<CqaThread>& threads, const CqaResources& res,
                                   const CqaFeatureConfig& cfg,
                                   kernels::Policy policy = kernels::Policy::kParallel);

}  // namespace fc
