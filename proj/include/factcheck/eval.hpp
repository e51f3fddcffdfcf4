#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "factcheck/corpus.hpp"
#include "factcheck/kernels.hpp"
#include "factcheck/models/svm.hpp"

namespace fc {

struct RankedItem {
  std::string id;
  double score = 0.0;
  std::uint8_t gold = 0;
};

/// Items sorted by score, highest first; equal scores in natural id order
/// ("d/2" before "d/10").
class RankedList {
 public:
  RankedList() = default;
  explicit RankedList(std::vector<RankedItem> items);
  const std::vector<RankedItem>& items() const { return items_; }
  std::size_t size() const { return items_.size(); }
  std::vector<std::uint8_t> labels() const;

 private:
  std::vector<RankedItem> items_;
};

/// Digit runs compare by value, everything else bytewise.
bool natural_less(std::string_view a, std::string_view b);

/// Labels are in rank order. No relevant items gives 0.
double average_precision(std::span<const std::uint8_t> ranked);
/// Relevant in the top k over k. When k exceeds the list the missing ranks
/// count as non-relevant and a warning is logged (unless `quiet`).
double precision_at_k(std::span<const std::uint8_t> ranked, std::size_t k, bool quiet = false);
/// Precision at R, R = number of relevant items; 0 when R = 0.
double r_precision(std::span<const std::uint8_t> ranked);

double average_precision(const RankedList& list);
double precision_at_k(const RankedList& list, std::size_t k, bool quiet = false);
double r_precision(const RankedList& list);

struct ClassificationMetrics {
  double accuracy = 0.0, precision = 0.0, recall = 0.0, f1 = 0.0;
};

/// Positive class is 1. Zero denominators give 0. Throws on empty or
/// misaligned input.
ClassificationMetrics classification_metrics(std::span<const std::uint8_t> predicted,
                                             std::span<const std::uint8_t> gold);

inline constexpr std::array<std::size_t, 4> kPrecisionCutoffs = {5, 10, 20, 50};

/// Every reported number; a task fills only its half.
struct MetricSet {
  double map = 0.0, r_precision = 0.0, p5 = 0.0, p10 = 0.0, p20 = 0.0, p50 = 0.0;
  double accuracy = 0.0, precision = 0.0, recall = 0.0, f1 = 0.0;
};

inline constexpr std::array<std::string_view, 6> kRankingColumns = {"MAP",  "R-Pr", "P@5",
                                                                    "P@10", "P@20", "P@50"};
inline constexpr std::array<std::string_view, 4> kClassificationColumns = {"Accuracy", "Precision",
                                                                           "Recall", "F1"};

/// Ranking columns of one list (MAP holds its AP).
MetricSet ranking_metrics(std::span<const std::uint8_t> ranked);

struct FoldReport {
  std::string group;
  std::uint64_t seed = 0;
  MetricSet metrics;
  std::size_t test_items = 0;
};

struct EvalReport {
  std::string name;
  bool ranking = true;
  bool classification = false;
  std::vector<std::uint64_t> seeds;
  std::vector<FoldReport> folds;
  /// Per seed: ranking columns averaged over folds, classification columns
  /// computed on the predictions pooled over folds.
  std::vector<MetricSet> per_seed;
  MetricSet mean;
  /// Sample standard deviation over seeds (0 for a single seed).
  MetricSet stddev;

  std::vector<std::string_view> columns() const;
  static double get(const MetricSet& m, std::string_view column);

  std::string to_text() const;
  std::string to_json() const;
};

struct Fold {
  std::string group;
  std::vector<std::size_t> train;
  std::vector<std::size_t> test;
};

/// One fold per distinct group, in order of first appearance.
/// Throws Error when fewer than two groups exist.
std::vector<Fold> group_folds(std::span<const std::string> groups);

/// Row groups for the debate and cQA drivers.
std::vector<std::string> debate_groups(const std::vector<Debate>& debates);
/// Question id per answer row, in extract_cqa_features row order.
std::vector<std::string> thread_groups(const std::vector<CqaThread>& threads,
                                       bool labelled_only = true);

struct FoldPrediction {
  /// One score per test row, higher means more likely positive.
  std::vector<double> scores;
  /// Hard predictions; may be empty for ranking-only runs.
  std::vector<std::uint8_t> predicted;
};

/// Trains on fold.train and predicts fold.test. Must be safe to call from
/// several threads at once.
using FoldRunner = std::function<FoldPrediction(const Fold& fold, std::uint64_t seed)>;

struct CvOptions {
  std::string name;
  std::vector<std::uint64_t> seeds{0};
  bool ranking = true;
  bool classification = false;
  kernels::Policy policy = kernels::Policy::kParallel;
};

EvalReport cross_validate(const std::vector<Fold>& folds, std::span<const std::string> ids,
                          std::span<const std::uint8_t> gold, const FoldRunner& runner,
                          const CvOptions& opts);

enum class Baseline : std::uint8_t { kRandom, kTfidfSvmRank, kMajority };
Baseline baseline_from_name(std::string_view name);
std::string_view to_string(Baseline b);

/// Uniform scores drawn from mix_seed(seed, fold-specific salt).
FoldRunner random_baseline();
/// Predicts the majority class of the training rows for every test row.
FoldRunner majority_baseline(std::span<const std::uint8_t> gold);
/// TF-IDF bag of words (vocabulary fit on the training rows) and a linear
/// SVM; scores are decision values, predictions their sign.
FoldRunner tfidf_svm_baseline(const std::vector<std::vector<std::string>>& documents,
                              std::span<const std::uint8_t> gold, std::size_t slots = 5000,
                              LinearSvmConfig cfg = {});

}  // namespace fc
