#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <span>
#include <string>
#include <unordered_map>
#include <unordered_set>
#include <vector>

namespace fc {

struct SweepStats {
  std::size_t sweep = 0;
  /// Sum of the topic totals table after the sweep.
  std::size_t assigned_tokens = 0;
  /// Sum of the document-topic table after the sweep.
  std::size_t doc_assigned_tokens = 0;
  std::size_t corpus_tokens = 0;
};

struct LdaOptions {
  std::size_t topics = 300;
  std::size_t iterations = 1000;
  std::uint64_t seed = 1;
  /// Document-topic prior; a non-positive value means 50 / topics.
  double alpha = 0.0;
  double beta = 0.01;
  /// Sweeps discarded before averaging document distributions; npos = half.
  std::size_t burn_in = static_cast<std::size_t>(-1);
  std::unordered_set<std::string> stopwords;
  std::function<void(const SweepStats&)> on_sweep;
};

struct InferOptions {
  std::size_t iterations = 50;
  std::size_t burn_in = 10;
  std::uint64_t seed = 1;
};

/// Collapsed-Gibbs LDA state: word-topic counts of the final training sweep plus
/// the averaged per-document distributions of the training corpus.
class TopicModel {
 public:
  std::size_t topics() const { return k_; }
  std::size_t vocabulary_size() const { return vocab_.size(); }
  double alpha() const { return alpha_; }
  double beta() const { return beta_; }
  const std::vector<std::string>& vocabulary() const { return vocab_; }

  /// Averaged distribution of training document `d`.
  std::span<const double> training_distribution(std::size_t d) const {
    return std::span<const double>(doc_dist_).subspan(d * k_, k_);
  }
  std::size_t training_documents() const { return k_ ? doc_dist_.size() / k_ : 0; }

  /// Topic of word `w` with the highest count, or -1 if unknown.
  int dominant_topic(const std::string& word) const;

  /// Gibbs inference on unseen text against fixed word-topic counts.
  /// All-OOV input returns the uniform distribution.
  std::vector<double> infer(std::span<const std::string> tokens, const InferOptions& opt = {}) const;

  /// Total assignments in each count table must equal the token count.
  bool consistent() const;

  void save(std::ostream& out) const;
  static TopicModel load(std::istream& in);
  void save(const std::string& path) const;
  static TopicModel load(const std::string& path);

  bool operator==(const TopicModel&) const = default;

 private:
  friend TopicModel train_lda(std::span<const std::vector<std::string>>, const LdaOptions&);

  std::size_t k_ = 0;
  double alpha_ = 0.0;
  double beta_ = 0.0;
  std::size_t tokens_ = 0;
  std::vector<std::string> vocab_;
  std::unordered_map<std::string, std::size_t> index_;
  std::vector<std::int32_t> word_topic_;  // V x K
  std::vector<std::int64_t> topic_total_;
  std::vector<double> doc_dist_;  // D x K
};

/// Throws if no document contains an in-vocabulary token after stop-word removal.
TopicModel train_lda(std::span<const std::vector<std::string>> documents, const LdaOptions& opt);

inline std::vector<double> infer_distribution(const TopicModel& model,
                                              std::span<const std::string> tokens,
                                              const InferOptions& opt = {}) {
  return model.infer(tokens, opt);
}

}  // namespace fc
