#pragma once

#include <cstddef>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <utility>
#include <vector>

namespace fc {

using SparseVector = std::vector<std::pair<std::size_t, double>>;

/// Smoothed inverse document frequencies: idf(w) = ln((1 + N) / (1 + df(w))) + 1.
/// Unseen words get the df = 0 value.
class IdfTable {
 public:
  IdfTable() = default;

  static IdfTable fit(std::span<const std::vector<std::string>> documents);

  double idf(std::string_view word) const;
  std::size_t documents() const { return n_docs_; }
  std::size_t document_frequency(std::string_view word) const;
  std::size_t size() const { return df_.size(); }

  /// Sparse term -> tf*idf weights of a bag of words (raw counts for tf).
  std::unordered_map<std::string, double> weights(std::span<const std::string> words) const;

  void save(std::ostream& out) const;
  static IdfTable load(std::istream& in);

 private:
  std::size_t n_docs_ = 0;
  std::unordered_map<std::string, std::size_t> df_;
};

/// Cosine between the TF-IDF vectors of two bags of words.
double tfidf_cosine(std::span<const std::string> a, std::span<const std::string> b,
                    const IdfTable& idf);

/// A fixed number of term slots chosen from training documents by document
/// frequency (ties broken alphabetically). Unused slots stay zero.
class Vocabulary {
 public:
  Vocabulary() = default;

  static Vocabulary fit(std::span<const std::vector<std::string>> documents, std::size_t slots);

  std::size_t slots() const { return slots_; }
  std::size_t terms() const { return terms_.size(); }
  const std::vector<std::string>& term_list() const { return terms_; }
  const IdfTable& idf() const { return idf_; }

  /// L2-normalised tf*idf over the slots; out-of-vocabulary words are ignored.
  std::vector<double> transform(std::span<const std::string> words) const;
  SparseVector transform_sparse(std::span<const std::string> words) const;

 private:
  std::size_t slots_ = 0;
  std::vector<std::string> terms_;
  std::unordered_map<std::string, std::size_t> index_;
  IdfTable idf_;
};

}  // namespace fc
