#pragma once

#include <cstddef>
#include <iosfwd>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace fc {

/// Pre-trained word vectors kept in one contiguous row-major table.
class VectorStore {
 public:
  VectorStore() = default;
  explicit VectorStore(std::size_t dimension) : dim_(dimension) {}

  std::size_t dimension() const { return dim_; }
  std::size_t size() const { return words_.size(); }

  /// Throws on duplicate word or wrong arity.
  void add(std::string word, std::span<const double> values);

  /// Exact lookup first, then lowercase. Returns an empty span when absent.
  std::span<const double> find(std::string_view word) const;
  bool contains(std::string_view word) const { return !find(word).empty(); }

  const std::vector<std::string>& words() const { return words_; }

 private:
  std::size_t dim_ = 0;
  std::vector<std::string> words_;
  std::vector<double> table_;
  std::unordered_map<std::string, std::size_t> index_;
};

/// Text format: optional `<count> <dim>` header, then `word v1 ... vd` lines.
VectorStore load_vectors(const std::string& path,
                         std::optional<std::size_t> expected_dim = std::nullopt);
VectorStore parse_vectors(std::istream& in,
                          std::optional<std::size_t> expected_dim = std::nullopt);

/// Mean of the in-vocabulary token vectors; zero vector when none are known.
std::vector<double> sentence_vector(std::span<const std::string> tokens, const VectorStore& store);

/// Cosine similarity; 0 when either vector has zero norm. Throws on length mismatch.
double cosine(std::span<const double> u, std::span<const double> v);

}  // namespace fc
