#include "factcheck/tfidf.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>
#include <unordered_set>

#include "factcheck/error.hpp"

namespace fc {

IdfTable IdfTable::fit(std::span<const std::vector<std::string>> documents) {
  IdfTable t;
  t.n_docs_ = documents.size();
  for (const auto& doc : documents) {
    std::unordered_set<std::string_view> seen(doc.begin(), doc.end());
    for (auto w : seen) ++t.df_[std::string(w)];
  }
  return t;
}

std::size_t IdfTable::document_frequency(std::string_view word) const {
  auto it = df_.find(std::string(word));
  return it == df_.end() ? 0 : it->second;
}

double IdfTable::idf(std::string_view word) const {
  const double df = static_cast<double>(document_frequency(word));
  return std::log((1.0 + static_cast<double>(n_docs_)) / (1.0 + df)) + 1.0;
}

std::unordered_map<std::string, double> IdfTable::weights(std::span<const std::string> words) const {
  std::unordered_map<std::string, double> tf;
  for (const auto& w : words) tf[w] += 1.0;
  for (auto& [w, v] : tf) v *= idf(w);
  return tf;
}

void IdfTable::save(std::ostream& out) const {
  out << "idf v1 " << n_docs_ << ' ' << df_.size() << '\n';
  std::vector<std::pair<std::string, std::size_t>> rows(df_.begin(), df_.end());
  std::sort(rows.begin(), rows.end());
  for (const auto& [w, df] : rows) out << w << '\t' << df << '\n';
}

IdfTable IdfTable::load(std::istream& in) {
  std::string magic, version;
  std::size_t n = 0, rows = 0;
  if (!(in >> magic >> version >> n >> rows) || magic != "idf" || version != "v1") {
    throw ParseError("not an idf table");
  }
  IdfTable t;
  t.n_docs_ = n;
  std::string word;
  std::size_t df = 0;
  for (std::size_t i = 0; i < rows; ++i) {
    if (!(in >> word >> df)) throw ParseError("truncated idf table", i + 2);
    t.df_[word] = df;
  }
  return t;
}

double tfidf_cosine(std::span<const std::string> a, std::span<const std::string> b,
                    const IdfTable& idf) {
  const auto wa = idf.weights(a);
  const auto wb = idf.weights(b);
  double dot = 0.0, na = 0.0, nb = 0.0;
  for (const auto& [w, v] : wa) {
    na += v * v;
    if (auto it = wb.find(w); it != wb.end()) dot += v * it->second;
  }
  for (const auto& [w, v] : wb) nb += v * v;
  if (na == 0.0 || nb == 0.0) return 0.0;
  return dot / (std::sqrt(na) * std::sqrt(nb));
}

Vocabulary Vocabulary::fit(std::span<const std::vector<std::string>> documents,
                           std::size_t slots) {
  Vocabulary v;
  v.slots_ = slots;
  v.idf_ = IdfTable::fit(documents);
  std::unordered_map<std::string, std::size_t> df;
  for (const auto& doc : documents) {
    std::unordered_set<std::string_view> seen(doc.begin(), doc.end());
    for (auto w : seen) ++df[std::string(w)];
  }
  std::vector<std::pair<std::string, std::size_t>> ranked(df.begin(), df.end());
  std::sort(ranked.begin(), ranked.end(), [](const auto& a, const auto& b) {
    return a.second != b.second ? a.second > b.second : a.first < b.first;
  });
  if (ranked.size() > slots) ranked.resize(slots);
  for (auto& [w, _] : ranked) {
    v.index_.emplace(w, v.terms_.size());
    v.terms_.push_back(w);
  }
  return v;
}

SparseVector Vocabulary::transform_sparse(std::span<const std::string> words) const {
  std::unordered_map<std::size_t, double> acc;
  for (const auto& w : words) {
    if (auto it = index_.find(w); it != index_.end()) acc[it->second] += 1.0;
  }
  SparseVector out(acc.begin(), acc.end());
  std::sort(out.begin(), out.end());
  double norm = 0.0;
  for (auto& [i, v] : out) {
    v *= idf_.idf(terms_[i]);
    norm += v * v;
  }
  if (norm > 0.0) {
    norm = std::sqrt(norm);
    for (auto& [i, v] : out) v /= norm;
  }
  return out;
}

std::vector<double> Vocabulary::transform(std::span<const std::string> words) const {
  std::vector<double> out(slots_, 0.0);
  for (const auto& [i, v] : transform_sparse(words)) out[i] = v;
  return out;
}

}  // namespace fc
