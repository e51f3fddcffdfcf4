#include "factcheck/embeddings.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "factcheck/error.hpp"
#include "factcheck/text.hpp"

namespace fc {

void VectorStore::add(std::string word, std::span<const double> values) {
  if (values.size() != dim_) {
    throw Error("vector for '" + word + "' has " + std::to_string(values.size()) +
                " values, expected " + std::to_string(dim_));
  }
  if (index_.count(word)) throw Error("duplicate word '" + word + "'");
  index_.emplace(word, words_.size());
  words_.push_back(std::move(word));
  table_.insert(table_.end(), values.begin(), values.end());
}

std::span<const double> VectorStore::find(std::string_view word) const {
  auto it = index_.find(std::string(word));
  if (it == index_.end()) it = index_.find(text::lower(word));
  if (it == index_.end()) return {};
  return std::span<const double>(table_).subspan(it->second * dim_, dim_);
}

VectorStore parse_vectors(std::istream& in, std::optional<std::size_t> expected_dim) {
  std::string line;
  std::size_t lineno = 0;
  std::optional<VectorStore> store;
  std::vector<double> values;
  while (std::getline(in, line)) {
    ++lineno;
    std::istringstream ss(line);
    std::vector<std::string> fields;
    std::string f;
    while (ss >> f) fields.push_back(f);
    if (fields.empty()) continue;
    if (!store && lineno == 1 && fields.size() == 2 &&
        fields[0].find_first_not_of("0123456789") == std::string::npos &&
        fields[1].find_first_not_of("0123456789") == std::string::npos) {
      const std::size_t dim = std::stoul(fields[1]);
      if (expected_dim && dim != *expected_dim) {
        throw ParseError("header dimension " + std::to_string(dim) + " does not match expected " +
                             std::to_string(*expected_dim),
                         lineno);
      }
      store.emplace(dim);
      continue;
    }
    if (!store) {
      const std::size_t dim = fields.size() - 1;
      if (expected_dim && dim != *expected_dim) {
        throw ParseError("vector dimension " + std::to_string(dim) + " does not match expected " +
                             std::to_string(*expected_dim),
                         lineno);
      }
      store.emplace(dim);
    }
    if (fields.size() != store->dimension() + 1) {
      throw ParseError("row has " + std::to_string(fields.size() - 1) + " values, expected " +
                           std::to_string(store->dimension()),
                       lineno);
    }
    values.resize(store->dimension());
    for (std::size_t i = 0; i < values.size(); ++i) {
      try {
        values[i] = std::stod(fields[i + 1]);
      } catch (const std::exception&) {
        throw ParseError("non-numeric value '" + fields[i + 1] + "'", lineno);
      }
    }
    try {
      store->add(fields[0], values);
    } catch (const Error& e) {
      throw ParseError(e.what(), lineno);
    }
  }
  if (!store) throw ParseError("no vectors");
  return std::move(*store);
}

VectorStore load_vectors(const std::string& path, std::optional<std::size_t> expected_dim) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open vector file '" + path + "'");
  return parse_vectors(in, expected_dim);
}

std::vector<double> sentence_vector(std::span<const std::string> tokens, const VectorStore& store) {
  std::vector<double> out(store.dimension(), 0.0);
  std::size_t n = 0;
  for (const auto& t : tokens) {
    auto v = store.find(t);
    if (v.empty()) continue;
    for (std::size_t i = 0; i < out.size(); ++i) out[i] += v[i];
    ++n;
  }
  if (n > 0) {
    for (auto& x : out) x /= static_cast<double>(n);
  }
  return out;
}

double cosine(std::span<const double> u, std::span<const double> v) {
  if (u.size() != v.size()) {
    throw Error("cosine: length mismatch (" + std::to_string(u.size()) + " vs " +
                std::to_string(v.size()) + ")");
  }
  double dot = 0.0, nu = 0.0, nv = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    dot += u[i] * v[i];
    nu += u[i] * u[i];
    nv += v[i] * v[i];
  }
  if (nu == 0.0 || nv == 0.0) return 0.0;
  return dot / (std::sqrt(nu) * std::sqrt(nv));
}

}  // namespace fc
