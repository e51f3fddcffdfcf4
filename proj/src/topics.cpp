#include "factcheck/topics.hpp"

#include <algorithm>
#include <fstream>
#include <numeric>
#include <sstream>

#include "factcheck/error.hpp"
#include "factcheck/numfmt.hpp"
#include "factcheck/rng.hpp"

namespace fc {
namespace {

std::size_t sample_index(std::span<const double> cumulative, double u) {
  const double target = u * cumulative.back();
  auto it = std::upper_bound(cumulative.begin(), cumulative.end(), target);
  if (it == cumulative.end()) --it;
  return static_cast<std::size_t>(it - cumulative.begin());
}

}  // namespace

TopicModel train_lda(std::span<const std::vector<std::string>> documents, const LdaOptions& opt) {
  if (opt.topics == 0) throw Error("LDA needs at least one topic");
  TopicModel m;
  m.k_ = opt.topics;
  m.alpha_ = opt.alpha > 0.0 ? opt.alpha : 50.0 / static_cast<double>(opt.topics);
  m.beta_ = opt.beta;
  const std::size_t K = m.k_;

  std::vector<std::vector<std::int32_t>> docs(documents.size());
  for (std::size_t d = 0; d < documents.size(); ++d) {
    for (const auto& w : documents[d]) {
      if (opt.stopwords.count(w)) continue;
      auto [it, inserted] = m.index_.emplace(w, m.vocab_.size());
      if (inserted) m.vocab_.push_back(w);
      docs[d].push_back(static_cast<std::int32_t>(it->second));
    }
  }
  if (m.vocab_.empty()) throw Error("LDA: empty vocabulary");
  const std::size_t V = m.vocab_.size();
  const double vbeta = static_cast<double>(V) * m.beta_;

  m.word_topic_.assign(V * K, 0);
  m.topic_total_.assign(K, 0);
  std::vector<std::int32_t> doc_topic(docs.size() * K, 0);
  std::vector<std::vector<std::int32_t>> z(docs.size());

  Rng rng(opt.seed);
  for (std::size_t d = 0; d < docs.size(); ++d) {
    z[d].resize(docs[d].size());
    for (std::size_t i = 0; i < docs[d].size(); ++i) {
      const auto k = static_cast<std::int32_t>(rng.below(K));
      z[d][i] = k;
      ++m.word_topic_[docs[d][i] * K + k];
      ++m.topic_total_[k];
      ++doc_topic[d * K + k];
      ++m.tokens_;
    }
  }

  const std::size_t burn_in =
      opt.burn_in == static_cast<std::size_t>(-1) ? opt.iterations / 2 : opt.burn_in;
  m.doc_dist_.assign(docs.size() * K, 0.0);
  std::size_t samples = 0;
  std::vector<double> cumulative(K);

  auto accumulate_theta = [&] {
    for (std::size_t d = 0; d < docs.size(); ++d) {
      const double denom = static_cast<double>(docs[d].size()) + static_cast<double>(K) * m.alpha_;
      for (std::size_t k = 0; k < K; ++k) {
        m.doc_dist_[d * K + k] += (doc_topic[d * K + k] + m.alpha_) / denom;
      }
    }
    ++samples;
  };

  for (std::size_t sweep = 1; sweep <= opt.iterations; ++sweep) {
    for (std::size_t d = 0; d < docs.size(); ++d) {
      std::int32_t* nd = &doc_topic[d * K];
      for (std::size_t i = 0; i < docs[d].size(); ++i) {
        const std::size_t w = static_cast<std::size_t>(docs[d][i]);
        std::int32_t* nw = &m.word_topic_[w * K];
        const auto old = static_cast<std::size_t>(z[d][i]);
        --nw[old];
        --nd[old];
        --m.topic_total_[old];
        double acc = 0.0;
        for (std::size_t k = 0; k < K; ++k) {
          acc += (nd[k] + m.alpha_) * (nw[k] + m.beta_) /
                 (static_cast<double>(m.topic_total_[k]) + vbeta);
          cumulative[k] = acc;
        }
        const std::size_t k = sample_index(cumulative, rng.uniform());
        z[d][i] = static_cast<std::int32_t>(k);
        ++nw[k];
        ++nd[k];
        ++m.topic_total_[k];
      }
    }
    if (sweep > burn_in) accumulate_theta();
    if (opt.on_sweep) {
      SweepStats st;
      st.sweep = sweep;
      st.corpus_tokens = m.tokens_;
      st.assigned_tokens = static_cast<std::size_t>(
          std::accumulate(m.topic_total_.begin(), m.topic_total_.end(), std::int64_t{0}));
      st.doc_assigned_tokens = static_cast<std::size_t>(
          std::accumulate(doc_topic.begin(), doc_topic.end(), std::int64_t{0}));
      opt.on_sweep(st);
    }
  }
  if (samples == 0) accumulate_theta();
  for (auto& v : m.doc_dist_) v /= static_cast<double>(samples);
  return m;
}

int TopicModel::dominant_topic(const std::string& word) const {
  auto it = index_.find(word);
  if (it == index_.end()) return -1;
  const auto* row = &word_topic_[it->second * k_];
  return static_cast<int>(std::max_element(row, row + k_) - row);
}

std::vector<double> TopicModel::infer(std::span<const std::string> tokens,
                                      const InferOptions& opt) const {
  const std::size_t K = k_;
  std::vector<double> theta(K, 1.0 / static_cast<double>(K));
  std::vector<std::size_t> ids;
  for (const auto& t : tokens) {
    if (auto it = index_.find(t); it != index_.end()) ids.push_back(it->second);
  }
  if (ids.empty() || K == 0) return theta;

  const double vbeta = static_cast<double>(vocab_.size()) * beta_;
  std::vector<double> inv_total(K);
  for (std::size_t k = 0; k < K; ++k) {
    inv_total[k] = 1.0 / (static_cast<double>(topic_total_[k]) + vbeta);
  }
  Rng rng(opt.seed);
  std::vector<std::int32_t> nd(K, 0);
  std::vector<std::size_t> z(ids.size());
  for (std::size_t i = 0; i < ids.size(); ++i) {
    z[i] = rng.below(K);
    ++nd[z[i]];
  }
  std::vector<double> cumulative(K);
  std::vector<double> acc_theta(K, 0.0);
  std::size_t samples = 0;
  const double denom = static_cast<double>(ids.size()) + static_cast<double>(K) * alpha_;
  const std::size_t iterations = std::max<std::size_t>(opt.iterations, 1);
  const std::size_t burn_in = std::min(opt.burn_in, iterations - 1);
  for (std::size_t sweep = 1; sweep <= iterations; ++sweep) {
    for (std::size_t i = 0; i < ids.size(); ++i) {
      --nd[z[i]];
      const std::int32_t* nw = &word_topic_[ids[i] * K];
      double acc = 0.0;
      for (std::size_t k = 0; k < K; ++k) {
        acc += (nd[k] + alpha_) * (nw[k] + beta_) * inv_total[k];
        cumulative[k] = acc;
      }
      z[i] = sample_index(cumulative, rng.uniform());
      ++nd[z[i]];
    }
    if (sweep > burn_in) {
      for (std::size_t k = 0; k < K; ++k) acc_theta[k] += (nd[k] + alpha_) / denom;
      ++samples;
    }
  }
  double total = 0.0;
  for (std::size_t k = 0; k < K; ++k) {
    theta[k] = acc_theta[k] / static_cast<double>(samples);
    total += theta[k];
  }
  for (auto& v : theta) v /= total;
  return theta;
}

bool TopicModel::consistent() const {
  std::int64_t wt = 0;
  for (auto c : word_topic_) {
    if (c < 0) return false;
    wt += c;
  }
  const std::int64_t tt = std::accumulate(topic_total_.begin(), topic_total_.end(), std::int64_t{0});
  return wt == static_cast<std::int64_t>(tokens_) && tt == static_cast<std::int64_t>(tokens_);
}

void TopicModel::save(std::ostream& out) const {
  out << "lda v1\n";
  out << k_ << ' ' << vocab_.size() << ' ' << tokens_ << ' ' << format_double(alpha_) << ' '
      << format_double(beta_) << ' ' << training_documents() << '\n';
  for (std::size_t w = 0; w < vocab_.size(); ++w) {
    out << vocab_[w];
    for (std::size_t k = 0; k < k_; ++k) {
      if (const auto c = word_topic_[w * k_ + k]) out << ' ' << k << ':' << c;
    }
    out << '\n';
  }
  for (std::size_t d = 0; d < training_documents(); ++d) {
    for (std::size_t k = 0; k < k_; ++k) {
      out << (k ? " " : "") << format_double(doc_dist_[d * k_ + k]);
    }
    out << '\n';
  }
}

TopicModel TopicModel::load(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line != "lda v1") throw ParseError("not an lda v1 model", 1);
  TopicModel m;
  std::size_t V = 0, D = 0;
  std::string alpha, beta;
  if (!std::getline(in, line)) throw ParseError("truncated lda model", 2);
  {
    std::istringstream ss(line);
    if (!(ss >> m.k_ >> V >> m.tokens_ >> alpha >> beta >> D)) {
      throw ParseError("bad lda header", 2);
    }
    m.alpha_ = parse_double(alpha);
    m.beta_ = parse_double(beta);
  }
  m.word_topic_.assign(V * m.k_, 0);
  m.topic_total_.assign(m.k_, 0);
  for (std::size_t w = 0; w < V; ++w) {
    if (!std::getline(in, line)) throw ParseError("truncated lda vocabulary", w + 3);
    std::istringstream ss(line);
    std::string word, cell;
    ss >> word;
    m.index_.emplace(word, m.vocab_.size());
    m.vocab_.push_back(word);
    while (ss >> cell) {
      const auto colon = cell.find(':');
      if (colon == std::string::npos) throw ParseError("bad lda count cell", w + 3);
      const std::size_t k = std::stoul(cell.substr(0, colon));
      const std::int32_t c = std::stoi(cell.substr(colon + 1));
      if (k >= m.k_) throw ParseError("topic index out of range", w + 3);
      m.word_topic_[w * m.k_ + k] = c;
      m.topic_total_[k] += c;
    }
  }
  m.doc_dist_.reserve(D * m.k_);
  for (std::size_t d = 0; d < D; ++d) {
    if (!std::getline(in, line)) throw ParseError("truncated lda distributions", V + d + 3);
    std::istringstream ss(line);
    std::string v;
    for (std::size_t k = 0; k < m.k_; ++k) {
      if (!(ss >> v)) throw ParseError("short lda distribution row", V + d + 3);
      m.doc_dist_.push_back(parse_double(v));
    }
  }
  return m;
}

void TopicModel::save(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw Error("cannot write '" + path + "'");
  save(out);
}

TopicModel TopicModel::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open topic model '" + path + "'");
  return load(in);
}

}  // namespace fc
