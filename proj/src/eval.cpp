#include "factcheck/eval.hpp"

#include <algorithm>
#include <cmath>
#include <memory>
#include <sstream>
#include <unordered_map>

#include <json.hpp>

#include "factcheck/error.hpp"
#include "factcheck/log.hpp"
#include "factcheck/numfmt.hpp"
#include "factcheck/rng.hpp"
#include "factcheck/tfidf.hpp"

namespace fc {

bool natural_less(std::string_view a, std::string_view b) {
  auto digit = [](char c) { return c >= '0' && c <= '9'; };
  std::size_t i = 0, j = 0;
  while (i < a.size() && j < b.size()) {
    if (digit(a[i]) && digit(b[j])) {
      std::size_t ie = i, je = j;
      while (ie < a.size() && digit(a[ie])) ++ie;
      while (je < b.size() && digit(b[je])) ++je;
      std::size_t is = i, js = j;
      while (is + 1 < ie && a[is] == '0') ++is;
      while (js + 1 < je && b[js] == '0') ++js;
      if (ie - is != je - js) return ie - is < je - js;
      const auto x = a.substr(is, ie - is), y = b.substr(js, je - js);
      if (x != y) return x < y;
      if (ie - i != je - j) return ie - i < je - j;
      i = ie;
      j = je;
    } else {
      if (a[i] != b[j]) return static_cast<unsigned char>(a[i]) < static_cast<unsigned char>(b[j]);
      ++i;
      ++j;
    }
  }
  return a.size() - i < b.size() - j;
}

RankedList::RankedList(std::vector<RankedItem> items) : items_(std::move(items)) {
  for (const auto& it : items_) {
    if (std::isnan(it.score)) throw Error("NaN score for item '" + it.id + "'");
  }
  std::stable_sort(items_.begin(), items_.end(), [](const RankedItem& x, const RankedItem& y) {
    if (x.score != y.score) return x.score > y.score;
    return natural_less(x.id, y.id);
  });
}

std::vector<std::uint8_t> RankedList::labels() const {
  std::vector<std::uint8_t> out;
  out.reserve(items_.size());
  for (const auto& it : items_) out.push_back(it.gold ? 1 : 0);
  return out;
}

double average_precision(std::span<const std::uint8_t> ranked) {
  double sum = 0.0;
  std::size_t hits = 0;
  for (std::size_t r = 0; r < ranked.size(); ++r) {
    if (!ranked[r]) continue;
    ++hits;
    sum += static_cast<double>(hits) / static_cast<double>(r + 1);
  }
  return hits ? sum / static_cast<double>(hits) : 0.0;
}

double precision_at_k(std::span<const std::uint8_t> ranked, std::size_t k, bool quiet) {
  if (k == 0) throw Error("precision@k needs k >= 1");
  if (k > ranked.size() && !quiet) {
    log::warn("P@" + std::to_string(k) + " on a list of " + std::to_string(ranked.size()) +
              " items");
  }
  const std::size_t m = std::min(k, ranked.size());
  std::size_t hits = 0;
  for (std::size_t r = 0; r < m; ++r) hits += ranked[r] ? 1 : 0;
  return static_cast<double>(hits) / static_cast<double>(k);
}

double r_precision(std::span<const std::uint8_t> ranked) {
  std::size_t R = 0;
  for (auto v : ranked) R += v ? 1 : 0;
  if (R == 0) return 0.0;
  return precision_at_k(ranked, R, true);
}

double average_precision(const RankedList& list) { return average_precision(list.labels()); }
double precision_at_k(const RankedList& list, std::size_t k, bool quiet) {
  return precision_at_k(list.labels(), k, quiet);
}
double r_precision(const RankedList& list) { return r_precision(list.labels()); }

ClassificationMetrics classification_metrics(std::span<const std::uint8_t> predicted,
                                             std::span<const std::uint8_t> gold) {
  if (predicted.empty()) throw Error("classification metrics of an empty set");
  if (predicted.size() != gold.size()) throw Error("predictions and gold labels differ in length");
  std::size_t tp = 0, fp = 0, fn = 0, correct = 0;
  for (std::size_t i = 0; i < gold.size(); ++i) {
    const bool p = predicted[i] != 0, g = gold[i] != 0;
    correct += p == g;
    tp += p && g;
    fp += p && !g;
    fn += !p && g;
  }
  auto ratio = [](std::size_t a, std::size_t b) {
    return b ? static_cast<double>(a) / static_cast<double>(b) : 0.0;
  };
  ClassificationMetrics m;
  m.accuracy = ratio(correct, gold.size());
  m.precision = ratio(tp, tp + fp);
  m.recall = ratio(tp, tp + fn);
  m.f1 = ratio(2 * tp, 2 * tp + fp + fn);
  return m;
}

MetricSet ranking_metrics(std::span<const std::uint8_t> ranked) {
  MetricSet m;
  m.map = average_precision(ranked);
  m.r_precision = r_precision(ranked);
  m.p5 = precision_at_k(ranked, 5, true);
  m.p10 = precision_at_k(ranked, 10, true);
  m.p20 = precision_at_k(ranked, 20, true);
  m.p50 = precision_at_k(ranked, 50, true);
  return m;
}

namespace {

double* field(MetricSet& m, std::string_view column) {
  if (column == "MAP") return &m.map;
  if (column == "R-Pr") return &m.r_precision;
  if (column == "P@5") return &m.p5;
  if (column == "P@10") return &m.p10;
  if (column == "P@20") return &m.p20;
  if (column == "P@50") return &m.p50;
  if (column == "Accuracy") return &m.accuracy;
  if (column == "Precision") return &m.precision;
  if (column == "Recall") return &m.recall;
  if (column == "F1") return &m.f1;
  throw Error("unknown metric column '" + std::string(column) + "'");
}

constexpr std::array<std::string_view, 10> kAllColumns = {
    "MAP", "R-Pr", "P@5", "P@10", "P@20", "P@50", "Accuracy", "Precision", "Recall", "F1"};

}  // namespace

std::vector<std::string_view> EvalReport::columns() const {
  std::vector<std::string_view> out;
  if (ranking) out.insert(out.end(), kRankingColumns.begin(), kRankingColumns.end());
  if (classification) {
    out.insert(out.end(), kClassificationColumns.begin(), kClassificationColumns.end());
  }
  return out;
}

double EvalReport::get(const MetricSet& m, std::string_view column) {
  return *field(const_cast<MetricSet&>(m), column);
}

std::string EvalReport::to_text() const {
  std::ostringstream out;
  const auto cols = columns();
  out << name << "  (seeds:";
  for (auto s : seeds) out << ' ' << s;
  out << ")\n";
  auto row = [&](std::string_view label, const MetricSet& m) {
    std::string l(label);
    l.resize(std::max<std::size_t>(l.size(), 14), ' ');
    out << l;
    for (auto c : cols) out << "  " << format_fixed(get(m, c), 3);
    out << '\n';
  };
  std::string head = "";
  head.resize(14, ' ');
  out << head;
  for (auto c : cols) {
    std::string s(c);
    while (s.size() < 5) s.insert(s.begin(), ' ');
    out << "  " << s;
  }
  out << '\n';
  row("mean", mean);
  row("std", stddev);
  for (std::size_t s = 0; s < per_seed.size(); ++s) {
    row("seed " + std::to_string(seeds[s]), per_seed[s]);
  }
  out << "folds\n";
  for (const auto& f : folds) row("  " + f.group + " @" + std::to_string(f.seed), f.metrics);
  return out.str();
}

std::string EvalReport::to_json() const {
  using nlohmann::ordered_json;
  const auto cols = columns();
  auto metrics = [&](const MetricSet& m) {
    ordered_json j = ordered_json::object();
    for (auto c : cols) j[std::string(c)] = get(m, c);
    return j;
  };
  ordered_json j;
  j["name"] = name;
  j["seeds"] = seeds;
  j["columns"] = ordered_json::array();
  for (auto c : cols) j["columns"].push_back(std::string(c));
  j["mean"] = metrics(mean);
  j["std"] = metrics(stddev);
  j["per_seed"] = ordered_json::array();
  for (std::size_t s = 0; s < per_seed.size(); ++s) {
    ordered_json e;
    e["seed"] = seeds[s];
    e["metrics"] = metrics(per_seed[s]);
    j["per_seed"].push_back(e);
  }
  j["folds"] = ordered_json::array();
  for (const auto& f : folds) {
    ordered_json e;
    e["group"] = f.group;
    e["seed"] = f.seed;
    e["test_items"] = f.test_items;
    e["metrics"] = metrics(f.metrics);
    j["folds"].push_back(e);
  }
  return j.dump(2) + "\n";
}

std::vector<Fold> group_folds(std::span<const std::string> groups) {
  std::vector<Fold> folds;
  std::unordered_map<std::string, std::size_t> index;
  for (std::size_t i = 0; i < groups.size(); ++i) {
    auto [it, fresh] = index.emplace(groups[i], folds.size());
    if (fresh) folds.push_back({groups[i], {}, {}});
  }
  if (folds.size() < 2) {
    throw Error("cross-validation needs at least 2 groups, found " + std::to_string(folds.size()));
  }
  for (std::size_t i = 0; i < groups.size(); ++i) {
    const std::size_t g = index.at(groups[i]);
    for (std::size_t f = 0; f < folds.size(); ++f) {
      (f == g ? folds[f].test : folds[f].train).push_back(i);
    }
  }
  return folds;
}

std::vector<std::string> debate_groups(const std::vector<Debate>& debates) {
  std::vector<std::string> out;
  for (const auto& d : debates) out.insert(out.end(), d.sentences.size(), d.id);
  return out;
}

std::vector<std::string> thread_groups(const std::vector<CqaThread>& threads,
                                       bool labelled_only) {
  std::vector<std::string> out;
  for (const auto& t : threads) {
    if (t.question.excluded) continue;
    for (const auto& a : t.answers) {
      if (labelled_only && a.factuality == Factuality::kNone) continue;
      out.push_back(t.question.id);
    }
  }
  return out;
}

EvalReport cross_validate(const std::vector<Fold>& folds, std::span<const std::string> ids,
                          std::span<const std::uint8_t> gold, const FoldRunner& runner,
                          const CvOptions& opts) {
  if (folds.size() < 2) throw Error("cross-validation needs at least 2 folds");
  if (ids.size() != gold.size()) throw Error("ids and gold labels differ in length");
  if (opts.seeds.empty()) throw ConfigError("no seeds given");
  if (!opts.ranking && !opts.classification) throw ConfigError("nothing to evaluate");

  EvalReport rep;
  rep.name = opts.name;
  rep.ranking = opts.ranking;
  rep.classification = opts.classification;
  rep.seeds = opts.seeds;

  const std::size_t F = folds.size();
  for (auto seed : opts.seeds) {
    std::vector<FoldPrediction> preds(F);
    kernels::for_each_index(
        F, [&](std::size_t f) { preds[f] = runner(folds[f], mix_seed(seed, f)); }, opts.policy);

    MetricSet seed_m;
    std::vector<std::uint8_t> pooled_pred, pooled_gold;
    for (std::size_t f = 0; f < F; ++f) {
      const auto& fold = folds[f];
      const auto& p = preds[f];
      if (p.scores.size() != fold.test.size()) {
        throw Error("fold '" + fold.group + "' returned " + std::to_string(p.scores.size()) +
                    " scores for " + std::to_string(fold.test.size()) + " rows");
      }
      FoldReport fr;
      fr.group = fold.group;
      fr.seed = seed;
      fr.test_items = fold.test.size();
      if (opts.ranking) {
        std::vector<RankedItem> items;
        items.reserve(fold.test.size());
        for (std::size_t k = 0; k < fold.test.size(); ++k) {
          const auto r = fold.test[k];
          items.push_back({ids[r], p.scores[k], gold[r]});
        }
        const auto rm = ranking_metrics(RankedList(std::move(items)).labels());
        fr.metrics.map = rm.map;
        fr.metrics.r_precision = rm.r_precision;
        fr.metrics.p5 = rm.p5;
        fr.metrics.p10 = rm.p10;
        fr.metrics.p20 = rm.p20;
        fr.metrics.p50 = rm.p50;
        for (auto c : kRankingColumns) {
          *field(seed_m, c) += EvalReport::get(fr.metrics, c) / static_cast<double>(F);
        }
      }
      if (opts.classification) {
        if (p.predicted.size() != fold.test.size()) {
          throw Error("fold '" + fold.group + "' returned no class predictions");
        }
        std::vector<std::uint8_t> g;
        for (auto r : fold.test) g.push_back(gold[r]);
        const auto cm = classification_metrics(p.predicted, g);
        fr.metrics.accuracy = cm.accuracy;
        fr.metrics.precision = cm.precision;
        fr.metrics.recall = cm.recall;
        fr.metrics.f1 = cm.f1;
        pooled_pred.insert(pooled_pred.end(), p.predicted.begin(), p.predicted.end());
        pooled_gold.insert(pooled_gold.end(), g.begin(), g.end());
      }
      rep.folds.push_back(std::move(fr));
    }
    if (opts.classification) {
      const auto cm = classification_metrics(pooled_pred, pooled_gold);
      seed_m.accuracy = cm.accuracy;
      seed_m.precision = cm.precision;
      seed_m.recall = cm.recall;
      seed_m.f1 = cm.f1;
    }
    rep.per_seed.push_back(seed_m);
  }

  const double S = static_cast<double>(rep.per_seed.size());
  for (auto c : kAllColumns) {
    double sum = 0.0;
    for (const auto& m : rep.per_seed) sum += EvalReport::get(m, c);
    const double mu = sum / S;
    double ss = 0.0;
    for (const auto& m : rep.per_seed) {
      const double d = EvalReport::get(m, c) - mu;
      ss += d * d;
    }
    *field(rep.mean, c) = mu;
    *field(rep.stddev, c) = rep.per_seed.size() > 1 ? std::sqrt(ss / (S - 1.0)) : 0.0;
  }
  return rep;
}

Baseline baseline_from_name(std::string_view name) {
  if (name == "random") return Baseline::kRandom;
  if (name == "tfidf_svm_rank" || name == "tfidf") return Baseline::kTfidfSvmRank;
  if (name == "majority") return Baseline::kMajority;
  throw ConfigError("unknown baseline '" + std::string(name) +
                    "' (expected random, tfidf_svm_rank or majority)");
}

std::string_view to_string(Baseline b) {
  switch (b) {
    case Baseline::kRandom: return "random";
    case Baseline::kTfidfSvmRank: return "tfidf_svm_rank";
    case Baseline::kMajority: return "majority";
  }
  return "?";
}

FoldRunner random_baseline() {
  return [](const Fold& fold, std::uint64_t seed) {
    Rng rng(mix_seed(seed, fnv1a(fold.group)));
    FoldPrediction p;
    for (std::size_t k = 0; k < fold.test.size(); ++k) {
      const double u = rng.uniform();
      p.scores.push_back(u);
      p.predicted.push_back(u >= 0.5 ? 1 : 0);
    }
    return p;
  };
}

FoldRunner majority_baseline(std::span<const std::uint8_t> gold) {
  auto labels = std::make_shared<std::vector<std::uint8_t>>(gold.begin(), gold.end());
  return [labels](const Fold& fold, std::uint64_t) {
    std::size_t pos = 0;
    for (auto r : fold.train) pos += (*labels)[r] ? 1 : 0;
    // Ties go to the positive class.
    const std::uint8_t cls = 2 * pos >= fold.train.size() ? 1 : 0;
    const double rate =
        fold.train.empty() ? 0.0 : static_cast<double>(pos) / static_cast<double>(fold.train.size());
    FoldPrediction p;
    p.scores.assign(fold.test.size(), rate);
    p.predicted.assign(fold.test.size(), cls);
    return p;
  };
}

FoldRunner tfidf_svm_baseline(const std::vector<std::vector<std::string>>& documents,
                              std::span<const std::uint8_t> gold, std::size_t slots,
                              LinearSvmConfig cfg) {
  if (documents.size() != gold.size()) throw Error("documents and labels differ in length");
  auto docs = std::make_shared<std::vector<std::vector<std::string>>>(documents);
  auto labels = std::make_shared<std::vector<std::uint8_t>>(gold.begin(), gold.end());
  return [docs, labels, slots, cfg](const Fold& fold, std::uint64_t seed) {
    std::vector<std::vector<std::string>> train_docs;
    std::vector<std::uint8_t> y;
    for (auto r : fold.train) {
      train_docs.push_back((*docs)[r]);
      y.push_back((*labels)[r]);
    }
    const auto vocab = Vocabulary::fit(train_docs, slots);
    std::vector<SparseVector> rows;
    rows.reserve(train_docs.size());
    for (const auto& d : train_docs) rows.push_back(vocab.transform_sparse(d));
    LinearSvmConfig c = cfg;
    c.seed = seed;
    const auto svm = train_linear_svm(rows, vocab.slots(), y, c);
    FoldPrediction p;
    for (auto r : fold.test) {
      const double d = svm.decision(vocab.transform_sparse((*docs)[r]));
      p.scores.push_back(d);
      p.predicted.push_back(d > 0.0 ? 1 : 0);
    }
    return p;
  };
}

}  // namespace fc
