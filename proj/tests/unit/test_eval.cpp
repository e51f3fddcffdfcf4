#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numeric>

#include "factcheck/error.hpp"
#include "factcheck/eval.hpp"
#include "factcheck/log.hpp"
#include "factcheck/rng.hpp"

using namespace fc;

namespace {

// Prefix enumeration: precision of every prefix that ends on a relevant item.
double ap_oracle(const std::vector<std::uint8_t>& l) {
  double sum = 0;
  int rel = 0;
  for (std::size_t end = 1; end <= l.size(); ++end) {
    if (!l[end - 1]) continue;
    int hits = 0;
    for (std::size_t i = 0; i < end; ++i) hits += l[i];
    sum += double(hits) / double(end);
    ++rel;
  }
  return rel ? sum / rel : 0.0;
}

std::vector<std::uint8_t> bits(unsigned mask, unsigned n) {
  std::vector<std::uint8_t> v(n);
  for (unsigned i = 0; i < n; ++i) v[i] = (mask >> i) & 1u;
  return v;
}

}  // namespace

TEST_SUITE("eval") {

TEST_CASE("average precision on fixed lists") {
  const std::vector<std::uint8_t> l = {1, 0, 1, 0};
  CHECK(average_precision(l) == doctest::Approx((1.0 + 2.0 / 3.0) / 2.0));
  CHECK(average_precision(l) == doctest::Approx(0.8333).epsilon(1e-4));
  const std::vector<std::uint8_t> top = {1, 1, 0, 0};
  CHECK(average_precision(top) == 1.0);
  const std::vector<std::uint8_t> none = {0, 0, 0};
  CHECK(average_precision(none) == 0.0);
}

TEST_CASE("precision at k and R-precision") {
  const std::vector<std::uint8_t> l = {1, 0, 1, 0};
  CHECK(precision_at_k(l, 2) == 0.5);
  CHECK(r_precision(l) == 0.5);
  const std::vector<std::uint8_t> perfect = {1, 1, 1, 0, 0};
  for (std::size_t k = 1; k <= 3; ++k) CHECK(precision_at_k(perfect, k) == 1.0);
  CHECK_THROWS_AS(precision_at_k(l, 0), Error);
}

TEST_CASE("P@k beyond the list counts missing ranks as misses") {
  log::level() = log::Level::kQuiet;
  const std::vector<std::uint8_t> l = {1, 1};
  CHECK(precision_at_k(l, 5) == doctest::Approx(0.4));
  log::level() = log::Level::kWarn;
}

TEST_CASE("metrics match enumeration for every label pattern up to length 10") {
  for (unsigned n = 1; n <= 10; ++n) {
    for (unsigned mask = 0; mask < (1u << n); ++mask) {
      const auto l = bits(mask, n);
      REQUIRE(average_precision(l) == doctest::Approx(ap_oracle(l)).epsilon(1e-12));
      const int R = std::accumulate(l.begin(), l.end(), 0);
      double rp = 0;
      if (R) {
        int hits = 0;
        for (int i = 0; i < R; ++i) hits += l[i];
        rp = double(hits) / R;
      }
      REQUIRE(r_precision(l) == rp);
      // k * P@k never decreases as k grows
      double prev = 0;
      for (std::size_t k = 1; k <= n; ++k) {
        const double cum = precision_at_k(l, k) * double(k);
        REQUIRE(cum + 1e-12 >= prev);
        prev = cum;
      }
    }
  }
}

TEST_CASE("ranked list sorts by score with natural id ties") {
  RankedList list({{"d/10", 0.5, 0}, {"d/2", 0.5, 1}, {"d/1", 0.9, 0}, {"d/3", 0.1, 1}});
  const auto& it = list.items();
  CHECK(it[0].id == "d/1");
  CHECK(it[1].id == "d/2");
  CHECK(it[2].id == "d/10");
  CHECK(it[3].id == "d/3");
  for (std::size_t i = 1; i < it.size(); ++i) CHECK(it[i - 1].score >= it[i].score);
  CHECK_THROWS_AS(RankedList({{"x", std::nan(""), 0}}), Error);
  CHECK(natural_less("a9", "a10"));
  CHECK_FALSE(natural_less("a10", "a9"));
  CHECK(natural_less("a", "ab"));
}

TEST_CASE("AP is unchanged by strictly increasing score transforms") {
  Rng rng(5);
  std::vector<RankedItem> items;
  for (int i = 0; i < 40; ++i) {
    items.push_back({"s" + std::to_string(i), rng.uniform(), std::uint8_t(rng.uniform() < 0.3)});
  }
  auto t = items;
  for (auto& x : t) x.score = std::exp(3 * x.score) - 7;
  CHECK(average_precision(RankedList(items)) == average_precision(RankedList(t)));
}

TEST_CASE("classification metrics of the all-positive predictor") {
  std::vector<std::uint8_t> gold(249, 0);
  std::fill(gold.begin(), gold.begin() + 128, 1);
  std::vector<std::uint8_t> pred(249, 1);
  const auto m = classification_metrics(pred, gold);
  CHECK(m.accuracy == doctest::Approx(0.514).epsilon(0.001 / 0.514));
  CHECK(std::abs(m.accuracy - 0.514) < 0.001);
  CHECK(std::abs(m.precision - 0.514) < 0.001);
  CHECK(m.recall == 1.0);
  CHECK(std::abs(m.f1 - 0.679) < 0.001);
}

TEST_CASE("classification metrics edge cases") {
  const std::vector<std::uint8_t> g = {1, 0, 1, 0};
  const auto p = classification_metrics(g, g);
  CHECK(p.accuracy == 1.0);
  CHECK(p.precision == 1.0);
  CHECK(p.recall == 1.0);
  CHECK(p.f1 == 1.0);
  const std::vector<std::uint8_t> zeros = {0, 0, 0, 0};
  CHECK(classification_metrics(zeros, g).f1 == 0.0);
  CHECK(classification_metrics(zeros, g).precision == 0.0);
  CHECK_THROWS_AS(classification_metrics(std::vector<std::uint8_t>{}, std::vector<std::uint8_t>{}), Error);
  const std::vector<std::uint8_t> one = {1};
  CHECK_THROWS_AS(classification_metrics(g, one), Error);
}

TEST_CASE("group folds") {
  std::vector<std::string> g = {"a", "a", "b", "c", "b", "d"};
  const auto folds = group_folds(g);
  REQUIRE(folds.size() == 4);
  CHECK(folds[0].group == "a");
  CHECK(folds[1].test == std::vector<std::size_t>{2, 4});
  for (const auto& f : folds) CHECK(f.train.size() + f.test.size() == g.size());
  std::vector<std::string> one = {"x", "x"};
  CHECK_THROWS_AS(group_folds(one), Error);
}

TEST_CASE("debate and thread groups give one fold per debate or question") {
  std::vector<Debate> ds(4);
  for (int d = 0; d < 4; ++d) {
    ds[d].id = "d" + std::to_string(d);
    ds[d].sentences.resize(3 + d);
  }
  CHECK(group_folds(debate_groups(ds)).size() == 4);

  std::vector<CqaThread> ts(71);
  for (std::size_t t = 0; t < ts.size(); ++t) {
    ts[t].question.id = "Q" + std::to_string(t);
    Answer a;
    a.factuality = Factuality::kPositive;
    ts[t].answers = {a, Answer{}};
  }
  const auto g = thread_groups(ts);
  CHECK(g.size() == 71);
  CHECK(group_folds(g).size() == 71);
  CHECK(thread_groups(ts, false).size() == 142);
}

TEST_CASE("majority baseline on a 128 to 121 split") {
  // 249 answers over 71 questions, 128 positive.
  std::vector<std::string> ids, groups;
  std::vector<std::uint8_t> gold;
  for (int i = 0; i < 249; ++i) {
    ids.push_back("a" + std::to_string(i));
    groups.push_back("q" + std::to_string(i % 71));
    gold.push_back(i < 128 ? 1 : 0);
  }
  CvOptions opt;
  opt.ranking = false;
  opt.classification = true;
  const auto rep = cross_validate(group_folds(groups), ids, gold, majority_baseline(gold), opt);
  CHECK(std::abs(rep.mean.accuracy - 0.514) < 0.001);
  CHECK(rep.mean.recall == 1.0);
  CHECK(std::abs(rep.mean.f1 - 0.679) < 0.001);
}

TEST_CASE("random baseline AP tracks the positive rate") {
  std::vector<std::string> ids, groups;
  std::vector<std::uint8_t> gold;
  Rng rng(11);
  for (int i = 0; i < 2000; ++i) {
    ids.push_back("s" + std::to_string(i));
    groups.push_back("g" + std::to_string(i % 4));
    gold.push_back(rng.uniform() < 0.16 ? 1 : 0);
  }
  const double rate = std::accumulate(gold.begin(), gold.end(), 0.0) / gold.size();
  CvOptions opt;
  opt.seeds.clear();
  for (std::uint64_t s = 1; s <= 30; ++s) opt.seeds.push_back(s);
  const auto rep = cross_validate(group_folds(groups), ids, gold, random_baseline(), opt);
  CHECK(std::abs(rep.mean.map - rate) < 0.02);
  CHECK(rep.per_seed.size() == 30);
  CHECK(rep.stddev.map > 0.0);
}

TEST_CASE("tfidf baseline ranks every test sentence") {
  std::vector<std::vector<std::string>> docs;
  std::vector<std::uint8_t> gold;
  std::vector<std::string> ids, groups;
  for (int i = 0; i < 80; ++i) {
    const bool pos = i % 3 == 0;
    docs.push_back(pos ? std::vector<std::string>{"tax", "percent", "million"}
                       : std::vector<std::string>{"thank", "you", "folks"});
    gold.push_back(pos);
    ids.push_back("s" + std::to_string(i));
    groups.push_back("d" + std::to_string(i % 4));
  }
  const auto folds = group_folds(groups);
  const auto runner = tfidf_svm_baseline(docs, gold, 50);
  for (const auto& f : folds) {
    const auto p = runner(f, 1);
    CHECK(p.scores.size() == f.test.size());
  }
  const auto rep = cross_validate(folds, ids, gold, runner, CvOptions{});
  CHECK(rep.mean.map == doctest::Approx(1.0));
}

TEST_CASE("cross validation is deterministic and parallel-safe") {
  std::vector<std::string> ids, groups;
  std::vector<std::uint8_t> gold;
  for (int i = 0; i < 100; ++i) {
    ids.push_back("s" + std::to_string(i));
    groups.push_back("g" + std::to_string(i % 5));
    gold.push_back(i % 7 == 0);
  }
  CvOptions a;
  a.seeds = {1, 2, 3};
  a.classification = true;
  CvOptions b = a;
  b.policy = kernels::Policy::kSerial;
  const auto ra = cross_validate(group_folds(groups), ids, gold, random_baseline(), a);
  const auto rb = cross_validate(group_folds(groups), ids, gold, random_baseline(), b);
  CHECK(ra.to_json() == rb.to_json());
  CHECK(ra.to_text() == rb.to_text());
  CHECK(ra.folds.size() == 15);
  for (const auto& f : ra.folds) {
    for (auto c : ra.columns()) {
      const double v = EvalReport::get(f.metrics, c);
      CHECK(v >= 0.0);
      CHECK(v <= 1.0);
    }
  }
}

TEST_CASE("report columns and baseline names") {
  EvalReport r;
  r.ranking = true;
  r.classification = false;
  CHECK(r.columns().size() == 6);
  r.classification = true;
  CHECK(r.columns().size() == 10);
  CHECK(baseline_from_name("tfidf") == Baseline::kTfidfSvmRank);
  CHECK(to_string(Baseline::kMajority) == "majority");
  CHECK_THROWS_AS(baseline_from_name("oracle"), ConfigError);
}

}  // TEST_SUITE
