#include <doctest.h>

#include <set>

#include <cmath>
#include <map>

#include "factcheck/error.hpp"
#include "factcheck/evidence.hpp"
#include "factcheck/text.hpp"
#include "factcheck/tfidf.hpp"
#include "synthetic.hpp"

using namespace fc;

namespace {

std::vector<std::string> W(const std::string& s) { return text::words(s); }

// tf*idf cosine written out term by term
double hand_cosine(const std::vector<std::string>& a, const std::vector<std::string>& b,
                   const std::vector<std::vector<std::string>>& docs) {
  auto idf = [&](const std::string& w) {
    double df = 0;
    for (const auto& d : docs) df += std::find(d.begin(), d.end(), w) != d.end();
    return std::log((1.0 + docs.size()) / (1.0 + df)) + 1.0;
  };
  std::map<std::string, double> va, vb;
  for (const auto& w : a) va[w] += 1;
  for (const auto& w : b) vb[w] += 1;
  for (auto& [w, x] : va) x *= idf(w);
  for (auto& [w, x] : vb) x *= idf(w);
  double dot = 0, na = 0, nb = 0;
  for (auto& [w, x] : va) {
    na += x * x;
    if (vb.count(w)) dot += x * vb[w];
  }
  for (auto& [w, x] : vb) nb += x * x;
  return dot / std::sqrt(na * nb);
}

std::vector<Token> tagged(const std::vector<std::pair<std::string, std::string>>& wp) {
  std::vector<Token> t;
  for (const auto& [w, p] : wp) t.push_back({w, p, ""});
  return t;
}

}  // namespace

TEST_SUITE("evidence") {

TEST_CASE("query from the national day thread") {
  const auto q = text::annotate("When is National Day in Qatar? I wanted to confirm the date.");
  const auto a = text::annotate("National Day is on 18 December every year.");
  std::vector<std::vector<std::string>> docs = {W("the day is good"), W("qatar is hot"), W("i wanted a car")};
  const auto idf = IdfTable::fit(docs);
  const std::vector<std::string> ents = {"National Day", "Qatar"};
  const auto query = build_query(q, a, idf, ents);
  const auto r = query.render();
  CHECK(r.find("\"National Day\"") != std::string::npos);
  CHECK(r.find("\"Qatar\"") != std::string::npos);
  CHECK(query.normalized().find("december") != std::string::npos);
  CHECK(query.terms.size() >= 5);
  CHECK(query.terms.size() <= 10);
  CHECK(query.entity_terms == 2);
}

TEST_CASE("query length limits") {
  const IdfTable idf;
  const auto few = tagged({{"visa", "NN"}, {"costs", "VBZ"}, {"cheap", "JJ"}, {"the", "DT"}});
  const auto q = build_query(few, {}, idf, {});
  CHECK(q.terms.size() == 3);
  CHECK(q.short_query);

  std::vector<std::pair<std::string, std::string>> many;
  for (int i = 0; i < 40; ++i) many.push_back({"word" + std::to_string(i), "NN"});
  const auto big = build_query(tagged(many), {}, idf, {});
  CHECK(big.terms.size() == 10);
  CHECK_FALSE(big.short_query);

  const auto none = tagged({{"the", "DT"}, {"of", "IN"}});
  CHECK_THROWS_WITH_AS(build_query(none, {}, idf, {}), "unqueryable", Error);

  auto drop = big;
  const auto before = drop.terms.size();
  CHECK(drop.drop_lowest());
  CHECK(drop.terms.size() == before - 1);
}

TEST_CASE("source types") {
  CHECK(classify_source("https://dohanews.co/article") == SourceType::kReputed);
  CHECK(classify_source("http://www.iloveqatar.net/forum/x") == SourceType::kForum);
  CHECK(classify_source("http://qppstudio.net/holidays") == SourceType::kOther);
  CHECK(host_of("https://www.Example.com:8080/a?b") == "example.com");
  auto c = SourceClassifier::defaults();
  CHECK(c.region_related("https://portal.moi.gov.qa/x", ""));
  CHECK_FALSE(c.region_related("https://example.com", "nothing here"));
  c.add_region_text("doha");
  CHECK(c.region_related("https://example.com", "Living in DOHA"));
}

TEST_CASE("cache behaviour") {
  testing::TempDir dir("cache");
  EvidenceCache cache(dir.str("c"));
  Query q;
  q.terms = {"visa", "fee", "doha", "office", "riyals"};
  CHECK_THROWS_AS(fetch(q, "bing", cache, FetchMode::kOffline), NoCachedEvidence);

  testing::FakeSearch search;
  const auto live = fetch(q, "bing", cache, FetchMode::kLive, &search);
  CHECK(search.calls == 1);
  REQUIRE_FALSE(live.empty());
  const auto again = fetch(q, "bing", cache, FetchMode::kOffline);
  CHECK(again == live);
  CHECK(fetch(q, "bing", cache, FetchMode::kOffline) == again);
  CHECK(search.calls == 1);
  CHECK_THROWS_AS(fetch(q, "google", cache, FetchMode::kOffline), NoCachedEvidence);

  testing::FakeSearch down;
  down.down = true;
  CHECK_THROWS_AS(fetch(q, "google", cache, FetchMode::kLive, &down), TransportError);
}

TEST_CASE("retry drops terms until enough results") {
  testing::TempDir dir("retry");
  EvidenceCache cache(dir.str("c"));
  Query q;
  q.terms = {"a1", "a2", "a3", "a4", "a5", "a6", "a7"};
  q.weights = {7, 6, 5, 4, 3, 2, 1};
  testing::FakeSearch search;
  fetch_with_retry(q, "bing", cache, FetchMode::kLive, &search, SourceClassifier::defaults(), 10, 5);
  // 7 terms, then 6, then 5
  CHECK(search.calls == 3);
}

TEST_CASE("containment") {
  const auto a = W("the fee is two hundred");
  CHECK(containment(a, a) == 1.0);
  CHECK(containment(a, W("completely other words")) == 0.0);
  CHECK(containment({}, a) == 0.0);
  CHECK(containment(W("fee fee two"), W("two fee")) == 1.0);
}

TEST_CASE("page text helpers") {
  CHECK(strip_tags("<p>Hi <b>there</b></p><script>x()</script>") == "Hi there");
  CHECK(rolling_triplets("One. Two. Three. Four.").size() == 2);
  CHECK(rolling_triplets("Only one.").size() == 1);
  CHECK(rolling_triplets("").empty());
}

TEST_CASE("snippet tf-idf cosines match a hand computation") {
  const std::string question = "visa fee in doha";
  const std::string answer = "the visa fee is 200 riyals";
  const std::vector<EvidenceResult> results = {
      {"https://portal.moi.gov.qa/a", SourceType::kReputed, true, "visa fee is 200 riyals at the office", "", "bing"},
      {"https://www.qatarliving.com/b", SourceType::kForum, true, "the fee in doha changed", "", "bing"},
  };
  const std::vector<std::vector<std::string>> docs = {W("visa fee doha"), W("the office is open"),
                                                      W("riyals and fee")};
  const auto idf = IdfTable::fit(docs);
  const auto b = similarity_bundle(question, answer, results, {&idf, nullptr});
  const double c0 = hand_cosine(W(answer), W(results[0].snippet), docs);
  const double c1 = hand_cosine(W(answer), W(results[1].snippet), docs);
  CHECK(b.at(Side::kAnswer, Granularity::kSnippet, Measure::kTfidfCosine, Aggregate::kMax, ResultFilter::kAll) ==
        doctest::Approx(std::max(c0, c1)).epsilon(1e-9));
  CHECK(b.at(Side::kAnswer, Granularity::kSnippet, Measure::kTfidfCosine, Aggregate::kAvg, ResultFilter::kAll) ==
        doctest::Approx((c0 + c1) / 2).epsilon(1e-9));
  CHECK(b.at(Side::kAnswer, Granularity::kSnippet, Measure::kTfidfCosine, Aggregate::kMax,
             ResultFilter::kForum) == doctest::Approx(c1).epsilon(1e-9));
  CHECK(b.at(Side::kAnswer, Granularity::kSnippet, Measure::kTfidfCosine, Aggregate::kMax,
             ResultFilter::kOther) == 0.0);
  // no page text anywhere
  CHECK(b.at(Side::kAnswer, Granularity::kPage, Measure::kContainment, Aggregate::kMax, ResultFilter::kAll) == 0.0);

  // an answer equal to a snippet is fully contained
  const std::vector<EvidenceResult> same = {
      {"https://a.qa/x", SourceType::kOther, true, answer, "", "bing"}};
  const auto s = similarity_bundle(question, answer, same, {&idf, nullptr});
  CHECK(s.at(Side::kAnswer, Granularity::kSnippet, Measure::kContainment, Aggregate::kMax, ResultFilter::kAll) ==
        1.0);
}

TEST_CASE("bundle aggregates are ordered") {
  const auto vectors = testing::make_vectors();
  const std::vector<std::vector<std::string>> docs = {W("visa fee doha"), W("the office")};
  const auto idf = IdfTable::fit(docs);
  std::vector<EvidenceResult> results;
  const char* snippets[] = {"The fee is 200 riyals.", "Good luck with that.", "Welcome to Qatar!",
                            "The office opens at 7 in the morning."};
  for (int i = 0; i < 4; ++i) {
    EvidenceResult r;
    r.url = "https://site" + std::to_string(i) + ".qa/";
    r.source_type = static_cast<SourceType>(i % 3);
    r.qatar_related = i != 2;
    r.snippet = snippets[i];
    r.page_text = "The fee is 200 riyals. The office opens at 7. Welcome to Qatar! Good luck with that.";
    results.push_back(r);
  }
  const auto b = similarity_bundle("How much does a visa cost in Doha?", "The fee is 200 riyals.", results,
                                   {&idf, &vectors});
  for (std::size_t s = 0; s < 3; ++s) {
    for (std::size_t g = 0; g < 2; ++g) {
      for (std::size_t m = 0; m < 3; ++m) {
        for (std::size_t f = 0; f < 4; ++f) {
          const auto S = static_cast<Side>(s);
          const auto G = static_cast<Granularity>(g);
          const auto M = static_cast<Measure>(m);
          const auto F = static_cast<ResultFilter>(f);
          CHECK(b.at(S, G, M, Aggregate::kMax, F) >= b.at(S, G, M, Aggregate::kAvg, F) - 1e-12);
          if (M != Measure::kEmbeddingCosine) {
            CHECK(b.at(S, G, M, Aggregate::kMax, F) <= b.at(S, G, M, Aggregate::kMax, ResultFilter::kAll) + 1e-12);
          }
          if (M == Measure::kContainment) {
            CHECK(b.at(S, G, M, Aggregate::kMax, F) >= 0.0);
            CHECK(b.at(S, G, M, Aggregate::kMax, F) <= 1.0);
          } else {
            CHECK(std::abs(b.at(S, G, M, Aggregate::kMax, F)) <= 1.0 + 1e-9);
          }
        }
      }
    }
  }
}

TEST_CASE("bundle selections") {
  CHECK(SimilarityBundle::kCells == 144);
  CHECK(BundleSelection::full().size() == 144);
  CHECK(BundleSelection::source_copies().size() == 108);
  CHECK(BundleSelection::unfiltered().size() == 36);
  std::set<std::string> names;
  for (std::size_t i = 0; i < SimilarityBundle::kCells; ++i) names.insert(SimilarityBundle::cell_name(i));
  CHECK(names.size() == 144);
  CHECK_THROWS_AS(BundleSelection::by_name("sixty"), ConfigError);
}

TEST_CASE("entailment proxy") {
  const auto v = testing::make_vectors();
  const auto a = W("the fee is 200 riyals");
  CHECK(entailment_proxy(a, a, &v) == doctest::Approx(1.0));
  CHECK(entailment_proxy(a, W("lol"), nullptr) == 0.0);
}

}  // TEST_SUITE
