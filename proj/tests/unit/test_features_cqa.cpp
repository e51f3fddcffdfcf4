#include <doctest.h>

#include <cmath>

#include <algorithm>

#include "factcheck/features_cqa.hpp"
#include "factcheck/text.hpp"
#include "synthetic.hpp"

using namespace fc;

namespace {

std::size_t slot(std::string_view name) {
  return static_cast<std::size_t>(std::find(kCredibilityNames.begin(), kCredibilityNames.end(), name) -
                                  kCredibilityNames.begin());
}

Answer answer(const std::string& text, Goodness g = Goodness::kGood) {
  Answer a;
  a.id = "a";
  a.text = text;
  a.goodness = g;
  a.tokens = text::annotate(text);
  return a;
}

CqaThread ten_answers() {
  CqaThread t;
  t.question.id = "Q";
  t.question.body = "How much is the visa fee?";
  for (int i = 0; i < 10; ++i) {
    auto a = answer(i % 2 ? "Good luck with that." : "The fee is 200 riyals.",
                    i % 2 ? Goodness::kBad : Goodness::kGood);
    a.id = "Q_C" + std::to_string(i + 1);
    t.answers.push_back(a);
  }
  return t;
}

}  // namespace

TEST_SUITE("features_cqa") {

TEST_CASE("thread position values") {
  const auto t = ten_answers();
  CHECK(thread_support(t, 0, nullptr)[3] == 1.0);
  CHECK(thread_support(t, 1, nullptr)[3] == doctest::Approx(0.9));
  CHECK(thread_support(t, 2, nullptr)[1] == doctest::Approx(1.0 / 3));
  // third answer is the second Good one of five
  const auto f = thread_support(t, 2, nullptr);
  CHECK(f[2] == 0.5);
  CHECK(f[4] == doctest::Approx(0.8));
  CHECK(thread_support(t, 1, nullptr)[2] == 0.0);
}

TEST_CASE("thread cosine excludes the answer itself") {
  const auto v = testing::make_vectors();
  CqaThread lone;
  lone.answers = {answer("The fee is 200 riyals."), answer("Good luck with that.", Goodness::kBad)};
  CHECK(thread_support(lone, 0, &v)[0] == 0.0);
  auto t = ten_answers();
  CHECK(thread_support(t, 0, &v)[0] == doctest::Approx(1.0));
}

TEST_CASE("credibility counts") {
  auto f = credibility_features(answer("see http://a.b or mail c@d.com"));
  CHECK(f[slot("urls")] == 1.0);
  CHECK(f[slot("emails")] == 1.0);
  f = credibility_features(answer("Why? Why?? Why???"));
  CHECK(f[slot("question_1")] == 1.0);
  CHECK(f[slot("question_2")] == 1.0);
  CHECK(f[slot("question_3")] == 1.0);
  f = credibility_features(answer("The fee is 200 riyals."));
  CHECK(f[slot("pronouns")] == 0.0);
  CHECK(f[slot("first_person_share")] == 0.0);
  CHECK(f[slot("pronoun_share")] == 0.0);
  CHECK(kCredibilityNames.size() == 31);
  f = credibility_features(answer("I think you are right :) but we know they lie :("));
  CHECK(f[slot("smileys_positive")] == 1.0);
  CHECK(f[slot("smileys_negative")] == 1.0);
  CHECK(f[slot("first_person")] == 2.0);
  for (double x : f) CHECK(std::isfinite(x));
}

TEST_CASE("hq support") {
  const std::vector<std::string> posts = {
      "The visa fee is 200 riyals at the immigration office. Offices open at 7 in the morning.",
      "Camels are nice animals."};
  const HqIndex hq(posts);
  CHECK(hq.size() == 3);
  std::vector<std::vector<std::string>> docs;
  for (const auto& p : posts) docs.push_back(text::words(p));
  const auto idf = IdfTable::fit(docs);
  Question q;
  q.body = "How much is the visa fee?";
  q.tokens = text::annotate(q.body);
  const auto a = answer("The visa fee is 200 riyals at the immigration office.");
  const auto s = hq_support(q, a, hq, idf, nullptr, 4);
  REQUIRE(s.size() == 4);
  CHECK(s[0] == doctest::Approx(0.5));  // containment 1, no vectors
  const auto v = testing::make_vectors();
  CHECK(hq_support(q, a, hq, idf, &v, 4)[0] == doctest::Approx(1.0));
  CHECK(std::is_sorted(s.rbegin(), s.rend()));
  CHECK(hq_support(q, a, HqIndex{}, idf, nullptr, 4) == std::vector<double>(4, 0.0));
}

TEST_CASE("web support without region results is zero") {
  std::vector<EvidenceResult> r = {{"https://example.com", SourceType::kOther, false, "The fee is 200 riyals.", "", "bing"}};
  const auto w = web_support("q", "The fee is 200 riyals.", r, {}, BundleSelection::source_copies());
  CHECK(w.size() == 108);
  for (double x : w) CHECK(x == 0.0);
}

TEST_CASE("question bag of words") {
  const std::vector<std::vector<std::string>> docs = {{"visa", "fee"}, {"best", "school"}};
  const auto vocab = Vocabulary::fit(docs, 10);
  Question q;
  q.body = "zebra quasar";
  CHECK(question_bow(q, vocab).empty());
  q.body = "visa fee";
  const auto a = question_bow(q, vocab);
  const auto b = question_bow(q, vocab);
  CHECK(a == b);
  REQUIRE(a.size() == 2);
  // equal tf and idf, so both weights are 1/sqrt(2)
  CHECK(a[0].second == doctest::Approx(1 / std::sqrt(2.0)));
}

TEST_CASE("full extraction") {
  const auto threads = testing::make_cqa();
  const auto v = testing::make_vectors();
  const auto lex = testing::lexicons();
  std::vector<std::vector<std::string>> docs;
  for (const auto& t : threads) {
    for (const auto& a : t.answers) docs.push_back(text::words(a.text));
  }
  const auto idf = IdfTable::fit(docs);
  const std::vector<std::string> posts = {"The fee is 200 riyals."};
  const HqIndex hq(posts);
  CqaResources res;
  res.vectors = &v;
  res.lexicons = &lex;
  res.idf = &idf;
  res.hq = &hq;
  testing::FakeSearch search;
  const auto classifier = SourceClassifier::defaults();
  res.evidence = [&](const CqaThread&, const Answer& a, std::string_view engine) {
    Query q;
    q.terms = text::words(a.text);
    std::vector<EvidenceResult> out;
    for (const auto& h : search.search(engine, q)) {
      out.push_back({h.url, classifier.classify(h.url), classifier.region_related(h.url, h.page_text), h.snippet,
                     h.page_text, std::string(engine)});
    }
    return out;
  };
  const CqaFeatureConfig cfg;
  const auto m = extract_cqa_features(threads, res, cfg, kernels::Policy::kParallel);
  CHECK(m.rows() == 12);
  CHECK(m.cols() == cqa_columns(cfg).size());
  CHECK(m.cols() == 5 + 36 + 4 + 108 + 31 + 13 + 20);
  const auto s = extract_cqa_features(threads, res, cfg, kernels::Policy::kSerial);
  CHECK(m == s);
  for (double x : m.values) CHECK(std::isfinite(x));
}

}  // TEST_SUITE
