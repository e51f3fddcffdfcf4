#include <doctest.h>

#include <fstream>

#include "factcheck/error.hpp"
#include "factcheck/lexicons.hpp"
#include "factcheck/rng.hpp"
#include "factcheck/text.hpp"
#include "synthetic.hpp"

using namespace fc;

namespace {

std::vector<std::string> toks(const std::string& s) { return text::words(s); }

const LexiconSet& shipped() {
  static const LexiconSet set = testing::lexicons();
  return set;
}

}  // namespace

TEST_SUITE("lexicons") {

TEST_CASE("cue frequency counts matches over tokens") {
  const Lexicon hedges{"may", "perhaps", "sort of"};
  const std::vector<std::string> t = {"it", "may", "rain", "or", "perhaps", "not", "at", "all"};
  CHECK(cue_frequency(t, hedges) == 0.25);
  const auto typed = cue_frequency(t, hedges, BiasType::kHedges);
  CHECK(typed.bias_type == BiasType::kHedges);
  CHECK(typed.value == 0.25);

  const std::vector<std::string> none = {"plain", "words"};
  CHECK(cue_frequency(none, hedges) == 0.0);
  CHECK_THROWS_WITH_AS(cue_frequency(std::vector<std::string>{}, hedges), "empty text", Error);
}

TEST_CASE("factive know counted per token") {
  const std::string e1 =
      "you know the clinic moved last month; we know the new place is near the mall. it looks bigger.";
  const auto t = text::words(e1);
  const Lexicon factives{"know"};
  CHECK(cue_frequency(t, factives) == doctest::Approx(2.0 / double(t.size())));
}

TEST_CASE("n-gram entries match greedily without overlap") {
  const Lexicon lex{"sort of", "of course", "sort"};
  CHECK(lex.max_ngram() == 2);
  // "sort of" wins, leaving "course" alone
  CHECK(lex.count_matches(toks("sort of course")) == 1);
  CHECK(lex.count_matches(toks("SORT Of")) == 1);
}

TEST_CASE("cue frequency properties") {
  const Lexicon a{"know", "realize", "learn"};
  const Lexicon b{"may", "might", "perhaps"};
  std::vector<std::string> all;
  for (const char* w : {"know", "realize", "learn", "may", "might", "perhaps"}) all.emplace_back(w);
  const Lexicon ab(all);
  const char* pool[] = {"know", "may", "cat", "learn", "perhaps", "dog", "the", "might", "realize"};
  Rng rng(4);
  for (int trial = 0; trial < 200; ++trial) {
    std::vector<std::string> t;
    const auto n = 1 + rng.below(12);
    for (std::size_t i = 0; i < n; ++i) t.emplace_back(pool[rng.below(9)]);
    CHECK(ab.count_matches(t) == a.count_matches(t) + b.count_matches(t));
    auto upper = t;
    for (auto& w : upper) {
      if (rng.uniform() < 0.5) w[0] = static_cast<char>(std::toupper(w[0]));
    }
    CHECK(cue_frequency(upper, ab) == cue_frequency(t, ab));
    const double v = cue_frequency(t, ab);
    CHECK(v >= 0.0);
    CHECK(v <= 1.0);
    bool every = true;
    for (const auto& w : t) every = every && ab.contains(w);
    CHECK((v == 1.0) == every);
  }
}

TEST_CASE("multi-word cues") {
  const auto& lex = shipped();
  CHECK(lex.multiword_cue_count(toks("i believe it works")) == 1);
  CHECK(lex.multiword_cue_count(toks("we can obviously see this")) == 1);
  CHECK(lex.multiword_cue_count(toks("believe it")) == 0);
}

TEST_CASE("negation counts") {
  const auto& lex = shipped();
  CHECK(lex.negation_count(toks("I didn't say nuclear.")) == 1);
  CHECK(lex.negation_count(toks("never nobody not")) == 3);
  CHECK(lex.negation_count(toks("")) == 0);
}

TEST_CASE("shipped lexicons load with all twelve types") {
  const auto& lex = shipped();
  for (std::size_t i = 0; i < kNumBiasTypes; ++i) {
    CHECK_FALSE(lex.get(static_cast<BiasType>(i)).empty());
    CHECK(bias_type_from_name(kBiasTypeNames[i]) == static_cast<BiasType>(i));
  }
  const auto f = lex.linguistic_features(toks("I know we could perhaps say that"));
  CHECK(f.size() == 13);
  for (std::size_t i = 0; i < 12; ++i) {
    CHECK(f[i] >= 0.0);
    CHECK(f[i] <= 1.0);
  }
  const auto z = lex.linguistic_features({});
  for (double v : z) CHECK(v == 0.0);
  CHECK_THROWS(LexiconSet::load("/nonexistent/lexicons"));
}

TEST_CASE("lexicon files skip comments and blank lines") {
  testing::TempDir dir("lex");
  {
    std::ofstream out(dir.str("l.txt"));
    out << "# comment\n\nKnow\nsort of\n";
  }
  const auto l = Lexicon::load(dir.str("l.txt"));
  CHECK(l.size() == 2);
  CHECK(l.contains("know"));
  CHECK(l.contains("sort of"));
}

}  // TEST_SUITE
