#include "factcheck/lexicons.hpp"

#include <algorithm>
#include <fstream>
#include <sstream>

#include "factcheck/error.hpp"
#include "factcheck/text.hpp"

namespace fc {

std::optional<BiasType> bias_type_from_name(std::string_view name) {
  for (std::size_t i = 0; i < kNumBiasTypes; ++i) {
    if (kBiasTypeNames[i] == name) return static_cast<BiasType>(i);
  }
  return std::nullopt;
}

Lexicon::Lexicon(std::span<const std::string> entries) {
  for (const auto& e : entries) insert(e);
}

Lexicon::Lexicon(std::initializer_list<std::string_view> entries) {
  for (auto e : entries) insert(e);
}

void Lexicon::insert(std::string_view entry) {
  std::istringstream ss{std::string(entry)};
  std::string word;
  std::string normalised;
  std::size_t n = 0;
  while (ss >> word) {
    if (!normalised.empty()) normalised += ' ';
    normalised += text::lower(word);
    ++n;
  }
  if (n == 0) return;
  entries_.insert(std::move(normalised));
  max_ngram_ = std::max(max_ngram_, n);
}

Lexicon Lexicon::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open lexicon '" + path + "'");
  Lexicon lex;
  std::string line;
  while (std::getline(in, line)) {
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    lex.insert(line);
  }
  if (lex.empty()) throw Error("lexicon '" + path + "' has no entries");
  return lex;
}

bool Lexicon::contains(std::string_view word) const {
  return entries_.count(text::lower(word)) > 0;
}

std::size_t Lexicon::count_matches(std::span<const std::string> tokens) const {
  std::size_t matches = 0;
  std::size_t i = 0;
  std::vector<std::string> low(tokens.size());
  for (std::size_t k = 0; k < tokens.size(); ++k) low[k] = text::lower(tokens[k]);
  while (i < low.size()) {
    std::size_t matched = 0;
    const std::size_t longest = std::min(max_ngram_, low.size() - i);
    for (std::size_t n = longest; n >= 1; --n) {
      std::string key = low[i];
      for (std::size_t k = 1; k < n; ++k) {
        key += ' ';
        key += low[i + k];
      }
      if (entries_.count(key)) {
        matched = n;
        break;
      }
    }
    if (matched) {
      ++matches;
      i += matched;
    } else {
      ++i;
    }
  }
  return matches;
}

double cue_frequency(std::span<const std::string> tokens, const Lexicon& lexicon) {
  if (tokens.empty()) throw Error("empty text");
  return static_cast<double>(lexicon.count_matches(tokens)) / static_cast<double>(tokens.size());
}

CueFrequency cue_frequency(std::span<const std::string> tokens, const Lexicon& lexicon,
                           BiasType type) {
  return CueFrequency{type, cue_frequency(tokens, lexicon)};
}

LexiconSet LexiconSet::load(const std::string& dir) {
  LexiconSet set;
  for (std::size_t i = 0; i < kNumBiasTypes; ++i) {
    set.lexicons_[i] = Lexicon::load(dir + "/" + std::string(kBiasTypeNames[i]) + ".txt");
  }
  std::ifstream pos(dir + "/sentiment_positive.txt");
  std::ifstream neg(dir + "/sentiment_negative.txt");
  if (pos && neg) {
    set.sentiment_positive_ = Lexicon::load(dir + "/sentiment_positive.txt");
    set.sentiment_negative_ = Lexicon::load(dir + "/sentiment_negative.txt");
  }
  return set;
}

const Lexicon& LexiconSet::sentiment_positive() const {
  return sentiment_positive_ ? *sentiment_positive_ : get(BiasType::kPositives);
}

const Lexicon& LexiconSet::sentiment_negative() const {
  return sentiment_negative_ ? *sentiment_negative_ : get(BiasType::kNegatives);
}

void LexiconSet::set_sentiment(Lexicon positive, Lexicon negative) {
  sentiment_positive_ = std::move(positive);
  sentiment_negative_ = std::move(negative);
}

bool LexiconSet::is_cue_verb(const std::string& w) const {
  return get(BiasType::kFactives).contains(w) || get(BiasType::kAssertives).contains(w) ||
         get(BiasType::kImplicatives).contains(w) || get(BiasType::kReportVerbs).contains(w);
}

bool LexiconSet::is_subjective_adverb(const std::string& w) const {
  return w.size() > 2 && w.compare(w.size() - 2, 2, "ly") == 0 &&
         get(BiasType::kStrongSubj).contains(w);
}

std::size_t LexiconSet::multiword_cue_count(std::span<const std::string> tokens) const {
  const Lexicon& modals = get(BiasType::kModals);
  std::size_t count = 0;
  for (std::size_t i = 0; i + 1 < tokens.size(); ++i) {
    if (tokens[i] != "i" && tokens[i] != "we") continue;
    std::size_t j = i + 1;
    if (j < tokens.size() && modals.contains(tokens[j])) ++j;
    if (j < tokens.size() && is_subjective_adverb(tokens[j])) ++j;
    if (j < tokens.size() && is_cue_verb(tokens[j])) ++count;
  }
  return count;
}

std::size_t LexiconSet::negation_count(std::span<const std::string> tokens) const {
  const Lexicon& neg = get(BiasType::kNegations);
  std::size_t n = 0;
  for (const auto& t : tokens) n += neg.contains(t) ? 1 : 0;
  return n;
}

std::array<double, 13> LexiconSet::linguistic_features(std::span<const std::string> tokens) const {
  std::array<double, 13> out{};
  if (tokens.empty()) return out;
  for (std::size_t i = 0; i < kNumBiasTypes; ++i) out[i] = cue_frequency(tokens, lexicons_[i]);
  out[12] = static_cast<double>(multiword_cue_count(tokens));
  return out;
}

}  // namespace fc
