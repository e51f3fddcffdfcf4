#include "factcheck/features_cqa.hpp"

#include <algorithm>
#include <cctype>
#include <regex>
#include <set>
#include <unordered_set>

#include "factcheck/error.hpp"
#include "factcheck/log.hpp"
#include "factcheck/text.hpp"

namespace fc {

std::array<double, 5> thread_support(const CqaThread& thread, std::size_t answer,
                                     const VectorStore* vectors) {
  const auto& answers = thread.answers;
  const Answer& a = answers.at(answer);
  const bool good = a.goodness == Goodness::kGood;
  std::array<double, 5> out{};

  if (vectors) {
    std::vector<double> rest(vectors->dimension(), 0.0);
    std::size_t n = 0;
    for (std::size_t i = 0; i < answers.size(); ++i) {
      if (i == answer || answers[i].goodness != Goodness::kGood) continue;
      const auto v = sentence_vector(text::words(answers[i].text), *vectors);
      for (std::size_t k = 0; k < rest.size(); ++k) rest[k] += v[k];
      ++n;
    }
    if (n) {
      for (auto& x : rest) x /= static_cast<double>(n);
      out[0] = cosine(sentence_vector(text::words(a.text), *vectors), rest);
    }
  }

  const double N = static_cast<double>(answers.size());
  const double rank = static_cast<double>(answer + 1);
  out[1] = 1.0 / rank;
  out[3] = (N - rank + 1.0) / N;
  if (good) {
    std::size_t good_rank = 0, good_total = 0;
    for (std::size_t i = 0; i < answers.size(); ++i) {
      if (answers[i].goodness != Goodness::kGood) continue;
      ++good_total;
      if (i <= answer) ++good_rank;
    }
    out[2] = 1.0 / static_cast<double>(good_rank);
    out[4] = (static_cast<double>(good_total) - static_cast<double>(good_rank) + 1.0) /
             static_cast<double>(good_total);
  }
  return out;
}

const std::array<std::string_view, kCredibilityFeatures> kCredibilityNames = {
    "urls",          "images",         "emails",          "phones",
    "tokens",        "sentences",      "tokens_per_sentence", "smileys_positive",
    "smileys_negative", "exclaim_1",   "exclaim_2",       "exclaim_3",
    "question_1",    "question_2",     "question_3",      "interrogative_sentences",
    "nouns",         "verbs",          "adjectives",      "adverbs",
    "pronouns",      "oov_words",      "first_person",    "second_person",
    "third_person",  "first_person_share", "second_person_share", "third_person_share",
    "pronoun_share", "uppercase_word_share", "characters"};

namespace {

const std::regex& url_re() {
  static const std::regex re(R"((https?://|www\.)[^\s<>"]+)", std::regex::icase);
  return re;
}

const std::regex& email_re() {
  static const std::regex re(R"([A-Za-z0-9._%+-]+@[A-Za-z0-9-]+(\.[A-Za-z0-9-]+)*\.[A-Za-z]{2,})");
  return re;
}

const std::regex& phone_re() {
  static const std::regex re(R"(\+?\d[\d\- ().]{5,}\d)");
  return re;
}

std::size_t count_matches(const std::string& s, const std::regex& re) {
  return static_cast<std::size_t>(
      std::distance(std::sregex_iterator(s.begin(), s.end(), re), std::sregex_iterator()));
}

std::size_t count_substr(std::string_view s, std::string_view needle) {
  std::size_t n = 0;
  for (auto p = s.find(needle); p != std::string_view::npos; p = s.find(needle, p + needle.size())) {
    ++n;
  }
  return n;
}

bool in_list(std::string_view w, std::initializer_list<std::string_view> list) {
  return std::find(list.begin(), list.end(), w) != list.end();
}

}  // namespace

std::array<double, kCredibilityFeatures> credibility_features(const Answer& answer,
                                                              const VectorStore* vectors) {
  std::array<double, kCredibilityFeatures> f{};
  const std::string& t = answer.text;

  std::size_t images = count_substr(text::lower(t), "<img");
  std::string rest = t;
  std::size_t urls = 0;
  for (auto it = std::sregex_iterator(t.begin(), t.end(), url_re()); it != std::sregex_iterator();
       ++it) {
    ++urls;
    const std::string u = text::lower(it->str());
    for (const char* ext : {".jpg", ".jpeg", ".png", ".gif", ".bmp", ".webp"}) {
      if (u.ends_with(ext)) {
        ++images;
        break;
      }
    }
  }
  rest = std::regex_replace(rest, url_re(), " ");
  const std::size_t emails = count_matches(rest, email_re());
  rest = std::regex_replace(rest, email_re(), " ");
  std::size_t phones = 0;
  for (auto it = std::sregex_iterator(rest.begin(), rest.end(), phone_re());
       it != std::sregex_iterator(); ++it) {
    const std::string m = it->str();
    if (std::count_if(m.begin(), m.end(), [](unsigned char c) { return std::isdigit(c); }) >= 7) {
      ++phones;
    }
  }
  f[0] = static_cast<double>(urls);
  f[1] = static_cast<double>(images);
  f[2] = static_cast<double>(emails);
  f[3] = static_cast<double>(phones);

  std::vector<Token> tokens = answer.tokens.empty() ? text::annotate(t) : answer.tokens;
  text::ensure_pos(tokens);
  const auto words = text::words(tokens);
  const auto sentences = text::split_sentences(t);
  f[4] = static_cast<double>(words.size());
  f[5] = static_cast<double>(sentences.size());
  f[6] = sentences.empty() ? 0.0 : f[4] / f[5];

  for (const char* s : {":)", ":-)", ":D", ":-D", ";)", ";-)", ":P", ":-P", "=)", "(:"}) {
    f[7] += static_cast<double>(count_substr(t, s));
  }
  for (const char* s : {":(", ":-(", ":'(", "=(", "):"}) {
    f[8] += static_cast<double>(count_substr(t, s));
  }

  // Runs of '!' and '?': length 1, 2, and 3 or more.
  for (std::size_t i = 0; i < t.size();) {
    if (t[i] != '!' && t[i] != '?') {
      ++i;
      continue;
    }
    const char c = t[i];
    std::size_t j = i;
    while (j < t.size() && t[j] == c) ++j;
    const std::size_t run = std::min<std::size_t>(j - i, 3);
    f[(c == '!' ? 9 : 12) + run - 1] += 1.0;
    i = j;
  }
  for (const auto& s : sentences) {
    std::string_view v = s;
    while (!v.empty() && std::isspace(static_cast<unsigned char>(v.back()))) v.remove_suffix(1);
    if (!v.empty() && v.back() == '?') f[15] += 1.0;
  }

  double first = 0, second = 0, third = 0, pronouns = 0, upper = 0;
  for (const auto& tok : tokens) {
    const std::string& p = tok.pos;
    if (p.starts_with("NN")) f[16] += 1.0;
    if (p.starts_with("VB") || p == "MD") f[17] += 1.0;
    if (p.starts_with("JJ")) f[18] += 1.0;
    if (p.starts_with("RB")) f[19] += 1.0;
    if (p == "PRP" || p == "PRP$" || p == "WP" || p == "WP$") f[20] += 1.0;
    if (!text::is_word(tok.surface)) continue;
    const std::string w = text::lower(tok.surface);
    if (vectors && !vectors->contains(w)) f[21] += 1.0;
    if (in_list(w, {"i", "me", "my", "mine", "myself", "we", "us", "our", "ours", "ourselves"})) {
      ++first;
    } else if (in_list(w, {"you", "your", "yours", "yourself", "yourselves", "u", "ur"})) {
      ++second;
    } else if (in_list(w, {"he", "him", "his", "himself", "she", "her", "hers", "herself", "it",
                           "its", "itself", "they", "them", "their", "theirs", "themselves"})) {
      ++third;
    }
    std::size_t letters = 0;
    bool all_upper = true;
    for (unsigned char c : tok.surface) {
      if (std::isalpha(c)) {
        ++letters;
        if (!std::isupper(c)) all_upper = false;
      }
    }
    if (letters >= 2 && all_upper) ++upper;
  }
  pronouns = first + second + third;
  f[22] = first;
  f[23] = second;
  f[24] = third;
  f[25] = pronouns > 0 ? first / pronouns : 0.0;
  f[26] = pronouns > 0 ? second / pronouns : 0.0;
  f[27] = pronouns > 0 ? third / pronouns : 0.0;
  f[28] = words.empty() ? 0.0 : pronouns / static_cast<double>(words.size());
  f[29] = words.empty() ? 0.0 : upper / static_cast<double>(words.size());
  f[30] = static_cast<double>(text::utf8_length(t));
  return f;
}

HqIndex::HqIndex(std::span<const std::string> posts) {
  for (const auto& p : posts) {
    for (auto& s : text::split_sentences(p)) {
      auto w = text::words(s);
      if (w.empty()) continue;
      sentences_.push_back(std::move(s));
      words_.push_back(std::move(w));
    }
  }
}

std::vector<double> hq_support(const Question& question, const Answer& answer, const HqIndex& hq,
                               const IdfTable& idf, const VectorStore* vectors, std::size_t k) {
  std::vector<double> out(k, 0.0);
  if (hq.size() == 0 || k == 0) return out;
  const std::vector<Token> qt = question.tokens.empty() ? text::annotate(question.text()) : question.tokens;
  const std::vector<Token> at = answer.tokens.empty() ? text::annotate(answer.text) : answer.tokens;
  Query q;
  try {
    q = build_query(qt, at, idf, {});
  } catch (const Error&) {
    return out;
  }
  std::vector<std::string> query_words;
  for (const auto& term : q.terms) {
    for (auto& w : text::words(term)) query_words.push_back(std::move(w));
  }
  std::vector<std::pair<double, std::size_t>> ranked;
  ranked.reserve(hq.size());
  for (std::size_t i = 0; i < hq.size(); ++i) {
    ranked.emplace_back(tfidf_cosine(query_words, hq.words(i), idf), i);
  }
  const std::size_t top = std::min(k, ranked.size());
  std::partial_sort(ranked.begin(), ranked.begin() + static_cast<std::ptrdiff_t>(top), ranked.end(),
                    [](const auto& a, const auto& b) {
                      return a.first != b.first ? a.first > b.first : a.second < b.second;
                    });
  const auto answer_words = text::words(at);
  for (std::size_t i = 0; i < top; ++i) {
    out[i] = entailment_proxy(answer_words, hq.words(ranked[i].second), vectors);
  }
  std::sort(out.begin(), out.end(), std::greater<>());
  return out;
}

std::vector<double> web_support(std::string_view question, std::string_view answer,
                                std::span<const EvidenceResult> results,
                                const SimilarityResources& res, const BundleSelection& selection) {
  return selection.apply(similarity_bundle(question, answer, results, res));
}

SparseVector question_bow(const Question& question, const Vocabulary& vocab) {
  return vocab.transform_sparse(question.tokens.empty() ? text::words(question.text())
                                                        : text::words(question.tokens));
}

// ---------------------------------------------------------------------------

namespace {

void add_columns(std::vector<std::string>& cols, std::string_view group, std::size_t n) {
  for (std::size_t i = 0; i < n; ++i) cols.push_back(std::string(group) + ":" + std::to_string(i));
}

}  // namespace

std::vector<std::string> cqa_columns(const CqaFeatureConfig& cfg) {
  std::vector<std::string> cols;
  if (cfg.thread) add_columns(cols, "thread_support", 5);
  if (cfg.forum) add_columns(cols, "forum_support", cfg.forum_selection.size());
  if (cfg.hq) add_columns(cols, "hq_support", cfg.hq_k);
  if (cfg.web) add_columns(cols, "web_support", cfg.web_selection.size());
  if (cfg.credibility) add_columns(cols, "credibility", kCredibilityFeatures);
  if (cfg.linguistic) add_columns(cols, "linguistic", 13);
  if (cfg.discourse) add_columns(cols, "discourse", kDiscourseFeatures);
  return cols;
}

std::vector<double> extract_answer_features(const CqaThread& thread, std::size_t answer,
                                            const CqaResources& res, const CqaFeatureConfig& cfg) {
  const Answer& a = thread.answers.at(answer);
  const std::string qtext = thread.question.text();
  std::vector<double> v;
  auto append = [&](std::span<const double> xs) { v.insert(v.end(), xs.begin(), xs.end()); };
  const SimilarityResources sim{res.idf, res.vectors};

  if (cfg.thread) append(thread_support(thread, answer, res.vectors));
  if (cfg.forum) {
    if (res.evidence) {
      const auto results = res.evidence(thread, a, cfg.forum_engine);
      append(web_support(qtext, a.text, results, sim, cfg.forum_selection));
    } else {
      v.resize(v.size() + cfg.forum_selection.size(), 0.0);
    }
  }
  if (cfg.hq) {
    if (res.hq) {
      static const IdfTable kUniform;
      append(hq_support(thread.question, a, *res.hq, res.idf ? *res.idf : kUniform, res.vectors,
                        cfg.hq_k));
    } else {
      v.resize(v.size() + cfg.hq_k, 0.0);
    }
  }
  if (cfg.web) {
    if (res.evidence) {
      std::vector<EvidenceResult> all;
      for (const auto& engine : cfg.web_engines) {
        auto r = res.evidence(thread, a, engine);
        all.insert(all.end(), std::make_move_iterator(r.begin()), std::make_move_iterator(r.end()));
      }
      append(web_support(qtext, a.text, all, sim, cfg.web_selection));
    } else {
      v.resize(v.size() + cfg.web_selection.size(), 0.0);
    }
  }
  if (cfg.credibility) append(credibility_features(a, res.vectors));
  if (cfg.linguistic) {
    if (!res.lexicons) throw ConfigError("linguistic features need lexicons");
    const auto words = a.tokens.empty() ? text::words(a.text) : text::words(a.tokens);
    append(res.lexicons->linguistic_features(words));
  }
  if (cfg.discourse) {
    std::array<double, kDiscourseFeatures> d{};
    if (res.discourse) {
      if (auto it = res.discourse->find(a.id); it != res.discourse->end()) {
        std::set<int> targets;
        for (int id : it->second.sentence_ids()) {
          if (id >= 0) targets.insert(id);
        }
        if (!targets.empty()) d = discourse_features(it->second, targets);
      }
    }
    append(d);
  }
  return v;
}

FeatureMatrix extract_cqa_features(const std::vector<CqaThread>& threads, const CqaResources& res,
                                   const CqaFeatureConfig& cfg, kernels::Policy policy) {
  if (cfg.linguistic && !res.lexicons) throw ConfigError("linguistic features need lexicons");
  if (!res.vectors && cfg.thread) log::warn("no word vectors: thread-support cosine is zero");
  if (!res.evidence && (cfg.web || cfg.forum)) log::warn("no evidence source: support groups are zero");
  if (!res.hq && cfg.hq) log::warn("no high-quality posts: hq_support is zero");

  std::vector<std::pair<std::size_t, std::size_t>> rows;
  for (std::size_t t = 0; t < threads.size(); ++t) {
    if (threads[t].question.excluded) continue;
    for (std::size_t a = 0; a < threads[t].answers.size(); ++a) {
      if (cfg.labelled_only && threads[t].answers[a].factuality == Factuality::kNone) continue;
      rows.emplace_back(t, a);
    }
  }
  FeatureMatrix m;
  m.columns = cqa_columns(cfg);
  const std::size_t d = m.columns.size();
  m.ids.resize(rows.size());
  m.values.assign(rows.size() * d, 0.0);
  kernels::for_each_index(
      rows.size(),
      [&](std::size_t r) {
        const auto [t, a] = rows[r];
        const auto v = extract_answer_features(threads[t], a, res, cfg);
        if (v.size() != d) throw Error("cQA feature width mismatch");
        std::copy(v.begin(), v.end(), m.values.begin() + static_cast<std::ptrdiff_t>(r * d));
        m.ids[r] = threads[t].answers[a].id;
      },
      policy);
  return m;
}

}  // namespace fc
