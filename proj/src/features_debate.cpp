#include "factcheck/features_debate.hpp"

#include <algorithm>
#include <cctype>
#include <memory>
#include <unordered_set>

#include "factcheck/error.hpp"
#include "factcheck/log.hpp"
#include "factcheck/rng.hpp"
#include "factcheck/text.hpp"

namespace fc {

std::optional<DebateGroup> debate_group_from_name(std::string_view name) {
  for (std::size_t i = 0; i < kNumDebateGroups; ++i) {
    if (kDebateGroupNames[i] == name) return static_cast<DebateGroup>(i);
  }
  return std::nullopt;
}

std::size_t entity_type_index(std::string_view label) {
  std::string up;
  for (char c : label) up += static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  if (up == "PER") up = "PERSON";
  if (up == "ORGANIZATION") up = "ORG";
  if (up == "LOCATION") up = "LOC";
  for (std::size_t i = 0; i < kEntityTypes.size(); ++i) {
    if (kEntityTypes[i] == up) return i;
  }
  return 18;  // MISC
}

DebateLayout::DebateLayout(std::size_t topic_slots, std::size_t embedding_slots,
                           std::size_t bow_slots)
    : topic_slots_(topic_slots), embedding_slots_(embedding_slots), bow_slots_(bow_slots) {
  size_ = {3,
           3,
           8,
           topic_slots + 3,
           embedding_slots + 3,
           5,
           3,
           kDiscourseFeatures,
           bow_slots + kPosTagSet.size() + kEntityTypes.size() + 2,
           2,
           1,
           13,
           1,
           1};
  std::size_t at = 0;
  for (std::size_t g = 0; g < kNumDebateGroups; ++g) {
    offset_[g] = at;
    at += size_[g];
  }
  total_ = at;
}

std::vector<std::string> DebateLayout::column_names() const {
  std::vector<std::string> names;
  names.reserve(total_);
  for (std::size_t g = 0; g < kNumDebateGroups; ++g) {
    for (std::size_t i = 0; i < size_[g]; ++i) {
      names.push_back(std::string(kDebateGroupNames[g]) + ":" + std::to_string(i));
    }
  }
  return names;
}

std::vector<std::size_t> DebateLayout::context_columns() const {
  std::vector<std::size_t> cols;
  auto add_range = [&](DebateGroup g, std::size_t from, std::size_t to) {
    for (std::size_t i = from; i < to; ++i) cols.push_back(offset(g) + i);
  };
  add_range(DebateGroup::kPosition, 0, 3);
  add_range(DebateGroup::kSegmentSizes, 0, 3);
  add_range(DebateGroup::kMetadata, 0, 8);
  add_range(DebateGroup::kTopics, topic_slots_, topic_slots_ + 3);
  add_range(DebateGroup::kEmbeddings, embedding_slots_, embedding_slots_ + 3);
  add_range(DebateGroup::kContradictions, 1, 5);
  add_range(DebateGroup::kDiscourse, 0, kNumRelations);
  return cols;
}

std::vector<std::size_t> DebateLayout::columns_of(std::string_view name) const {
  if (name == "context") return context_columns();
  auto g = debate_group_from_name(name);
  if (!g) throw ConfigError("unknown feature group '" + std::string(name) + "'");
  std::vector<std::size_t> cols;
  for (std::size_t i = 0; i < size(*g); ++i) cols.push_back(offset(*g) + i);
  return cols;
}

std::vector<std::uint8_t> DebateLayout::mask(std::span<const std::string> ablate,
                                             std::span<const std::string> only) const {
  std::vector<std::uint8_t> keep(total_, only.empty() ? 1 : 0);
  for (const auto& name : only) {
    for (auto c : columns_of(name)) keep[c] = 1;
  }
  for (const auto& name : ablate) {
    for (auto c : columns_of(name)) keep[c] = 0;
  }
  return keep;
}

void apply_mask(FeatureMatrix& m, std::span<const std::uint8_t> mask) {
  if (mask.size() != m.cols()) throw Error("mask width does not match feature matrix");
  for (std::size_t r = 0; r < m.rows(); ++r) {
    auto row = m.row(r);
    for (std::size_t c = 0; c < row.size(); ++c) {
      if (!mask[c]) row[c] = 0.0;
    }
  }
}

std::vector<ReferenceSentence> reference_sentences(const std::vector<Debate>& debates,
                                                   std::size_t label_column) {
  std::vector<ReferenceSentence> refs;
  for (const auto& d : debates) {
    for (std::size_t i = 0; i < d.sentences.size(); ++i) {
      const auto& s = d.sentences[i];
      ReferenceSentence r;
      r.key = d.id + "/" + std::to_string(s.id);
      r.speaker = s.speaker;
      r.check_worthy = i < d.annotations.rows() && d.annotations.labels(i)[label_column] != 0;
      r.words = text::words(s.tokens.empty() ? text::annotate(s.text) : s.tokens);
      refs.push_back(std::move(r));
    }
  }
  return refs;
}

// ---------------------------------------------------------------------------

Tense tense(std::span<const Token> tokens) {
  std::vector<Token> tagged(tokens.begin(), tokens.end());
  text::ensure_pos(tagged);
  bool past = false;
  for (std::size_t i = 0; i < tagged.size(); ++i) {
    const std::string w = text::lower(tagged[i].surface);
    if (w == "will" || (w.size() > 3 && w.ends_with("'ll"))) return Tense::kFuture;
    if (w == "have" && i + 1 < tagged.size() && text::lower(tagged[i + 1].surface) == "to") {
      return Tense::kFuture;
    }
    if (tagged[i].pos == "VBD") past = true;
  }
  return past ? Tense::kPast : Tense::kPresent;
}

std::array<double, 3> position_features(const SentenceContext& ctx) {
  const auto& seg = ctx.current();
  const std::size_t rank = ctx.rank_in_segment();
  return {rank == 1 ? 1.0 : 0.0, rank == seg.size() ? 1.0 : 0.0, 1.0 / static_cast<double>(rank)};
}

std::array<double, 3> segment_size_features(const SentenceContext& ctx) {
  const auto* prev = ctx.previous();
  const auto* next = ctx.next();
  return {prev ? static_cast<double>(prev->size()) : 0.0,
          static_cast<double>(ctx.current().size()),
          next ? static_cast<double>(next->size()) : 0.0};
}

namespace {

bool contains_sequence(const std::vector<std::string>& hay, const std::vector<std::string>& needle) {
  if (needle.empty() || needle.size() > hay.size()) return false;
  for (std::size_t i = 0; i + needle.size() <= hay.size(); ++i) {
    if (std::equal(needle.begin(), needle.end(), hay.begin() + static_cast<std::ptrdiff_t>(i))) {
      return true;
    }
  }
  return false;
}

std::vector<std::string> sentence_words(const Sentence& s) {
  return s.tokens.empty() ? text::words(s.text) : text::words(s.tokens);
}

}  // namespace

bool mentions_opponent(const Debate& debate, const Sentence& s) {
  std::vector<std::string> words = sentence_words(s);
  // Possessives ("Trump's") count as mentions.
  for (auto& w : words) {
    if (w.size() > 2 && w.ends_with("'s")) w.erase(w.size() - 2);
  }
  for (const auto& c : debate.candidates) {
    if (c.speaker == s.speaker) continue;
    for (const auto& name : c.names) {
      if (contains_sequence(words, text::words(name))) return true;
    }
  }
  return false;
}

std::array<double, 8> metadata_features(const SentenceContext& ctx) {
  const Debate& d = *ctx.debate;
  const Sentence& s = ctx.target();
  const bool moderator = s.is_moderator || d.is_moderator(s.speaker);
  std::array<double, 8> out{};
  out[0] = mentions_opponent(d, s) ? 1.0 : 0.0;
  out[1] = moderator ? 1.0 : 0.0;
  if (moderator) {
    out[4] = 1.0;
  } else {
    const int c = d.candidate_index(s.speaker);
    if (c == 0) out[2] = 1.0;
    if (c == 1) out[3] = 1.0;
  }
  out[5] = s.has_event(SystemEvent::kApplause) ? 1.0 : 0.0;
  out[6] = s.has_event(SystemEvent::kLaugh) ? 1.0 : 0.0;
  out[7] = s.has_event(SystemEvent::kCrosstalk) ? 1.0 : 0.0;
  return out;
}

std::array<double, 5> contradiction_features(const SentenceContext& ctx, const LexiconSet& lex) {
  const Debate& d = *ctx.debate;
  auto count_sentence = [&](std::size_t i) {
    return static_cast<double>(lex.negation_count(sentence_words(d.sentences[i])));
  };
  auto count_segment = [&](const Segment* seg) {
    if (!seg) return 0.0;
    double n = 0.0;
    for (std::size_t i = seg->begin; i < seg->end(); ++i) n += count_sentence(i);
    return n;
  };
  const auto& seg = ctx.current();
  std::array<double, 5> out{};
  out[0] = count_sentence(ctx.sentence);
  out[1] = ctx.sentence > seg.begin ? count_sentence(ctx.sentence - 1) : 0.0;
  out[2] = ctx.sentence + 1 < seg.end() ? count_sentence(ctx.sentence + 1) : 0.0;
  out[3] = count_segment(ctx.previous());
  out[4] = count_segment(ctx.next());
  return out;
}

namespace {

double signed_best_overlap(const std::unordered_set<std::string>& target, const std::string& key,
                           const std::string* speaker, std::span<const ReferenceSentence> refs) {
  std::size_t best = 0;
  double value = 0.0;
  for (const auto& r : refs) {
    if (r.key == key && !key.empty()) continue;
    if (speaker && r.speaker != *speaker) continue;
    std::unordered_set<std::string> seen;
    std::size_t ov = 0;
    for (const auto& w : r.words) {
      if (target.count(w) && seen.insert(w).second) ++ov;
    }
    if (ov == 0) continue;
    if (ov > best || (ov == best && r.check_worthy && value < 0)) {
      best = ov;
      value = r.check_worthy ? static_cast<double>(ov) : -static_cast<double>(ov);
    }
  }
  return value;
}

}  // namespace

std::array<double, 3> known_similarity_features(const SentenceContext& ctx,
                                                std::span<const ReferenceSentence> training_refs,
                                                std::span<const ReferenceSentence> external_claims) {
  const Sentence& s = ctx.target();
  const auto words = sentence_words(s);
  const std::unordered_set<std::string> target(words.begin(), words.end());
  const std::string key = ctx.debate->id + "/" + std::to_string(s.id);
  std::array<double, 3> out{};
  out[0] = signed_best_overlap(target, key, nullptr, training_refs);
  out[1] = signed_best_overlap(target, key, &s.speaker, training_refs);
  out[2] = signed_best_overlap(target, key, nullptr, external_claims);
  return out;
}

std::array<double, 2> sentiment_counts(std::span<const std::string> words, const LexiconSet& lex) {
  double pos = 0.0, neg = 0.0;
  for (const auto& w : words) {
    if (lex.sentiment_positive().contains(w)) pos += 1.0;
    if (lex.sentiment_negative().contains(w)) neg += 1.0;
  }
  return {pos, neg};
}

double sentiment_score(std::span<const std::string> words, const LexiconSet& lex) {
  const auto [p, n] = sentiment_counts(words, lex);
  return (p - n) / (p + n + 1.0);
}

double length_chars(std::string_view text) { return static_cast<double>(text::utf8_length(text)); }

double ne_count(std::span<const Token> tokens) {
  return static_cast<double>(text::entity_spans(tokens).size());
}

std::vector<double> claimbuster_features(const Sentence& s, const Vocabulary& vocab,
                                         const LexiconSet& lex) {
  std::vector<Token> tokens = s.tokens.empty() ? text::annotate(s.text) : s.tokens;
  text::ensure_pos(tokens);
  const auto words = text::words(tokens);
  std::vector<double> out = vocab.transform(words);
  const std::size_t pos_at = out.size();
  out.resize(pos_at + kPosTagSet.size() + kEntityTypes.size() + 2, 0.0);
  for (const auto& t : tokens) {
    for (std::size_t p = 0; p < kPosTagSet.size(); ++p) {
      if (t.pos == kPosTagSet[p]) {
        out[pos_at + p] += 1.0;
        break;
      }
    }
  }
  const std::size_t ne_at = pos_at + kPosTagSet.size();
  for (const auto& span : text::entity_spans(tokens)) out[ne_at + entity_type_index(span.type)] += 1.0;
  out[ne_at + kEntityTypes.size()] = sentiment_score(words, lex);
  out[ne_at + kEntityTypes.size() + 1] = static_cast<double>(tokens.size());
  return out;
}

// ---------------------------------------------------------------------------

DebateFeatureExtractor::DebateFeatureExtractor(const Debate& debate, const DebateResources& res,
                                               DebateLayout layout)
    : debate_(debate), res_(res), layout_(layout) {
  if (!res.lexicons) throw ConfigError("debate features need lexicons");
  if (!res.vocabulary) throw ConfigError("debate features need a TF-IDF vocabulary");
  if (res.vocabulary->slots() != layout_.bow_slots()) {
    throw ConfigError("vocabulary has " + std::to_string(res.vocabulary->slots()) +
                      " slots, layout expects " + std::to_string(layout_.bow_slots()));
  }
  if (res.topics && res.topics->topics() > layout_.topic_slots()) {
    throw ConfigError("topic model has more topics than topic slots");
  }
  if (res.vectors && res.vectors->dimension() > layout_.embedding_slots()) {
    throw ConfigError("word vectors are wider than embedding slots");
  }
  segments_ = segment_debate(debate);
  lookup_ = segment_lookup(segments_);
  words_.reserve(debate.sentences.size());
  for (const auto& s : debate.sentences) words_.push_back(sentence_words(s));

  for (const auto& seg : segments_) {
    std::vector<std::string> all;
    for (std::size_t i = seg.begin; i < seg.end(); ++i) {
      all.insert(all.end(), words_[i].begin(), words_[i].end());
    }
    if (res.topics) {
      InferOptions opt = res.topic_inference;
      opt.seed = mix_seed(opt.seed, fnv1a(debate.id + ":" + std::to_string(seg.index_in_debate)));
      segment_topics_.push_back(res.topics->infer(all, opt));
    }
    if (res.vectors) segment_vectors_.push_back(sentence_vector(all, *res.vectors));
  }
}

SentenceContext DebateFeatureExtractor::context(std::size_t sentence) const {
  SentenceContext ctx;
  ctx.debate = &debate_;
  ctx.segments = &segments_;
  ctx.sentence = sentence;
  ctx.segment = lookup_.at(sentence);
  return ctx;
}

std::string DebateFeatureExtractor::row_id(std::size_t sentence) const {
  return debate_.id + "/" + std::to_string(debate_.sentences[sentence].id);
}

std::vector<double> DebateFeatureExtractor::extract(std::size_t sentence) const {
  const SentenceContext ctx = context(sentence);
  const Sentence& s = ctx.target();
  const auto& words = words_[sentence];
  std::vector<double> v(layout_.total(), 0.0);
  auto put = [&](DebateGroup g, std::size_t i, double x) { v[layout_.offset(g) + i] = x; };
  auto put_all = [&](DebateGroup g, std::span<const double> xs) {
    for (std::size_t i = 0; i < xs.size(); ++i) put(g, i, xs[i]);
  };

  put_all(DebateGroup::kPosition, position_features(ctx));
  put_all(DebateGroup::kSegmentSizes, segment_size_features(ctx));
  put_all(DebateGroup::kMetadata, metadata_features(ctx));

  auto context_cosines = [&](DebateGroup g, std::size_t slots, const std::vector<double>& own,
                             const std::vector<std::vector<double>>& per_segment) {
    put_all(g, own);
    const Segment* prev = ctx.previous();
    const Segment* next = ctx.next();
    if (prev) put(g, slots, cosine(own, per_segment[prev->index_in_debate]));
    put(g, slots + 1, cosine(own, per_segment[ctx.segment]));
    if (next) put(g, slots + 2, cosine(own, per_segment[next->index_in_debate]));
  };
  if (res_.topics) {
    InferOptions opt = res_.topic_inference;
    opt.seed = mix_seed(opt.seed, fnv1a(row_id(sentence)));
    context_cosines(DebateGroup::kTopics, layout_.topic_slots(), res_.topics->infer(words, opt),
                    segment_topics_);
  }
  if (res_.vectors) {
    context_cosines(DebateGroup::kEmbeddings, layout_.embedding_slots(),
                    sentence_vector(words, *res_.vectors), segment_vectors_);
  }

  put_all(DebateGroup::kContradictions, contradiction_features(ctx, *res_.lexicons));
  put_all(DebateGroup::kKnownSimilarity,
          known_similarity_features(ctx, res_.training_refs, res_.external_claims));

  if (res_.discourse) {
    const std::string key = debate_.id + ":" + std::to_string(ctx.segment);
    if (auto it = res_.discourse->find(key); it != res_.discourse->end()) {
      put_all(DebateGroup::kDiscourse, discourse_features(it->second, s.id));
    }
  }

  put_all(DebateGroup::kClaimbuster, claimbuster_features(s, *res_.vocabulary, *res_.lexicons));
  put_all(DebateGroup::kSentiment, sentiment_counts(words, *res_.lexicons));
  std::vector<Token> tokens = s.tokens.empty() ? text::annotate(s.text) : s.tokens;
  put(DebateGroup::kNamedEntities, 0, ne_count(tokens));
  put_all(DebateGroup::kLinguistic, res_.lexicons->linguistic_features(words));
  put(DebateGroup::kTense, 0, static_cast<double>(tense(tokens)));
  put(DebateGroup::kLength, 0, length_chars(s.text));
  return v;
}

FeatureMatrix extract_debate_features(const std::vector<Debate>& debates,
                                      const DebateResources& res, const DebateLayout& layout,
                                      kernels::Policy policy) {
  if (!res.vectors) log::warn("no word vectors: embeddings group is zero");
  if (!res.topics) log::warn("no topic model: topics group is zero");
  if (!res.discourse) log::warn("no discourse trees: discourse group is zero");

  std::vector<std::unique_ptr<DebateFeatureExtractor>> extractors;
  std::vector<std::pair<std::size_t, std::size_t>> rows;
  for (std::size_t d = 0; d < debates.size(); ++d) {
    extractors.push_back(std::make_unique<DebateFeatureExtractor>(debates[d], res, layout));
    for (std::size_t i = 0; i < debates[d].sentences.size(); ++i) rows.emplace_back(d, i);
  }
  FeatureMatrix m;
  m.columns = layout.column_names();
  m.ids.resize(rows.size());
  m.values.assign(rows.size() * layout.total(), 0.0);
  kernels::for_each_index(
      rows.size(),
      [&](std::size_t r) {
        const auto [d, i] = rows[r];
        const auto v = extractors[d]->extract(i);
        std::copy(v.begin(), v.end(), m.values.begin() + static_cast<std::ptrdiff_t>(r * layout.total()));
        m.ids[r] = extractors[d]->row_id(i);
      },
      policy);
  return m;
}

}  // namespace fc
