#include "factcheck/corpus.hpp"

#include <algorithm>
#include <fstream>
#include <map>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include "factcheck/error.hpp"
#include <json.hpp>

namespace fc {
namespace {

using json = nlohmann::json;

struct SidecarEntry {
  std::vector<Token> tokens;
};

std::unordered_map<std::string, SidecarEntry> read_sidecar(std::istream& in) {
  std::unordered_map<std::string, SidecarEntry> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    json rec;
    try {
      rec = json::parse(line);
    } catch (const json::parse_error& e) {
      throw ParseError(std::string("sidecar: ") + e.what(), lineno);
    }
    if (!rec.contains("id") || !rec.contains("tokens") || !rec["tokens"].is_array()) {
      throw ParseError("sidecar: record needs 'id' and 'tokens'", lineno);
    }
    SidecarEntry entry;
    const auto& toks = rec["tokens"];
    const json* pos = rec.contains("pos") ? &rec["pos"] : nullptr;
    const json* ne = rec.contains("ne") ? &rec["ne"] : nullptr;
    if ((pos && pos->size() != toks.size()) || (ne && ne->size() != toks.size())) {
      throw SchemaError("sidecar: pos/ne tags must align 1:1 with tokens (line " +
                        std::to_string(lineno) + ")");
    }
    for (std::size_t i = 0; i < toks.size(); ++i) {
      Token t;
      t.surface = toks[i].get<std::string>();
      if (pos) t.pos = (*pos)[i].get<std::string>();
      if (ne) t.ne = (*ne)[i].get<std::string>();
      entry.tokens.push_back(std::move(t));
    }
    const std::string id = rec["id"].is_string() ? rec["id"].get<std::string>()
                                                 : rec["id"].dump();
    out[id] = std::move(entry);
  }
  return out;
}

void write_sidecar_record(std::ostream& out, const std::string& id,
                          const std::vector<Token>& tokens) {
  json rec;
  rec["id"] = id;
  json toks = json::array();
  json pos = json::array();
  json ne = json::array();
  bool any_ne = false;
  for (const auto& t : tokens) {
    toks.push_back(t.surface);
    pos.push_back(t.pos);
    ne.push_back(t.ne);
    any_ne = any_ne || !t.ne.empty();
  }
  rec["tokens"] = std::move(toks);
  rec["pos"] = std::move(pos);
  if (any_ne) rec["ne"] = std::move(ne);
  out << rec.dump() << '\n';
}

std::vector<Token> tokens_for(const std::string& key, const std::string& text,
                              const std::unordered_map<std::string, SidecarEntry>* sidecar) {
  if (sidecar) {
    if (auto it = sidecar->find(key); it != sidecar->end()) {
      auto toks = it->second.tokens;
      text::ensure_pos(toks);
      return toks;
    }
  }
  return text::annotate(text);
}

std::string as_id(const json& v, std::size_t lineno, const char* field) {
  if (v.is_string()) return v.get<std::string>();
  if (v.is_number_integer()) return std::to_string(v.get<long long>());
  throw ParseError(std::string("field '") + field + "' must be a string or integer", lineno);
}

template <class T>
T require(const json& rec, const char* field, std::size_t lineno) {
  if (!rec.contains(field)) throw ParseError(std::string("missing field '") + field + "'", lineno);
  try {
    return rec[field].get<T>();
  } catch (const json::exception&) {
    throw ParseError(std::string("field '") + field + "' has the wrong type", lineno);
  }
}

std::string optional_string(const json& rec, const char* field) {
  if (!rec.contains(field) || rec[field].is_null()) return {};
  return rec[field].get<std::string>();
}

}  // namespace

std::optional<Source> source_from_name(std::string_view name) {
  for (std::size_t i = 0; i < kNumSources; ++i) {
    if (kSourceNames[i] == name) return static_cast<Source>(i);
  }
  return std::nullopt;
}

void AnnotationMatrix::add_row(int sentence_id, const Row& row) {
  ids_.push_back(sentence_id);
  cells_.push_back(row);
}

bool AnnotationMatrix::any(std::size_t row) const {
  return std::any_of(cells_[row].begin(), cells_[row].end(), [](std::uint8_t v) { return v; });
}

int AnnotationMatrix::votes(std::size_t row) const {
  int n = 0;
  for (auto v : cells_[row]) n += v ? 1 : 0;
  return n;
}

std::size_t AnnotationMatrix::count(Source s) const {
  std::size_t n = 0;
  for (std::size_t r = 0; r < rows(); ++r) n += get(r, s) ? 1 : 0;
  return n;
}

std::size_t AnnotationMatrix::any_count() const {
  std::size_t n = 0;
  for (std::size_t r = 0; r < rows(); ++r) n += any(r) ? 1 : 0;
  return n;
}

std::array<std::uint8_t, kNumSources + 1> AnnotationMatrix::labels(std::size_t row) const {
  std::array<std::uint8_t, kNumSources + 1> out{};
  for (std::size_t s = 0; s < kNumSources; ++s) out[s] = cells_[row][s] ? 1 : 0;
  out[kAnyColumn] = any(row) ? 1 : 0;
  return out;
}

bool Debate::is_moderator(std::string_view speaker) const {
  return std::find(moderators.begin(), moderators.end(), speaker) != moderators.end();
}

int Debate::candidate_index(std::string_view speaker) const {
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    if (candidates[i].speaker == speaker) return static_cast<int>(i);
  }
  return -1;
}

std::vector<Segment> segment_debate(const Debate& debate) {
  std::vector<Segment> segments;
  for (std::size_t i = 0; i < debate.sentences.size(); ++i) {
    const auto& s = debate.sentences[i];
    if (segments.empty() || segments.back().speaker != s.speaker) {
      Segment seg;
      seg.speaker = s.speaker;
      seg.begin = i;
      seg.index_in_debate = segments.size();
      segments.push_back(std::move(seg));
    }
    segments.back().sentence_ids.push_back(s.id);
  }
  return segments;
}

std::vector<std::size_t> segment_lookup(const std::vector<Segment>& segments) {
  std::vector<std::size_t> out;
  for (const auto& seg : segments) out.insert(out.end(), seg.size(), seg.index_in_debate);
  return out;
}

std::vector<Debate> parse_debates(std::istream& in, std::istream* sidecar_in,
                                  bool require_annotations) {
  std::unordered_map<std::string, SidecarEntry> sidecar;
  if (sidecar_in) sidecar = read_sidecar(*sidecar_in);

  struct Meta {
    std::vector<std::string> moderators;
    std::vector<Candidate> candidates;
    bool has_moderators = false;
    bool has_candidates = false;
  };
  std::vector<Debate> debates;
  std::unordered_map<std::string, std::size_t> index;
  std::unordered_map<std::string, Meta> metas;
  std::unordered_map<std::string, std::unordered_set<int>> seen_ids;

  auto debate_for = [&](const std::string& id) -> Debate& {
    auto [it, inserted] = index.emplace(id, debates.size());
    if (inserted) {
      debates.emplace_back();
      debates.back().id = id;
    }
    return debates[it->second];
  };

  std::string line;
  std::size_t lineno = 0;
  std::size_t records = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    json rec;
    try {
      rec = json::parse(line);
    } catch (const json::parse_error& e) {
      throw ParseError(std::string("malformed transcript record: ") + e.what(), lineno);
    }
    if (!rec.is_object()) throw ParseError("transcript record must be an object", lineno);
    if (!rec.contains("debate_id")) throw ParseError("missing field 'debate_id'", lineno);
    const std::string debate_id = as_id(rec["debate_id"], lineno, "debate_id");
    ++records;

    if (rec.contains("meta")) {
      Debate& d = debate_for(debate_id);
      (void)d;
      Meta& meta = metas[debate_id];
      const json& m = rec["meta"];
      if (m.contains("moderators")) {
        meta.moderators = m["moderators"].get<std::vector<std::string>>();
        meta.has_moderators = true;
      }
      if (m.contains("candidates")) {
        for (const auto& c : m["candidates"]) {
          Candidate cand;
          cand.speaker = c.at("speaker").get<std::string>();
          if (c.contains("names")) cand.names = c["names"].get<std::vector<std::string>>();
          if (cand.names.empty()) cand.names.push_back(cand.speaker);
          meta.candidates.push_back(std::move(cand));
        }
        meta.has_candidates = true;
      }
      continue;
    }

    Sentence s;
    s.id = require<int>(rec, "sentence_id", lineno);
    s.speaker = require<std::string>(rec, "speaker", lineno);
    s.text = require<std::string>(rec, "text", lineno);
    if (s.text.find_first_not_of(" \t\r\n") == std::string::npos) {
      throw SchemaError("empty sentence text (line " + std::to_string(lineno) + ")");
    }
    if (rec.contains("is_moderator")) s.is_moderator = rec["is_moderator"].get<bool>();
    if (rec.contains("events")) {
      for (const auto& ev : rec["events"]) {
        const std::string name = text::lower(ev.get<std::string>());
        const std::string norm = name == "cross-talk" || name == "cross talk" ? "crosstalk"
                                 : name == "laughter"                         ? "laugh"
                                                                              : name;
        auto it = std::find(kEventNames.begin(), kEventNames.end(), norm);
        if (it == kEventNames.end()) {
          throw SchemaError("unknown system event '" + name + "' (line " +
                            std::to_string(lineno) + ")");
        }
        s.events[static_cast<std::size_t>(it - kEventNames.begin())] = true;
      }
    }
    AnnotationMatrix::Row row{};
    std::array<bool, kNumSources> present{};
    if (!rec.contains("annotations") && !require_annotations) {
      present.fill(true);
    } else if (!rec.contains("annotations") || !rec["annotations"].is_object()) {
      throw ParseError("missing object field 'annotations'", lineno);
    }
    static const json kNone = json::object();
    const json& ann = rec.contains("annotations") ? rec["annotations"] : kNone;
    for (auto& [key, value] : ann.items()) {
      auto src = source_from_name(key);
      if (!src) {
        throw SchemaError("unknown annotation source '" + key + "' (line " +
                          std::to_string(lineno) + ")");
      }
      int v = 0;
      if (value.is_boolean()) {
        v = value.get<bool>() ? 1 : 0;
      } else if (value.is_number_integer()) {
        v = value.get<int>();
      } else {
        throw ParseError("annotation '" + key + "' must be 0 or 1", lineno);
      }
      if (v != 0 && v != 1) throw ParseError("annotation '" + key + "' must be 0 or 1", lineno);
      row[static_cast<std::size_t>(*src)] = static_cast<std::uint8_t>(v);
      present[static_cast<std::size_t>(*src)] = true;
    }
    for (std::size_t k = 0; k < kNumSources; ++k) {
      if (!present[k]) {
        throw SchemaError("missing annotation source '" + std::string(kSourceNames[k]) +
                          "' (line " + std::to_string(lineno) + ")");
      }
    }

    Debate& d = debate_for(debate_id);
    if (!seen_ids[debate_id].insert(s.id).second) {
      throw SchemaError("duplicate sentence id " + std::to_string(s.id) + " in debate '" +
                        debate_id + "' (line " + std::to_string(lineno) + ")");
    }
    s.tokens = tokens_for(debate_id + "/" + std::to_string(s.id), s.text,
                          sidecar_in ? &sidecar : nullptr);
    d.annotations.add_row(s.id, row);
    d.sentences.push_back(std::move(s));
  }
  if (records == 0) throw ParseError("no records");

  for (auto& d : debates) {
    const Meta& meta = metas[d.id];
    if (meta.has_moderators) d.moderators = meta.moderators;
    for (const auto& s : d.sentences) {
      if (s.is_moderator && !d.is_moderator(s.speaker)) d.moderators.push_back(s.speaker);
    }
    if (meta.has_candidates) {
      d.candidates = meta.candidates;
    } else {
      for (const auto& s : d.sentences) {
        if (d.is_moderator(s.speaker) || d.candidate_index(s.speaker) >= 0) continue;
        d.candidates.push_back(Candidate{s.speaker, {s.speaker}});
      }
    }
    for (auto& s : d.sentences) s.is_moderator = s.is_moderator || d.is_moderator(s.speaker);
  }
  return debates;
}

namespace {

std::vector<Debate> open_debates(const std::string& path,
                                 const std::optional<std::string>& sidecar_path, bool annotated) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open transcript file '" + path + "'");
  if (sidecar_path) {
    std::ifstream side(*sidecar_path);
    if (!side) throw Error("cannot open sidecar file '" + *sidecar_path + "'");
    return parse_debates(in, &side, annotated);
  }
  return parse_debates(in, nullptr, annotated);
}

}  // namespace

std::vector<Debate> load_debates(const std::string& path,
                                 const std::optional<std::string>& sidecar_path) {
  return open_debates(path, sidecar_path, true);
}

std::vector<Debate> load_transcript(const std::string& path,
                                    const std::optional<std::string>& sidecar_path) {
  return open_debates(path, sidecar_path, false);
}

void write_debates(std::ostream& out, const std::vector<Debate>& debates, std::ostream* sidecar) {
  for (const auto& d : debates) {
    json meta;
    meta["debate_id"] = d.id;
    meta["meta"]["moderators"] = d.moderators;
    json cands = json::array();
    for (const auto& c : d.candidates) cands.push_back({{"speaker", c.speaker}, {"names", c.names}});
    meta["meta"]["candidates"] = std::move(cands);
    out << meta.dump() << '\n';
    for (std::size_t i = 0; i < d.sentences.size(); ++i) {
      const auto& s = d.sentences[i];
      json rec;
      rec["debate_id"] = d.id;
      rec["sentence_id"] = s.id;
      rec["speaker"] = s.speaker;
      rec["is_moderator"] = s.is_moderator;
      rec["text"] = s.text;
      json events = json::array();
      for (std::size_t e = 0; e < kEventNames.size(); ++e) {
        if (s.events[e]) events.push_back(kEventNames[e]);
      }
      rec["events"] = std::move(events);
      json ann = json::object();
      for (std::size_t k = 0; k < kNumSources; ++k) {
        ann[std::string(kSourceNames[k])] = d.annotations.row(i)[k];
      }
      rec["annotations"] = std::move(ann);
      out << rec.dump() << '\n';
      if (sidecar) write_sidecar_record(*sidecar, d.id + "/" + std::to_string(s.id), s.tokens);
    }
  }
}

void save_debates(const std::string& path, const std::vector<Debate>& debates,
                  const std::optional<std::string>& sidecar_path) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write '" + path + "'");
  if (sidecar_path) {
    std::ofstream side(*sidecar_path);
    if (!side) throw Error("cannot write '" + *sidecar_path + "'");
    write_debates(out, debates, &side);
  } else {
    write_debates(out, debates, nullptr);
  }
}

DebateCounts count_debate(const Debate& debate) {
  DebateCounts c;
  c.sentences = debate.sentences.size();
  c.positives = debate.annotations.any_count();
  for (std::size_t k = 0; k < kNumSources; ++k) {
    c.per_source[k] = debate.annotations.count(static_cast<Source>(k));
  }
  return c;
}

// ---------------------------------------------------------------------------

std::string_view to_string(QuestionClass c) {
  switch (c) {
    case QuestionClass::kFactual: return "Factual";
    case QuestionClass::kOpinion: return "Opinion";
    case QuestionClass::kSocializing: return "Socializing";
    default: return "None";
  }
}

std::string_view to_string(Goodness g) {
  switch (g) {
    case Goodness::kGood: return "Good";
    case Goodness::kPotentiallyUseful: return "PotentiallyUseful";
    case Goodness::kBad: return "Bad";
    default: return "None";
  }
}

std::string_view to_string(Factuality f) {
  switch (f) {
    case Factuality::kPositive: return "Positive";
    case Factuality::kNegative: return "Negative";
    default: return "None";
  }
}

std::string_view to_string(FineLabel l) {
  if (l == FineLabel::kNone) return "None";
  return kFineLabelNames[static_cast<std::size_t>(l) - 1];
}

Factuality coarse_of(FineLabel l) {
  if (l == FineLabel::kNone) return Factuality::kNone;
  return l == FineLabel::kTrue ? Factuality::kPositive : Factuality::kNegative;
}

std::string Question::text() const {
  if (subject.empty()) return body;
  if (body.empty()) return subject;
  return subject + "\n" + body;
}

namespace {

QuestionClass parse_question_class(const std::string& s, std::size_t lineno) {
  const std::string l = text::lower(s);
  if (l.empty() || l == "none") return QuestionClass::kNone;
  if (l == "factual") return QuestionClass::kFactual;
  if (l == "opinion") return QuestionClass::kOpinion;
  if (l == "socializing") return QuestionClass::kSocializing;
  throw SchemaError("unknown question class '" + s + "' (line " + std::to_string(lineno) + ")");
}

Goodness parse_goodness(const std::string& s, std::size_t lineno) {
  const std::string l = text::lower(s);
  if (l.empty() || l == "none") return Goodness::kNone;
  if (l == "good") return Goodness::kGood;
  if (l == "potentiallyuseful" || l == "potentially useful") return Goodness::kPotentiallyUseful;
  if (l == "bad") return Goodness::kBad;
  throw SchemaError("unknown goodness label '" + s + "' (line " + std::to_string(lineno) + ")");
}

Factuality parse_factuality(const std::string& s, std::size_t lineno) {
  const std::string l = text::lower(s);
  if (l.empty() || l == "none") return Factuality::kNone;
  if (l == "positive") return Factuality::kPositive;
  if (l == "negative") return Factuality::kNegative;
  throw SchemaError("unknown factuality label '" + s + "' (line " + std::to_string(lineno) + ")");
}

FineLabel parse_fine(const std::string& s, std::size_t lineno) {
  if (s.empty() || s == "None") return FineLabel::kNone;
  for (std::size_t i = 0; i < kFineLabelNames.size(); ++i) {
    if (kFineLabelNames[i] == s) return static_cast<FineLabel>(i + 1);
  }
  throw SchemaError("fine-grained label '" + s + "' is not in the label inventory (line " +
                    std::to_string(lineno) + ")");
}

}  // namespace

std::vector<CqaThread> parse_cqa(std::istream& in, std::istream* sidecar_in) {
  std::unordered_map<std::string, SidecarEntry> sidecar;
  if (sidecar_in) sidecar = read_sidecar(*sidecar_in);
  const auto* side = sidecar_in ? &sidecar : nullptr;

  std::vector<CqaThread> threads;
  std::string line;
  std::size_t lineno = 0;
  std::size_t records = 0;
  std::unordered_set<std::string> question_ids;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    json rec;
    try {
      rec = json::parse(line);
    } catch (const json::parse_error& e) {
      throw ParseError(std::string("malformed thread record: ") + e.what(), lineno);
    }
    ++records;
    if (!rec.contains("question") || !rec["question"].is_object()) {
      throw ParseError("missing object field 'question'", lineno);
    }
    const json& q = rec["question"];
    CqaThread t;
    t.question.id = as_id(q.contains("id") ? q["id"] : json(), lineno, "question.id");
    if (!question_ids.insert(t.question.id).second) {
      throw SchemaError("duplicate question id '" + t.question.id + "' (line " +
                        std::to_string(lineno) + ")");
    }
    t.question.subject = optional_string(q, "subject");
    t.question.body = optional_string(q, "body");
    t.question.category = optional_string(q, "category");
    t.question.datetime = optional_string(q, "datetime");
    t.question.user = optional_string(q, "user");
    t.question.question_class = parse_question_class(optional_string(q, "class"), lineno);
    if (q.contains("excluded")) t.question.excluded = q["excluded"].get<bool>();
    t.question.tokens = tokens_for(t.question.id, t.question.text(), side);

    if (rec.contains("answers")) {
      if (!rec["answers"].is_array()) throw ParseError("'answers' must be an array", lineno);
      for (const auto& a : rec["answers"]) {
        Answer ans;
        ans.id = as_id(a.contains("id") ? a["id"] : json(), lineno, "answer.id");
        ans.text = require<std::string>(a, "text", lineno);
        ans.user = optional_string(a, "user");
        ans.goodness = parse_goodness(optional_string(a, "goodness"), lineno);
        ans.factuality = parse_factuality(optional_string(a, "factuality"), lineno);
        ans.fine = parse_fine(optional_string(a, "fine"), lineno);
        if (ans.fine != FineLabel::kNone) {
          const Factuality implied = coarse_of(ans.fine);
          if (ans.factuality == Factuality::kNone) {
            ans.factuality = implied;
          } else if (ans.factuality != implied) {
            throw SchemaError("answer '" + ans.id + "': fine label '" +
                              std::string(to_string(ans.fine)) + "' contradicts '" +
                              std::string(to_string(ans.factuality)) + "' (line " +
                              std::to_string(lineno) + ")");
          }
        }
        if (ans.factuality != Factuality::kNone && ans.goodness != Goodness::kGood) {
          throw SchemaError("answer '" + ans.id +
                            "': factuality labels are only allowed on Good answers (line " +
                            std::to_string(lineno) + ")");
        }
        ans.tokens = tokens_for(ans.id, ans.text, side);
        t.answers.push_back(std::move(ans));
      }
    }
    threads.push_back(std::move(t));
  }
  if (records == 0) throw ParseError("no records");
  return threads;
}

std::vector<CqaThread> load_cqa(const std::string& path,
                                const std::optional<std::string>& sidecar_path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open thread file '" + path + "'");
  if (sidecar_path) {
    std::ifstream side(*sidecar_path);
    if (!side) throw Error("cannot open sidecar file '" + *sidecar_path + "'");
    return parse_cqa(in, &side);
  }
  return parse_cqa(in, nullptr);
}

void write_cqa(std::ostream& out, const std::vector<CqaThread>& threads) {
  for (const auto& t : threads) {
    json rec;
    const auto& q = t.question;
    rec["question"] = {{"id", q.id},           {"subject", q.subject}, {"body", q.body},
                       {"category", q.category}, {"datetime", q.datetime}, {"user", q.user},
                       {"class", std::string(to_string(q.question_class))},
                       {"excluded", q.excluded}};
    json answers = json::array();
    for (const auto& a : t.answers) {
      json ja = {{"id", a.id},
                 {"text", a.text},
                 {"user", a.user},
                 {"goodness", std::string(to_string(a.goodness))}};
      ja["factuality"] = a.factuality == Factuality::kNone
                             ? json(nullptr)
                             : json(std::string(to_string(a.factuality)));
      ja["fine"] = a.fine == FineLabel::kNone ? json(nullptr) : json(std::string(to_string(a.fine)));
      answers.push_back(std::move(ja));
    }
    rec["answers"] = std::move(answers);
    out << rec.dump() << '\n';
  }
}

void save_cqa(const std::string& path, const std::vector<CqaThread>& threads) {
  std::ofstream out(path);
  if (!out) throw Error("cannot write '" + path + "'");
  write_cqa(out, threads);
}

CqaCounts count_cqa(const std::vector<CqaThread>& threads) {
  CqaCounts c;
  for (const auto& t : threads) {
    if (t.question.excluded) {
      ++c.excluded;
      continue;
    }
    switch (t.question.question_class) {
      case QuestionClass::kFactual: ++c.factual; break;
      case QuestionClass::kOpinion: ++c.opinion; break;
      case QuestionClass::kSocializing: ++c.socializing; break;
      default: break;
    }
    bool labelled = false;
    for (const auto& a : t.answers) {
      if (a.factuality == Factuality::kPositive) ++c.positive;
      if (a.factuality == Factuality::kNegative) ++c.negative;
      labelled = labelled || a.factuality != Factuality::kNone;
    }
    if (labelled) ++c.labelled_threads;
  }
  return c;
}

}  // namespace fc
