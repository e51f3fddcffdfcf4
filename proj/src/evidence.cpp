#include "factcheck/evidence.hpp"

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <thread>
#include <unordered_set>

#include <httplib.h>
#include <json.hpp>

#include "factcheck/log.hpp"
#include "factcheck/rng.hpp"

namespace fc {

using nlohmann::json;

namespace {

bool content_tag(std::string_view pos) {
  return pos.starts_with("NN") || pos.starts_with("VB") || pos.starts_with("JJ");
}

std::string strip_possessive(std::string w) {
  if (w.size() > 2 && (w.ends_with("'s") || w.ends_with("’s"))) {
    w.erase(w.size() - (w.ends_with("'s") ? 2 : 4));
  }
  return w;
}

bool host_matches(std::string_view host, std::string_view domain) {
  if (host == domain) return true;
  return host.size() > domain.size() && host.ends_with(domain) &&
         host[host.size() - domain.size() - 1] == '.';
}

std::string join_words(std::span<const std::string> words) {
  std::string out;
  for (const auto& w : words) {
    if (!out.empty()) out += ' ';
    out += w;
  }
  return out;
}

}  // namespace

// ---------------------------------------------------------------------------

bool Query::drop_lowest() {
  if (terms.size() <= entity_terms) return false;
  terms.pop_back();
  if (!weights.empty()) weights.pop_back();
  return true;
}

std::string Query::normalized() const {
  std::string out;
  for (const auto& t : terms) {
    if (!out.empty()) out += ' ';
    out += text::lower(t);
  }
  return out;
}

std::string Query::render() const {
  std::string out;
  for (std::size_t i = 0; i < terms.size(); ++i) {
    if (i) out += ' ';
    if (i < entity_terms) {
      out += '"' + terms[i] + '"';
    } else {
      out += terms[i];
    }
  }
  return out;
}

Query build_query(std::span<const Token> question, std::span<const Token> answer,
                  const IdfTable& idf, std::span<const std::string> named_entities,
                  const QueryOptions& opt) {
  std::vector<Token> all(question.begin(), question.end());
  all.insert(all.end(), answer.begin(), answer.end());
  text::ensure_pos(all);

  Query q;
  std::unordered_set<std::string> seen_entities;
  for (const auto& ne : named_entities) {
    if (q.terms.size() >= opt.max_terms) break;
    if (ne.empty() || !seen_entities.insert(text::lower(ne)).second) continue;
    q.terms.push_back(ne);
  }
  q.entity_terms = q.terms.size();

  // Term frequencies over Q+A, keyed by lowercase form; first surface form kept.
  struct Cand {
    std::string surface;
    std::size_t tf = 0;
    std::size_t first = 0;
  };
  std::vector<Cand> cands;
  std::unordered_map<std::string, std::size_t> index;
  for (std::size_t i = 0; i < all.size(); ++i) {
    if (!text::is_word(all[i].surface) || !content_tag(all[i].pos)) continue;
    std::string surface = strip_possessive(all[i].surface);
    std::string key = text::lower(surface);
    if (seen_entities.count(key)) continue;
    auto [it, inserted] = index.emplace(key, cands.size());
    if (inserted) cands.push_back({surface, 0, i});
    ++cands[it->second].tf;
  }
  if (cands.empty() && q.terms.empty()) throw Error("unqueryable");

  std::vector<double> score(cands.size());
  for (std::size_t c = 0; c < cands.size(); ++c) {
    score[c] = static_cast<double>(cands[c].tf) * idf.idf(text::lower(cands[c].surface));
  }
  std::vector<std::size_t> order(cands.size());
  for (std::size_t c = 0; c < order.size(); ++c) order[c] = c;
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return score[a] > score[b]; });
  for (std::size_t c : order) {
    if (q.terms.size() >= opt.max_terms) break;
    q.terms.push_back(cands[c].surface);
    q.weights.push_back(score[c]);
  }
  q.short_query = q.terms.size() < opt.min_terms;
  return q;
}

// ---------------------------------------------------------------------------

std::string_view to_string(SourceType t) {
  switch (t) {
    case SourceType::kReputed:
      return "Reputed";
    case SourceType::kForum:
      return "Forum";
    case SourceType::kOther:
      return "Other";
  }
  return "Other";
}

std::string host_of(std::string_view url) {
  if (auto p = url.find("://"); p != std::string_view::npos) url.remove_prefix(p + 3);
  if (auto p = url.find_first_of("/?#"); p != std::string_view::npos) url = url.substr(0, p);
  if (auto p = url.find('@'); p != std::string_view::npos) url.remove_prefix(p + 1);
  if (auto p = url.rfind(':'); p != std::string_view::npos) url = url.substr(0, p);
  std::string host = text::lower(url);
  if (host.starts_with("www.")) host.erase(0, 4);
  return host;
}

SourceClassifier SourceClassifier::defaults() {
  SourceClassifier c;
  for (const char* d :
       {"dohanews.co", "gulf-times.com", "thepeninsulaqatar.com", "qatar-tribune.com",
        "aljazeera.com", "aljazeera.net", "bbc.co.uk", "bbc.com", "cnn.com", "reuters.com",
        "nytimes.com", "theguardian.com", "gov.qa", "hukoomi.qa", "moi.gov.qa", "qatarairways.com",
        "qatarliving.com/news", "wikipedia.org", "britannica.com", "gov.uk", "state.gov"}) {
    c.add_reputed(d);
  }
  for (const char* d : {"qatarliving.com", "iloveqatar.net", "expatwoman.com", "tripadvisor.com",
                        "reddit.com", "quora.com", "facebook.com", "twitter.com",
                        "stackexchange.com", "internations.org", "yahoo.com"}) {
    c.add_forum(d);
  }
  for (const char* p : {"qatar", "doha", ".qa"}) c.add_region_domain(p);
  return c;
}

SourceClassifier SourceClassifier::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open source list '" + path + "'");
  SourceClassifier c;
  std::string line;
  std::size_t n = 0;
  while (std::getline(in, line)) {
    ++n;
    if (auto h = line.find('#'); h != std::string::npos) line.erase(h);
    std::istringstream ss(line);
    std::string kind, value;
    if (!(ss >> kind)) continue;
    if (!(ss >> value)) throw ParseError("source list entry without value", n);
    value = text::lower(value);
    if (kind == "reputed") {
      c.add_reputed(value);
    } else if (kind == "forum") {
      c.add_forum(value);
    } else if (kind == "region-domain") {
      c.add_region_domain(value);
    } else if (kind == "region-text") {
      c.add_region_text(value);
    } else {
      throw ParseError("unknown source list kind '" + kind + "'", n);
    }
  }
  return c;
}

SourceType SourceClassifier::classify(std::string_view url) const {
  const std::string host = host_of(url);
  // Entries with a path ("site.com/news") match on host + path prefix.
  std::string full = text::lower(url);
  if (auto p = full.find("://"); p != std::string::npos) full.erase(0, p + 3);
  if (full.starts_with("www.")) full.erase(0, 4);
  auto matches = [&](const std::string& d) {
    if (d.find('/') != std::string::npos) return full.starts_with(d);
    return host_matches(host, d);
  };
  for (int pass = 0; pass < 2; ++pass) {
    const bool want_path = pass == 0;
    for (const auto& d : reputed_) {
      if ((d.find('/') != std::string::npos) == want_path && matches(d)) return SourceType::kReputed;
    }
    for (const auto& d : forum_) {
      if ((d.find('/') != std::string::npos) == want_path && matches(d)) return SourceType::kForum;
    }
  }
  return SourceType::kOther;
}

bool SourceClassifier::region_related(std::string_view url, std::string_view text) const {
  const std::string host = host_of(url);
  for (const auto& p : region_domain_) {
    if (host.find(p) != std::string::npos) return true;
    if (p.front() == '.' && host.ends_with(p)) return true;
  }
  if (!region_text_.empty()) {
    const std::string low = text::lower(text);
    for (const auto& p : region_text_) {
      if (low.find(p) != std::string::npos) return true;
    }
  }
  return false;
}

// ---------------------------------------------------------------------------

std::string strip_tags(std::string_view html) {
  std::string out;
  out.reserve(html.size());
  std::size_t i = 0;
  const std::string low = text::lower(html);
  while (i < html.size()) {
    if (html[i] == '<') {
      for (const char* block : {"script", "style"}) {
        const std::string open = std::string("<") + block;
        if (low.compare(i, open.size(), open) == 0) {
          const std::string close = std::string("</") + block;
          auto end = low.find(close, i);
          i = end == std::string::npos ? html.size() : end;
          break;
        }
      }
      auto gt = html.find('>', i);
      if (gt == std::string_view::npos) break;
      i = gt + 1;
      out += ' ';
      continue;
    }
    out += html[i++];
  }
  std::string collapsed;
  bool space = true;
  for (char c : out) {
    if (std::isspace(static_cast<unsigned char>(c)) && c != '\n') {
      if (!space) collapsed += ' ';
      space = true;
    } else {
      collapsed += c;
      space = c == '\n';
    }
  }
  while (!collapsed.empty() && collapsed.back() == ' ') collapsed.pop_back();
  return collapsed;
}

HttpSearchClient::HttpSearchClient(std::string host, int port, std::string path,
                                   std::string api_key_env)
    : host_(std::move(host)), port_(port), path_(std::move(path)),
      api_key_env_(std::move(api_key_env)) {}

std::vector<SearchHit> HttpSearchClient::search(std::string_view engine, const Query& query) {
  httplib::Client cli(host_, port_);
  cli.set_connection_timeout(10, 0);
  cli.set_read_timeout(30, 0);
  httplib::Headers headers;
  if (const char* key = std::getenv(api_key_env_.c_str()); key && *key) {
    headers.emplace("Authorization", std::string("Bearer ") + key);
  }
  httplib::Params params{{"engine", std::string(engine)}, {"q", query.render()}};
  auto res = cli.Get(path_, params, headers);
  if (!res) {
    throw TransportError("search request failed: " + httplib::to_string(res.error()));
  }
  if (res->status >= 500 || res->status == 429) {
    throw TransportError("search server returned " + std::to_string(res->status));
  }
  if (res->status != 200) {
    throw Error("search server returned " + std::to_string(res->status));
  }
  json body;
  try {
    body = json::parse(res->body);
  } catch (const json::exception& e) {
    throw ParseError(std::string("bad search response: ") + e.what());
  }
  std::vector<SearchHit> hits;
  if (!body.contains("results") || !body["results"].is_array()) {
    throw SchemaError("search response has no results array");
  }
  for (const auto& r : body["results"]) {
    SearchHit h;
    h.url = r.value("url", "");
    h.snippet = r.value("snippet", "");
    h.page_text = r.value("page_text", "");
    hits.push_back(std::move(h));
  }
  return hits;
}

// ---------------------------------------------------------------------------

EvidenceCache::EvidenceCache(std::string dir) : dir_(std::move(dir)) {}

std::string EvidenceCache::key(std::string_view engine, const Query& query) {
  std::string material(engine);
  material += '\n';
  material += query.normalized();
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(fnv1a(material)));
  return buf;
}

std::string EvidenceCache::path_for(std::string_view engine, const Query& query) const {
  std::string safe;
  for (char c : engine) safe += std::isalnum(static_cast<unsigned char>(c)) ? c : '_';
  return dir_ + "/" + safe + "-" + key(engine, query) + ".json";
}

namespace {

json to_json(const EvidenceResult& r) {
  return json{{"url", r.url},
              {"source_type", std::string(to_string(r.source_type))},
              {"qatar_related", r.qatar_related},
              {"snippet", r.snippet},
              {"page_text", r.page_text},
              {"engine", r.engine}};
}

SourceType source_type_from(const std::string& s) {
  if (s == "Reputed") return SourceType::kReputed;
  if (s == "Forum") return SourceType::kForum;
  if (s == "Other") return SourceType::kOther;
  throw SchemaError("unknown source type '" + s + "'");
}

}  // namespace

std::optional<std::vector<EvidenceResult>> EvidenceCache::load(std::string_view engine,
                                                               const Query& query) const {
  const std::string path = path_for(engine, query);
  std::ifstream in(path);
  if (!in) return std::nullopt;
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::exception& e) {
    throw ParseError("corrupt evidence cache file '" + path + "': " + e.what());
  }
  if (doc.value("schema", 0) != kSchemaVersion) {
    throw SchemaError("evidence cache '" + path + "' has unsupported schema");
  }
  if (doc.value("query", "") != query.normalized() || doc.value("engine", "") != engine) {
    return std::nullopt;
  }
  std::vector<EvidenceResult> out;
  for (const auto& r : doc.at("results")) {
    EvidenceResult e;
    e.url = r.at("url").get<std::string>();
    e.source_type = source_type_from(r.at("source_type").get<std::string>());
    e.qatar_related = r.at("qatar_related").get<bool>();
    e.snippet = r.at("snippet").get<std::string>();
    e.page_text = r.value("page_text", "");
    e.engine = r.value("engine", std::string(engine));
    out.push_back(std::move(e));
  }
  return out;
}

void EvidenceCache::store(std::string_view engine, const Query& query,
                          const std::vector<EvidenceResult>& results) const {
  namespace fs = std::filesystem;
  fs::create_directories(dir_);
  json doc{{"schema", kSchemaVersion},
           {"engine", std::string(engine)},
           {"query", query.normalized()},
           {"results", json::array()}};
  for (const auto& r : results) doc["results"].push_back(to_json(r));

  const std::string path = path_for(engine, query);
  const auto tid = std::hash<std::thread::id>{}(std::this_thread::get_id());
  const std::string tmp = path + ".tmp." + std::to_string(tid);
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot write '" + tmp + "'");
    out << doc.dump(1) << '\n';
    if (!out) throw Error("short write to '" + tmp + "'");
  }
  std::error_code ec;
  fs::rename(tmp, path, ec);
  if (ec) {
    fs::remove(tmp);
    throw Error("cannot move cache file into place: " + ec.message());
  }
}

std::vector<EvidenceResult> fetch(const Query& query, std::string_view engine,
                                  const EvidenceCache& cache, FetchMode mode,
                                  SearchClient* client, const SourceClassifier& classifier) {
  if (auto hit = cache.load(engine, query)) return *hit;
  if (mode == FetchMode::kOffline) {
    throw NoCachedEvidence("no cached evidence for " + std::string(engine) + " query '" +
                           query.normalized() + "'");
  }
  if (!client) throw ConfigError("live fetch needs a search client");
  std::vector<EvidenceResult> results;
  for (auto& h : client->search(engine, query)) {
    if (h.snippet.empty()) continue;
    EvidenceResult r;
    r.url = std::move(h.url);
    r.snippet = std::move(h.snippet);
    r.page_text = strip_tags(h.page_text);
    r.engine = std::string(engine);
    r.source_type = classifier.classify(r.url);
    r.qatar_related = classifier.region_related(r.url, r.snippet + "\n" + r.page_text);
    results.push_back(std::move(r));
  }
  cache.store(engine, query, results);
  return results;
}

std::vector<EvidenceResult> fetch_with_retry(Query query, std::string_view engine,
                                             const EvidenceCache& cache, FetchMode mode,
                                             SearchClient* client,
                                             const SourceClassifier& classifier,
                                             std::size_t wanted, std::size_t min_terms) {
  auto results = fetch(query, engine, cache, mode, client, classifier);
  while (results.size() < wanted && query.terms.size() > min_terms && query.drop_lowest()) {
    results = fetch(query, engine, cache, mode, client, classifier);
  }
  return results;
}

// ---------------------------------------------------------------------------

double containment(std::span<const std::string> a, std::span<const std::string> b) {
  std::unordered_set<std::string> sa(a.begin(), a.end());
  if (sa.empty()) return 0.0;
  std::unordered_set<std::string> sb(b.begin(), b.end());
  std::size_t shared = 0;
  for (const auto& w : sa) shared += sb.count(w);
  return static_cast<double>(shared) / static_cast<double>(sa.size());
}

std::vector<std::string> rolling_triplets(std::string_view page_text) {
  std::vector<std::string> sentences;
  for (auto& s : text::split_sentences(page_text)) {
    if (!text::words(s).empty()) sentences.push_back(std::move(s));
  }
  std::vector<std::string> out;
  if (sentences.empty()) return out;
  if (sentences.size() < 3) {
    out.push_back(join_words(sentences));
    return out;
  }
  for (std::size_t i = 0; i + 3 <= sentences.size(); ++i) {
    out.push_back(sentences[i] + " " + sentences[i + 1] + " " + sentences[i + 2]);
  }
  return out;
}

std::size_t SimilarityBundle::index(Side s, Granularity g, Measure m, Aggregate a,
                                    ResultFilter f) {
  std::size_t i = static_cast<std::size_t>(s);
  i = i * kGranularities + static_cast<std::size_t>(g);
  i = i * kMeasures + static_cast<std::size_t>(m);
  i = i * kAggregates + static_cast<std::size_t>(a);
  i = i * kFilters + static_cast<std::size_t>(f);
  return i;
}

namespace {

constexpr std::array<std::string_view, 3> kSideNames = {"question", "answer", "qa"};
constexpr std::array<std::string_view, 2> kGranNames = {"snippet", "page"};
constexpr std::array<std::string_view, 3> kMeasureNames = {"tfidf", "embedding", "containment"};
constexpr std::array<std::string_view, 2> kAggNames = {"max", "avg"};
constexpr std::array<std::string_view, 4> kFilterNames = {"all", "reputed", "forum", "other"};

std::array<std::size_t, 5> decompose(std::size_t index) {
  std::array<std::size_t, 5> c{};
  c[4] = index % SimilarityBundle::kFilters;
  index /= SimilarityBundle::kFilters;
  c[3] = index % SimilarityBundle::kAggregates;
  index /= SimilarityBundle::kAggregates;
  c[2] = index % SimilarityBundle::kMeasures;
  index /= SimilarityBundle::kMeasures;
  c[1] = index % SimilarityBundle::kGranularities;
  c[0] = index / SimilarityBundle::kGranularities;
  return c;
}

struct SideText {
  std::vector<std::string> words;
  std::vector<double> vec;
};

SideText side_text(std::string_view s, const SimilarityResources& res) {
  SideText t;
  t.words = text::words(s);
  if (res.vectors) t.vec = sentence_vector(t.words, *res.vectors);
  return t;
}

std::array<double, 3> measures(const SideText& side, std::string_view other,
                               const SimilarityResources& res, const IdfTable& idf) {
  const auto words = text::words(other);
  std::array<double, 3> m{};
  m[0] = tfidf_cosine(side.words, words, idf);
  if (res.vectors) m[1] = cosine(side.vec, sentence_vector(words, *res.vectors));
  m[2] = containment(side.words, words);
  return m;
}

bool passes(ResultFilter f, SourceType t) {
  switch (f) {
    case ResultFilter::kAll:
      return true;
    case ResultFilter::kReputed:
      return t == SourceType::kReputed;
    case ResultFilter::kForum:
      return t == SourceType::kForum;
    case ResultFilter::kOther:
      return t == SourceType::kOther;
  }
  return false;
}

}  // namespace

std::string SimilarityBundle::cell_name(std::size_t index) {
  const auto c = decompose(index);
  std::string out(kSideNames[c[0]]);
  for (auto part : {kGranNames[c[1]], kMeasureNames[c[2]], kAggNames[c[3]], kFilterNames[c[4]]}) {
    out += '/';
    out += part;
  }
  return out;
}

SimilarityBundle similarity_bundle(std::string_view question, std::string_view answer,
                                   std::span<const EvidenceResult> results,
                                   const SimilarityResources& res) {
  static const IdfTable kUniform;
  const IdfTable& idf = res.idf ? *res.idf : kUniform;
  const std::string qa = std::string(question) + " " + std::string(answer);
  const std::array<SideText, 3> sides = {side_text(question, res), side_text(answer, res),
                                         side_text(qa, res)};

  // Per result, per side, per measure: snippet score, page max, page mean.
  struct Scores {
    std::array<std::array<double, 3>, 3> snippet{};
    std::array<std::array<double, 3>, 3> page_max{};
    std::array<std::array<double, 3>, 3> page_avg{};
    bool has_page = false;
  };
  std::vector<const EvidenceResult*> used;
  std::vector<Scores> scores;
  for (const auto& r : results) {
    if (!r.qatar_related) continue;
    Scores sc;
    const auto triplets = rolling_triplets(r.page_text);
    sc.has_page = !triplets.empty();
    for (std::size_t s = 0; s < 3; ++s) {
      sc.snippet[s] = measures(sides[s], r.snippet, res, idf);
      if (!sc.has_page) continue;
      std::array<double, 3> mx, sum{};
      mx.fill(-2.0);
      for (const auto& t : triplets) {
        const auto m = measures(sides[s], t, res, idf);
        for (std::size_t k = 0; k < 3; ++k) {
          mx[k] = std::max(mx[k], m[k]);
          sum[k] += m[k];
        }
      }
      for (std::size_t k = 0; k < 3; ++k) {
        sc.page_max[s][k] = mx[k];
        sc.page_avg[s][k] = sum[k] / static_cast<double>(triplets.size());
      }
    }
    used.push_back(&r);
    scores.push_back(sc);
  }

  SimilarityBundle b;
  for (std::size_t f = 0; f < SimilarityBundle::kFilters; ++f) {
    const auto filter = static_cast<ResultFilter>(f);
    for (std::size_t g = 0; g < 2; ++g) {
      for (std::size_t s = 0; s < 3; ++s) {
        for (std::size_t m = 0; m < 3; ++m) {
          double mx = 0.0, sum = 0.0;
          std::size_t n = 0;
          for (std::size_t i = 0; i < used.size(); ++i) {
            if (!passes(filter, used[i]->source_type)) continue;
            const Scores& sc = scores[i];
            double vmax, vavg;
            if (g == 0) {
              vmax = vavg = sc.snippet[s][m];
            } else {
              if (!sc.has_page) continue;
              vmax = sc.page_max[s][m];
              vavg = sc.page_avg[s][m];
            }
            mx = n == 0 ? vmax : std::max(mx, vmax);
            sum += vavg;
            ++n;
          }
          const auto side = static_cast<Side>(s);
          const auto gran = static_cast<Granularity>(g);
          const auto meas = static_cast<Measure>(m);
          b.at(side, gran, meas, Aggregate::kMax, filter) = mx;
          b.at(side, gran, meas, Aggregate::kAvg, filter) = n ? sum / static_cast<double>(n) : 0.0;
        }
      }
    }
  }
  return b;
}

BundleSelection BundleSelection::full() {
  BundleSelection s;
  for (std::size_t i = 0; i < SimilarityBundle::kCells; ++i) s.cells_.push_back(i);
  return s;
}

BundleSelection BundleSelection::source_copies() {
  BundleSelection s;
  for (std::size_t i = 0; i < SimilarityBundle::kCells; ++i) {
    if (decompose(i)[4] != 0) s.cells_.push_back(i);
  }
  return s;
}

BundleSelection BundleSelection::unfiltered() {
  BundleSelection s;
  for (std::size_t i = 0; i < SimilarityBundle::kCells; ++i) {
    if (decompose(i)[4] == 0) s.cells_.push_back(i);
  }
  return s;
}

BundleSelection BundleSelection::by_name(std::string_view name) {
  if (name == "full") return full();
  if (name == "source_copies") return source_copies();
  if (name == "unfiltered") return unfiltered();
  // Otherwise a comma-separated list of side/granularity/measure/aggregate/filter
  // patterns where any field may be '*'.
  std::vector<std::array<std::string, 5>> patterns;
  std::size_t start = 0;
  while (start <= name.size()) {
    auto end = name.find(',', start);
    if (end == std::string_view::npos) end = name.size();
    std::string_view item = name.substr(start, end - start);
    while (!item.empty() && item.front() == ' ') item.remove_prefix(1);
    while (!item.empty() && item.back() == ' ') item.remove_suffix(1);
    if (!item.empty()) {
      std::array<std::string, 5> p;
      std::size_t field = 0, s = 0;
      for (std::size_t i = 0; i <= item.size(); ++i) {
        if (i == item.size() || item[i] == '/') {
          if (field >= 5) throw ConfigError("bad bundle pattern '" + std::string(item) + "'");
          p[field++] = std::string(item.substr(s, i - s));
          s = i + 1;
        }
      }
      if (field != 5) throw ConfigError("bad bundle pattern '" + std::string(item) + "'");
      patterns.push_back(p);
    }
    start = end + 1;
  }
  if (patterns.empty()) throw ConfigError("empty bundle selection");
  BundleSelection sel;
  for (std::size_t i = 0; i < SimilarityBundle::kCells; ++i) {
    const auto c = decompose(i);
    const std::array<std::string_view, 5> names = {kSideNames[c[0]], kGranNames[c[1]],
                                                   kMeasureNames[c[2]], kAggNames[c[3]],
                                                   kFilterNames[c[4]]};
    for (const auto& p : patterns) {
      bool ok = true;
      for (std::size_t k = 0; k < 5 && ok; ++k) ok = p[k] == "*" || p[k] == names[k];
      if (ok) {
        sel.cells_.push_back(i);
        break;
      }
    }
  }
  if (sel.cells_.empty()) throw ConfigError("bundle selection '" + std::string(name) + "' is empty");
  return sel;
}

std::vector<double> BundleSelection::apply(const SimilarityBundle& b) const {
  std::vector<double> out;
  out.reserve(cells_.size());
  for (auto i : cells_) out.push_back(b.cells()[i]);
  return out;
}

double entailment_proxy(std::span<const std::string> answer_words,
                        std::span<const std::string> sentence_words, const VectorStore* vectors) {
  double emb = 0.0;
  if (vectors) {
    emb = cosine(sentence_vector(answer_words, *vectors), sentence_vector(sentence_words, *vectors));
  }
  return 0.5 * containment(answer_words, sentence_words) + 0.5 * emb;
}

BestEvidence best_evidence(std::string_view side_text, std::span<const EvidenceResult> results,
                           std::string_view engine, const IdfTable& idf) {
  const auto side = text::words(side_text);
  BestEvidence best;
  double best_snippet = -1.0, best_triplet = -1.0;
  for (const auto& r : results) {
    if (r.engine != engine || !r.qatar_related) continue;
    const double s = tfidf_cosine(side, text::words(r.snippet), idf);
    if (s > best_snippet) {
      best_snippet = s;
      best.snippet = r.snippet;
    }
    for (const auto& t : rolling_triplets(r.page_text)) {
      const double v = tfidf_cosine(side, text::words(t), idf);
      if (v > best_triplet) {
        best_triplet = v;
        best.triplet = t;
      }
    }
  }
  return best;
}

}  // namespace fc
