#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "factcheck/embeddings.hpp"
#include "factcheck/error.hpp"
#include "factcheck/text.hpp"
#include "factcheck/tfidf.hpp"

namespace fc {

// ---------------------------------------------------------------------------
// Queries

struct Query {
  std::vector<std::string> terms;
  std::string question_id;
  std::string answer_id;
  /// Number of leading terms that are named entities (quoted when rendered).
  std::size_t entity_terms = 0;
  /// TF-IDF weight of each content term, parallel to terms[entity_terms..].
  std::vector<double> weights;
  /// Fewer than the minimum number of terms were available.
  bool short_query = false;

  /// Removes the lowest-weighted content term (the last one); false if none left.
  bool drop_lowest();
  /// Lowercased terms joined by single spaces; the cache key input.
  std::string normalized() const;
  /// Search-engine syntax: entities in double quotes, then content terms.
  std::string render() const;
};

struct QueryOptions {
  std::size_t min_terms = 5;
  std::size_t max_terms = 10;
};

/// Content words (nouns, verbs, adjectives) of question + answer ranked by
/// TF-IDF, with named entities added in front; capped at max_terms. Throws
/// "unqueryable" when there is nothing to search for.
Query build_query(std::span<const Token> question, std::span<const Token> answer,
                  const IdfTable& idf, std::span<const std::string> named_entities,
                  const QueryOptions& opt = {});

// ---------------------------------------------------------------------------
// Sources

enum class SourceType : std::uint8_t { kReputed, kForum, kOther };
std::string_view to_string(SourceType t);

/// Host part of a URL without scheme, port, path or a leading "www.".
std::string host_of(std::string_view url);

/// Domain lists for source typing plus patterns that mark a result as related
/// to the forum's region.
class SourceClassifier {
 public:
  /// Built-in lists: news/government sites, forum/social sites, and the
  /// domain patterns "qatar", "doha" and ".qa". No text patterns.
  static SourceClassifier defaults();
  /// Lines `reputed <domain>`, `forum <domain>`, `region-domain <pattern>` or
  /// `region-text <pattern>`; '#' starts a comment.
  static SourceClassifier load(const std::string& path);

  void add_reputed(std::string domain) { reputed_.push_back(std::move(domain)); }
  void add_forum(std::string domain) { forum_.push_back(std::move(domain)); }
  void add_region_domain(std::string pattern) { region_domain_.push_back(std::move(pattern)); }
  void add_region_text(std::string pattern) { region_text_.push_back(std::move(pattern)); }

  /// A domain entry matches the host itself or any subdomain of it.
  SourceType classify(std::string_view url) const;
  /// Host contains a region-domain pattern, or the text (case-insensitively)
  /// contains a region-text pattern.
  bool region_related(std::string_view url, std::string_view text) const;

 private:
  std::vector<std::string> reputed_;
  std::vector<std::string> forum_;
  std::vector<std::string> region_domain_;
  std::vector<std::string> region_text_;
};

inline SourceType classify_source(std::string_view url,
                                  const SourceClassifier& c = SourceClassifier::defaults()) {
  return c.classify(url);
}

// ---------------------------------------------------------------------------
// Retrieval

struct EvidenceResult {
  std::string url;
  SourceType source_type = SourceType::kOther;
  bool qatar_related = false;
  std::string snippet;
  std::string page_text;
  std::string engine;
  bool operator==(const EvidenceResult&) const = default;
};

struct SearchHit {
  std::string url;
  std::string snippet;
  std::string page_text;
};

class NoCachedEvidence : public Error {
 public:
  using Error::Error;
};

/// Network or server failure; the caller may retry.
class TransportError : public Error {
 public:
  using Error::Error;
};

class SearchClient {
 public:
  virtual ~SearchClient() = default;
  virtual std::vector<SearchHit> search(std::string_view engine, const Query& query) = 0;
};

/// Generic JSON-over-HTTP adapter. Sends GET <path>?engine=..&q=.. to `host:port`
/// with `Authorization: Bearer $<api_key_env>` when that variable is set, and
/// expects {"results": [{"url", "snippet", "page_text"?}]}. Plain HTTP only.
class HttpSearchClient : public SearchClient {
 public:
  HttpSearchClient(std::string host, int port, std::string path = "/search",
                   std::string api_key_env = "FACTCHECK_SEARCH_API_KEY");
  std::vector<SearchHit> search(std::string_view engine, const Query& query) override;

 private:
  std::string host_;
  int port_;
  std::string path_;
  std::string api_key_env_;
};

/// One JSON file per (engine, normalized query) under a directory.
class EvidenceCache {
 public:
  static constexpr int kSchemaVersion = 1;

  explicit EvidenceCache(std::string dir);

  static std::string key(std::string_view engine, const Query& query);
  std::string path_for(std::string_view engine, const Query& query) const;

  std::optional<std::vector<EvidenceResult>> load(std::string_view engine, const Query& query) const;
  /// Written to a temporary file and renamed into place.
  void store(std::string_view engine, const Query& query,
             const std::vector<EvidenceResult>& results) const;

 private:
  std::string dir_;
};

enum class FetchMode : std::uint8_t { kOffline, kLive };

/// Cache hit returns the stored list. On a miss, offline mode throws
/// NoCachedEvidence and live mode searches through `client` and caches.
std::vector<EvidenceResult> fetch(const Query& query, std::string_view engine,
                                  const EvidenceCache& cache, FetchMode mode,
                                  SearchClient* client = nullptr,
                                  const SourceClassifier& classifier = SourceClassifier::defaults());

/// fetch() plus drop-and-retry: while fewer than `wanted` results come back and
/// the query has more than the minimum number of terms, drop the lowest term
/// and search again.
std::vector<EvidenceResult> fetch_with_retry(Query query, std::string_view engine,
                                             const EvidenceCache& cache, FetchMode mode,
                                             SearchClient* client = nullptr,
                                             const SourceClassifier& classifier =
                                                 SourceClassifier::defaults(),
                                             std::size_t wanted = 10, std::size_t min_terms = 5);

// ---------------------------------------------------------------------------
// Similarities

/// |set(a) ∩ set(b)| / |set(a)| over word unigrams; 0 when a is empty.
double containment(std::span<const std::string> a, std::span<const std::string> b);

/// Drops <script>/<style> bodies and all tags, collapses whitespace.
std::string strip_tags(std::string_view html);

/// Rolling windows of three consecutive sentences (a single window when the
/// page has fewer than three sentences; none when it is empty).
std::vector<std::string> rolling_triplets(std::string_view page_text);

enum class Side : std::uint8_t { kQuestion, kAnswer, kQuestionAnswer };
enum class Granularity : std::uint8_t { kSnippet, kPage };
enum class Measure : std::uint8_t { kTfidfCosine, kEmbeddingCosine, kContainment };
enum class Aggregate : std::uint8_t { kMax, kAvg };
enum class ResultFilter : std::uint8_t { kAll, kReputed, kForum, kOther };

struct SimilarityResources {
  const IdfTable* idf = nullptr;
  const VectorStore* vectors = nullptr;
};

/// Side x granularity x measure x aggregate x filter similarity scores.
class SimilarityBundle {
 public:
  static constexpr std::size_t kSides = 3, kGranularities = 2, kMeasures = 3, kAggregates = 2,
                               kFilters = 4;
  static constexpr std::size_t kCells = kSides * kGranularities * kMeasures * kAggregates * kFilters;

  static std::size_t index(Side s, Granularity g, Measure m, Aggregate a, ResultFilter f);
  static std::string cell_name(std::size_t index);

  double at(Side s, Granularity g, Measure m, Aggregate a, ResultFilter f) const {
    return cells_[index(s, g, m, a, f)];
  }
  double& at(Side s, Granularity g, Measure m, Aggregate a, ResultFilter f) {
    return cells_[index(s, g, m, a, f)];
  }
  const std::array<double, kCells>& cells() const { return cells_; }

 private:
  std::array<double, kCells> cells_{};
};

/// Scores only results flagged region-related. Snippet cells compare against
/// whole snippets; page cells use per-page max (or mean) over rolling sentence
/// triplets, then max (or mean) over results.
SimilarityBundle similarity_bundle(std::string_view question, std::string_view answer,
                                   std::span<const EvidenceResult> results,
                                   const SimilarityResources& res);

/// Which bundle cells become features.
class BundleSelection {
 public:
  /// All 144 cells.
  static BundleSelection full();
  /// The three source-type copies (reputed, forum, other): 108 cells.
  static BundleSelection source_copies();
  /// Unfiltered cells only: 36.
  static BundleSelection unfiltered();
  static BundleSelection by_name(std::string_view name);

  std::size_t size() const { return cells_.size(); }
  const std::vector<std::size_t>& cells() const { return cells_; }
  std::vector<double> apply(const SimilarityBundle& b) const;

 private:
  std::vector<std::size_t> cells_;
};

/// 0.5 * containment(answer, sentence) + 0.5 * embedding cosine; stands in for
/// an external textual-entailment engine.
double entailment_proxy(std::span<const std::string> answer_words,
                        std::span<const std::string> sentence_words, const VectorStore* vectors);

/// Best-matching snippet and page triplet (by TF-IDF cosine to `side_text`)
/// among the region-related results of one engine.
struct BestEvidence {
  std::string snippet;
  std::string triplet;
};
BestEvidence best_evidence(std::string_view side_text, std::span<const EvidenceResult> results,
                           std::string_view engine, const IdfTable& idf);

}  // namespace fc
