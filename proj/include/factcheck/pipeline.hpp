#pragma once

#include <atomic>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "factcheck/config.hpp"
#include "factcheck/corpus.hpp"
#include "factcheck/discourse.hpp"
#include "factcheck/embeddings.hpp"
#include "factcheck/eval.hpp"
#include "factcheck/evidence.hpp"
#include "factcheck/features.hpp"
#include "factcheck/features_cqa.hpp"
#include "factcheck/features_debate.hpp"
#include "factcheck/lexicons.hpp"
#include "factcheck/topics.hpp"

namespace fc {

/// Everything a run reads from disk, loaded once.
struct Resources {
  std::vector<Debate> debates;
  std::vector<CqaThread> threads;
  std::optional<LexiconSet> lexicons;
  std::optional<VectorStore> vectors;
  /// In-domain vectors for the cQA task; falls back to `vectors`.
  std::optional<VectorStore> cqa_vectors;
  std::optional<TopicModel> topics;
  std::optional<std::map<std::string, RstTree>> debate_discourse;
  std::optional<std::map<std::string, RstTree>> cqa_discourse;
  std::vector<ReferenceSentence> external_claims;
  std::optional<HqIndex> hq;
  std::optional<EvidenceCache> evidence_cache;
  SourceClassifier classifier = SourceClassifier::defaults();

  static Resources load(const ExperimentConfig& cfg);
  const VectorStore* cqa_store() const;
};

/// Lines `<label>\t<speaker>\t<text>` with label 1 (check-worthy) or 0.
std::vector<ReferenceSentence> load_external_claims(const std::string& path);
/// One post per non-empty line.
std::vector<std::string> load_hq_posts(const std::string& path);

/// JSON run record: tool version, command, the full config, its hash, a hash
/// of every referenced resource and the seeds. No timestamps, so reruns give
/// identical files.
std::string manifest_json(const ExperimentConfig& cfg, std::string_view command);
/// FNV-1a over file bytes; directories hash their sorted relative paths and
/// contents.
std::uint64_t hash_path(const std::string& path);

// ---------------------------------------------------------------------------
// Check-worthiness

/// Features of every debate sentence with the vocabulary and the known
/// examples taken from `train_debates` only. Masked columns are zero.
FeatureMatrix checkworthy_features(const ExperimentConfig& cfg, const Resources& res,
                                   const std::vector<Debate>& targets,
                                   const std::vector<Debate>& train_debates);

/// Rows x 10 labels (nine sources, ANY), debate then sentence order.
std::vector<std::uint8_t> checkworthy_label_matrix(const std::vector<Debate>& debates);

EvalReport eval_checkworthy(const ExperimentConfig& cfg, const Resources& res);

struct RankedSentence {
  std::string id;
  std::string speaker;
  std::string text;
  double score = 0.0;
};

/// Trains on all configured debates and writes model files to `dir`.
void train_checkworthy(const ExperimentConfig& cfg, const Resources& res, const std::string& dir);
/// Scores every sentence of `transcript` with a model from train_checkworthy;
/// highest first, ties in natural id order.
std::vector<RankedSentence> rank_transcript(const ExperimentConfig& cfg, const Resources& res,
                                            const std::string& dir,
                                            const std::vector<Debate>& transcript);

// ---------------------------------------------------------------------------
// cQA

CqaFeatureConfig cqa_feature_config(const ExperimentConfig& cfg);
/// Offline (or live with `client`) evidence lookup over the cache; a missing
/// cache entry yields no results and is counted in `misses`.
EvidenceLookup cqa_evidence_lookup(const ExperimentConfig& cfg, const Resources& res,
                                   const IdfTable& idf, SearchClient* client = nullptr,
                                   std::atomic<std::size_t>* misses = nullptr);
/// IDF over questions, answers and high-quality posts.
IdfTable cqa_idf(const Resources& res);

/// Group names for ablation over cQA columns; "context" is thread, forum and
/// high-quality support, "embeddings" the encoder block.
std::vector<std::uint8_t> cqa_mask(const std::vector<std::string>& columns,
                                   const std::vector<std::string>& ablate,
                                   const std::vector<std::string>& only);

struct FetchSummary {
  std::size_t lookups = 0;
  std::size_t with_results = 0;
  /// Offline cache misses.
  std::size_t misses = 0;
  /// Live requests that failed after the client gave up.
  std::size_t failed = 0;
};

/// Looks up every labelled answer on every configured engine (web engines and
/// the forum engine). With a client, misses are searched and cached.
FetchSummary fetch_evidence(const ExperimentConfig& cfg, const Resources& res,
                            SearchClient* client = nullptr);

EvalReport eval_cqa(const ExperimentConfig& cfg, const Resources& res);
void train_cqa(const ExperimentConfig& cfg, const Resources& res, const std::string& dir);

// ---------------------------------------------------------------------------
// Question classification (Factual / Opinion / Socializing)

EvalReport eval_question_class(const ExperimentConfig& cfg, const Resources& res);

/// Dispatches on cfg.task().
EvalReport run_eval(const ExperimentConfig& cfg, const Resources& res);
/// Feature matrix of the task (all rows; no per-fold resources).
FeatureMatrix run_features(const ExperimentConfig& cfg, const Resources& res);

kernels::Policy policy_of(const ExperimentConfig& cfg);

}  // namespace fc
