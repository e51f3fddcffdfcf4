#include "factcheck/pipeline.hpp"

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <memory>
#include <set>
#include <sstream>
#include <unordered_map>
#include <variant>
#include <cmath>
#include <cstdio>

#include <json.hpp>

#include "factcheck/error.hpp"
#include "factcheck/log.hpp"
#include "factcheck/models/bilstm.hpp"
#include "factcheck/models/ffnn.hpp"
#include "factcheck/models/multitask.hpp"
#include "factcheck/models/svm.hpp"
#include "factcheck/numfmt.hpp"
#include "factcheck/rng.hpp"
#include "factcheck/text.hpp"

namespace fs = std::filesystem;

namespace fc {

namespace {

constexpr std::string_view kVersion = "1.0.0";

std::vector<Token> tokens_of(const std::vector<Token>& tokens, std::string_view raw) {
  return tokens.empty() ? text::annotate(raw) : tokens;
}

std::vector<std::string> sentence_words(const Sentence& s) {
  return text::words(tokens_of(s.tokens, s.text));
}

std::string hex64(std::uint64_t v) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

std::vector<double> gather(const FeatureMatrix& m, std::span<const std::size_t> rows) {
  std::vector<double> out;
  out.reserve(rows.size() * m.cols());
  for (auto r : rows) {
    auto row = m.row(r);
    out.insert(out.end(), row.begin(), row.end());
  }
  return out;
}

template <class T>
std::vector<T> pick(const std::vector<T>& v, std::span<const std::size_t> rows) {
  std::vector<T> out;
  out.reserve(rows.size());
  for (auto r : rows) out.push_back(v[r]);
  return out;
}

DebateLayout layout_of(const ExperimentConfig& cfg) {
  return DebateLayout(cfg.get_size("topic_slots"), cfg.get_size("embedding_slots"),
                      cfg.get_size("bow_slots"));
}

std::optional<std::string> opt_path(const ExperimentConfig& cfg, const std::string& key) {
  if (!cfg.has(key)) return std::nullopt;
  return cfg.get(key);
}

void ensure_dir(const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw Error("cannot create directory '" + dir + "': " + ec.message());
}

std::string read_first_line(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open '" + path + "'");
  std::string line;
  std::getline(in, line);
  return line;
}

// Row bookkeeping shared by the cQA drivers; same order as extract_cqa_features.
struct CqaRows {
  std::vector<std::string> ids;
  std::vector<std::string> groups;
  std::vector<std::uint8_t> gold;
  std::vector<std::pair<std::size_t, std::size_t>> where;  // thread, answer
};

CqaRows cqa_rows(const std::vector<CqaThread>& threads) {
  CqaRows r;
  for (std::size_t t = 0; t < threads.size(); ++t) {
    const auto& th = threads[t];
    if (th.question.excluded) continue;
    for (std::size_t a = 0; a < th.answers.size(); ++a) {
      const auto& ans = th.answers[a];
      if (ans.factuality == Factuality::kNone) continue;
      r.ids.push_back(ans.id);
      r.groups.push_back(th.question.id);
      r.gold.push_back(ans.factuality == Factuality::kPositive ? 1 : 0);
      r.where.emplace_back(t, a);
    }
  }
  return r;
}

std::string report_name(const ExperimentConfig& cfg) {
  std::string name = std::string(to_string(cfg.task())) + "/" + cfg.get("model");
  if (cfg.get("model") == "multitask") name += "/" + cfg.get("variant");
  if (cfg.task() == Task::kCheckworthy) name += "/" + cfg.get("target_source");
  if (cfg.has("ablate")) name += " -" + cfg.get("ablate");
  if (cfg.has("only")) name += " only:" + cfg.get("only");
  return name;
}

}  // namespace

kernels::Policy policy_of(const ExperimentConfig& cfg) {
  const auto& t = cfg.get("threads");
  if (t == "serial") return kernels::Policy::kSerial;
  if (t == "parallel") return kernels::Policy::kParallel;
  throw ConfigError("threads must be 'serial' or 'parallel', not '" + t + "'");
}

// ---------------------------------------------------------------------------
// Resources

std::vector<ReferenceSentence> load_external_claims(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open external claims '" + path + "'");
  std::vector<ReferenceSentence> out;
  std::string line;
  std::size_t n = 0;
  while (std::getline(in, line)) {
    ++n;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    const auto t1 = line.find('\t');
    const auto t2 = t1 == std::string::npos ? t1 : line.find('\t', t1 + 1);
    if (t2 == std::string::npos) throw ParseError("expected label<TAB>speaker<TAB>text", n);
    const std::string label = line.substr(0, t1);
    if (label != "0" && label != "1") throw ParseError("label must be 0 or 1", n);
    ReferenceSentence r;
    r.key = "external/" + std::to_string(n);
    r.check_worthy = label == "1";
    r.speaker = line.substr(t1 + 1, t2 - t1 - 1);
    r.words = text::words(line.substr(t2 + 1));
    out.push_back(std::move(r));
  }
  return out;
}

std::vector<std::string> load_hq_posts(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open high-quality posts '" + path + "'");
  std::vector<std::string> out;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (!line.empty()) out.push_back(line);
  }
  return out;
}

Resources Resources::load(const ExperimentConfig& cfg) {
  Resources r;
  if (cfg.has("debates")) r.debates = load_debates(cfg.get("debates"), opt_path(cfg, "debates_sidecar"));
  if (cfg.has("cqa")) r.threads = load_cqa(cfg.get("cqa"), opt_path(cfg, "cqa_sidecar"));
  if (cfg.has("lexicons")) r.lexicons = LexiconSet::load(cfg.get("lexicons"));
  if (cfg.has("vectors")) r.vectors = load_vectors(cfg.get("vectors"));
  if (cfg.has("cqa_vectors")) r.cqa_vectors = load_vectors(cfg.get("cqa_vectors"));
  if (cfg.has("topics")) r.topics = TopicModel::load(cfg.get("topics"));
  RelationMap rel;
  if (cfg.has("relations")) rel = RelationMap::load(cfg.get("relations"));
  if (cfg.has("debate_discourse")) r.debate_discourse = load_rst(cfg.get("debate_discourse"), rel);
  if (cfg.has("cqa_discourse")) r.cqa_discourse = load_rst(cfg.get("cqa_discourse"), rel);
  if (cfg.has("external_claims")) r.external_claims = load_external_claims(cfg.get("external_claims"));
  if (cfg.has("hq_posts")) {
    const auto posts = load_hq_posts(cfg.get("hq_posts"));
    r.hq = HqIndex(posts);
  }
  if (cfg.has("evidence_cache")) r.evidence_cache.emplace(cfg.get("evidence_cache"));
  if (cfg.has("source_list")) r.classifier = SourceClassifier::load(cfg.get("source_list"));
  return r;
}

const VectorStore* Resources::cqa_store() const {
  if (cqa_vectors) return &*cqa_vectors;
  if (vectors) return &*vectors;
  return nullptr;
}

// ---------------------------------------------------------------------------
// Manifest

std::uint64_t hash_path(const std::string& path) {
  const fs::path root(path);
  auto hash_file = [](const fs::path& p, std::uint64_t h) {
    std::ifstream in(p, std::ios::binary);
    if (!in) throw Error("cannot read '" + p.string() + "'");
    char buf[1 << 16];
    while (in.read(buf, sizeof buf) || in.gcount() > 0) {
      h = fnv1a(std::string_view(buf, static_cast<std::size_t>(in.gcount())), h);
    }
    return h;
  };
  if (!fs::is_directory(root)) return hash_file(root, fnv1a(""));
  std::vector<fs::path> files;
  for (const auto& e : fs::recursive_directory_iterator(root)) {
    if (e.is_regular_file()) files.push_back(e.path());
  }
  std::sort(files.begin(), files.end());
  std::uint64_t h = fnv1a("");
  for (const auto& f : files) {
    h = fnv1a(fs::relative(f, root).generic_string(), h);
    h = fnv1a(std::string_view("\0", 1), h);
    h = hash_file(f, h);
  }
  return h;
}

std::string manifest_json(const ExperimentConfig& cfg, std::string_view command) {
  nlohmann::ordered_json j;
  j["tool"] = "factcheck";
  j["version"] = kVersion;
  j["command"] = command;
  j["task"] = cfg.get("task");
  j["config_hash"] = hex64(cfg.hash());
  nlohmann::ordered_json seeds = nlohmann::ordered_json::array();
  for (auto s : cfg.seeds()) seeds.push_back(s);
  j["seeds"] = seeds;
  nlohmann::ordered_json res = nlohmann::ordered_json::object();
  for (const auto& k : ExperimentConfig::path_keys()) {
    if (cfg.has(k) && fs::exists(cfg.get(k))) res[k] = hex64(hash_path(cfg.get(k)));
  }
  j["resources"] = res;
  nlohmann::ordered_json c = nlohmann::ordered_json::object();
  for (const auto& [k, v] : cfg.values()) c[k] = v;
  j["config"] = c;
  return j.dump(2) + "\n";
}

// ---------------------------------------------------------------------------
// Check-worthiness

FeatureMatrix checkworthy_features(const ExperimentConfig& cfg, const Resources& res,
                                   const std::vector<Debate>& targets,
                                   const std::vector<Debate>& train_debates) {
  if (!res.lexicons) throw ConfigError("config key 'lexicons' must be set for debate features");
  const auto layout = layout_of(cfg);
  std::vector<std::vector<std::string>> docs;
  for (const auto& d : train_debates) {
    for (const auto& s : d.sentences) docs.push_back(sentence_words(s));
  }
  const auto vocab = Vocabulary::fit(docs, layout.bow_slots());
  const auto refs = reference_sentences(train_debates, label_column(cfg.get("target_source")));

  DebateResources dr;
  dr.lexicons = &*res.lexicons;
  dr.vocabulary = &vocab;
  dr.vectors = res.vectors ? &*res.vectors : nullptr;
  dr.topics = res.topics ? &*res.topics : nullptr;
  dr.discourse = res.debate_discourse ? &*res.debate_discourse : nullptr;
  dr.training_refs = refs;
  dr.external_claims = res.external_claims;

  auto m = extract_debate_features(targets, dr, layout, policy_of(cfg));
  apply_mask(m, layout.mask(cfg.get_list("ablate"), cfg.get_list("only")));
  return m;
}

std::vector<std::uint8_t> checkworthy_label_matrix(const std::vector<Debate>& debates) {
  std::vector<std::uint8_t> out;
  for (const auto& d : debates) {
    for (std::size_t i = 0; i < d.sentences.size(); ++i) {
      if (i < d.annotations.rows()) {
        const auto l = d.annotations.labels(i);
        out.insert(out.end(), l.begin(), l.end());
      } else {
        out.insert(out.end(), kNumSources + 1, 0);
      }
    }
  }
  return out;
}

namespace {

struct DebateRows {
  std::vector<std::string> ids;
  std::vector<std::vector<std::string>> docs;
};

DebateRows debate_rows(const std::vector<Debate>& debates) {
  DebateRows r;
  for (const auto& d : debates) {
    for (const auto& s : d.sentences) {
      r.ids.push_back(d.id + "/" + std::to_string(s.id));
      r.docs.push_back(sentence_words(s));
    }
  }
  return r;
}

// Scores from a trained ffnn or multitask model.
struct CheckworthyModel {
  std::variant<Ffnn, MultiTaskNet> net;
  std::vector<double> scores(std::span<const double> x, std::size_t n) const {
    return std::visit([&](const auto& m) { return m.scores(x, n); }, net);
  }
};

CheckworthyModel fit_checkworthy(const ExperimentConfig& cfg, std::span<const double> x,
                                 std::size_t cols, std::span<const std::uint8_t> labels,
                                 std::size_t target, std::uint64_t seed) {
  const std::size_t n = cols ? x.size() / cols : 0;
  const std::size_t lc = kNumSources + 1;
  if (cfg.get("model") == "multitask") {
    auto mc = cfg.multitask();
    mc.seed = seed;
    mc.policy = policy_of(cfg);
    return {train_multitask(x, cols, labels, lc, mc)};
  }
  std::vector<std::uint8_t> y(n);
  for (std::size_t i = 0; i < n; ++i) y[i] = labels[i * lc + target];
  auto fc = cfg.ffnn();
  fc.seed = seed;
  fc.policy = policy_of(cfg);
  return {train_ffnn(x, cols, y, fc)};
}

}  // namespace

EvalReport eval_checkworthy(const ExperimentConfig& cfg, const Resources& res) {
  if (res.debates.empty()) throw ConfigError("no debates loaded");
  const auto rows = debate_rows(res.debates);
  const auto groups = debate_groups(res.debates);
  const auto labels = checkworthy_label_matrix(res.debates);
  const std::size_t target = label_column(cfg.get("target_source"));
  const std::size_t lc = kNumSources + 1;
  std::vector<std::uint8_t> gold(rows.ids.size());
  for (std::size_t i = 0; i < gold.size(); ++i) gold[i] = labels[i * lc + target];

  const auto folds = group_folds(groups);
  CvOptions opts;
  opts.name = report_name(cfg);
  opts.seeds = cfg.seeds();
  opts.ranking = true;
  opts.policy = policy_of(cfg);

  const std::string model = cfg.get("model");
  if (model == "random") return cross_validate(folds, rows.ids, gold, random_baseline(), opts);
  if (model == "tfidf_svm_rank") {
    LinearSvmConfig lc_cfg;
    lc_cfg.c = cfg.get_double("tfidf.c");
    return cross_validate(folds, rows.ids, gold,
                          tfidf_svm_baseline(rows.docs, gold, cfg.get_size("tfidf.slots"), lc_cfg),
                          opts);
  }

  // Features depend on the fold (vocabulary, known examples) but not the seed.
  auto per_fold = std::make_shared<std::vector<FeatureMatrix>>(folds.size());
  std::unordered_map<std::string, std::size_t> fold_index;
  for (std::size_t f = 0; f < folds.size(); ++f) {
    fold_index[folds[f].group] = f;
    std::vector<Debate> train;
    for (const auto& d : res.debates) {
      if (d.id != folds[f].group) train.push_back(d);
    }
    auto m = checkworthy_features(cfg, res, res.debates, train);
    Standardizer::fit(m, folds[f].train).apply(m);
    (*per_fold)[f] = std::move(m);
    log::info("features ready for fold " + folds[f].group);
  }

  FoldRunner runner = [&, per_fold](const Fold& fold, std::uint64_t seed) {
    const auto& m = (*per_fold)[fold_index.at(fold.group)];
    const auto xtr = gather(m, fold.train);
    std::vector<std::uint8_t> ltr;
    for (auto r : fold.train) ltr.insert(ltr.end(), labels.begin() + r * lc, labels.begin() + (r + 1) * lc);
    const auto net = fit_checkworthy(cfg, xtr, m.cols(), ltr, target, seed);
    const auto xte = gather(m, fold.test);
    FoldPrediction p;
    p.scores = net.scores(xte, fold.test.size());
    for (double s : p.scores) p.predicted.push_back(s > 0.5 ? 1 : 0);
    return p;
  };
  return cross_validate(folds, rows.ids, gold, runner, opts);
}

void train_checkworthy(const ExperimentConfig& cfg, const Resources& res, const std::string& dir) {
  const std::string model = cfg.get("model");
  if (model != "ffnn" && model != "multitask") {
    throw ConfigError("train supports the ffnn and multitask models, not '" + model + "'");
  }
  if (res.debates.empty()) throw ConfigError("no debates loaded");
  auto m = checkworthy_features(cfg, res, res.debates, res.debates);
  const auto st = Standardizer::fit(m);
  st.apply(m);
  const auto labels = checkworthy_label_matrix(res.debates);
  const auto net = fit_checkworthy(cfg, m.values, m.cols(), labels,
                                   label_column(cfg.get("target_source")), cfg.seeds().front());
  ensure_dir(dir);
  std::visit([&](const auto& n) { n.save(dir + "/model.txt"); }, net.net);
  std::ofstream out(dir + "/standardizer.txt");
  st.write(out);
  if (!out) throw Error("cannot write '" + dir + "/standardizer.txt'");
}

std::vector<RankedSentence> rank_transcript(const ExperimentConfig& cfg, const Resources& res,
                                            const std::string& dir,
                                            const std::vector<Debate>& transcript) {
  const std::string model_path = dir + "/model.txt";
  const std::string header = read_first_line(model_path);
  std::ifstream sin(dir + "/standardizer.txt");
  if (!sin) throw Error("cannot open '" + dir + "/standardizer.txt'");
  const auto st = Standardizer::read(sin);

  auto m = checkworthy_features(cfg, res, transcript, res.debates);
  st.apply(m);
  std::vector<double> scores;
  if (header.rfind("factcheck-model ffnn", 0) == 0) {
    scores = Ffnn::load(model_path).scores(m.values, m.rows());
  } else if (header.rfind("factcheck-model multitask", 0) == 0) {
    scores = MultiTaskNet::load(model_path).scores(m.values, m.rows());
  } else {
    throw SchemaError("'" + model_path + "' is not a check-worthiness model");
  }

  std::vector<RankedSentence> out;
  std::size_t r = 0;
  for (const auto& d : transcript) {
    for (const auto& s : d.sentences) {
      out.push_back({d.id + "/" + std::to_string(s.id), s.speaker, s.text, scores[r++]});
    }
  }
  std::stable_sort(out.begin(), out.end(), [](const RankedSentence& a, const RankedSentence& b) {
    if (a.score != b.score) return a.score > b.score;
    return natural_less(a.id, b.id);
  });
  return out;
}

// ---------------------------------------------------------------------------
// cQA

CqaFeatureConfig cqa_feature_config(const ExperimentConfig& cfg) {
  CqaFeatureConfig c;
  c.hq_k = cfg.get_size("cqa.hq_k");
  c.web_selection = BundleSelection::by_name(cfg.get("cqa.web_cells"));
  c.forum_selection = BundleSelection::by_name(cfg.get("cqa.forum_cells"));
  c.web_engines = cfg.get_list("cqa.web_engines");
  c.forum_engine = cfg.get("cqa.forum_engine");
  return c;
}

IdfTable cqa_idf(const Resources& res) {
  std::vector<std::vector<std::string>> docs;
  for (const auto& t : res.threads) {
    docs.push_back(text::words(tokens_of(t.question.tokens, t.question.text())));
    for (const auto& a : t.answers) docs.push_back(text::words(tokens_of(a.tokens, a.text)));
  }
  if (res.hq) {
    for (std::size_t i = 0; i < res.hq->size(); ++i) docs.push_back(res.hq->words(i));
  }
  return IdfTable::fit(docs);
}

EvidenceLookup cqa_evidence_lookup(const ExperimentConfig& cfg, const Resources& res,
                                   const IdfTable& idf, SearchClient* client,
                                   std::atomic<std::size_t>* misses) {
  if (!res.evidence_cache) {
    return [](const CqaThread&, const Answer&, std::string_view) {
      return std::vector<EvidenceResult>{};
    };
  }
  const EvidenceCache* cache = &*res.evidence_cache;
  const SourceClassifier* classifier = &res.classifier;
  const std::size_t wanted = cfg.get_size("search.results");
  const FetchMode mode = client ? FetchMode::kLive : FetchMode::kOffline;
  return [cache, classifier, &idf, client, misses, wanted, mode](
             const CqaThread& thread, const Answer& answer, std::string_view engine) {
    const auto qt = tokens_of(thread.question.tokens, thread.question.text());
    const auto at = tokens_of(answer.tokens, answer.text);
    std::vector<std::string> entities;
    for (const auto* toks : {&qt, &at}) {
      for (const auto& sp : text::entity_spans(*toks)) {
        auto e = text::span_text(*toks, sp);
        if (std::find(entities.begin(), entities.end(), e) == entities.end()) {
          entities.push_back(std::move(e));
        }
      }
    }
    Query q;
    try {
      q = build_query(qt, at, idf, entities);
    } catch (const Error& e) {
      if (std::string_view(e.what()) == "unqueryable") return std::vector<EvidenceResult>{};
      throw;
    }
    q.question_id = thread.question.id;
    q.answer_id = answer.id;
    try {
      return fetch_with_retry(q, engine, *cache, mode, client, *classifier, wanted);
    } catch (const NoCachedEvidence&) {
      if (misses) ++*misses;
      return std::vector<EvidenceResult>{};
    }
  };
}

std::vector<std::uint8_t> cqa_mask(const std::vector<std::string>& columns,
                                   const std::vector<std::string>& ablate,
                                   const std::vector<std::string>& only) {
  static const std::vector<std::string> known = {
      "thread_support", "forum_support", "hq_support", "web_support",
      "credibility",    "linguistic",    "discourse",  "embeddings"};
  auto expand = [](const std::vector<std::string>& names) {
    std::set<std::string> out;
    for (const auto& n : names) {
      if (n == "context") {
        out.insert({"thread_support", "forum_support", "hq_support"});
      } else if (std::find(known.begin(), known.end(), n) != known.end()) {
        out.insert(n);
      } else {
        throw ConfigError("unknown cQA feature group '" + n + "'");
      }
    }
    return out;
  };
  const auto drop = expand(ablate);
  const auto keep = expand(only);
  std::vector<std::uint8_t> mask;
  mask.reserve(columns.size());
  for (const auto& c : columns) {
    const std::string g = c.substr(0, c.find(':'));
    const bool on = (keep.empty() || keep.count(g)) && !drop.count(g);
    mask.push_back(on ? 1 : 0);
  }
  return mask;
}

FetchSummary fetch_evidence(const ExperimentConfig& cfg, const Resources& res,
                            SearchClient* client) {
  if (!res.evidence_cache) throw ConfigError("config key 'evidence_cache' must be set");
  const auto idf = cqa_idf(res);
  std::atomic<std::size_t> misses{0};
  const auto lookup = cqa_evidence_lookup(cfg, res, idf, client, &misses);
  const auto fcfg = cqa_feature_config(cfg);
  std::vector<std::string> engines = fcfg.web_engines;
  engines.push_back(fcfg.forum_engine);
  FetchSummary s;
  const auto rows = cqa_rows(res.threads);
  for (const auto& [t, a] : rows.where) {
    for (const auto& e : engines) {
      ++s.lookups;
      try {
        if (!lookup(res.threads[t], res.threads[t].answers[a], e).empty()) ++s.with_results;
      } catch (const TransportError& err) {
        ++s.failed;
        log::warn(res.threads[t].answers[a].id + " on " + e + ": " + err.what());
      }
    }
  }
  s.misses = misses.load();
  return s;
}

namespace {

struct CqaData {
  CqaRows rows;
  FeatureMatrix features;
  std::vector<BilstmExample> examples;  // empty when the encoder is off
};

bool wants_encoder(const ExperimentConfig& cfg, const Resources& res) {
  if (cfg.get("model") != "svm" || !cfg.get_bool("bilstm")) return false;
  const auto ablate = cfg.get_list("ablate");
  const auto only = cfg.get_list("only");
  if (std::find(ablate.begin(), ablate.end(), "embeddings") != ablate.end()) return false;
  if (!only.empty() && std::find(only.begin(), only.end(), "embeddings") == only.end()) return false;
  if (!res.cqa_store()) {
    log::warn("no word vectors: the bi-LSTM encoder block is skipped");
    return false;
  }
  return true;
}

CqaData cqa_data(const ExperimentConfig& cfg, const Resources& res, bool encoder) {
  if (res.threads.empty()) throw ConfigError("no cQA threads loaded");
  CqaData d;
  d.rows = cqa_rows(res.threads);
  const auto idf = cqa_idf(res);
  std::atomic<std::size_t> misses{0};
  CqaResources cr;
  cr.vectors = res.cqa_store();
  cr.lexicons = res.lexicons ? &*res.lexicons : nullptr;
  cr.idf = &idf;
  cr.hq = res.hq ? &*res.hq : nullptr;
  cr.discourse = res.cqa_discourse ? &*res.cqa_discourse : nullptr;
  if (res.evidence_cache) cr.evidence = cqa_evidence_lookup(cfg, res, idf, nullptr, &misses);
  const auto fcfg = cqa_feature_config(cfg);
  d.features = extract_cqa_features(res.threads, cr, fcfg, policy_of(cfg));
  if (misses > 0) {
    log::warn(std::to_string(misses.load()) +
              " evidence lookups missed the cache; run fetch-evidence --live to fill it");
  }
  if (!encoder) return d;

  std::vector<std::size_t> web_cols;
  for (std::size_t c = 0; c < d.features.cols(); ++c) {
    if (d.features.columns[c].rfind("web_support:", 0) == 0) web_cols.push_back(c);
  }
  const auto& engines = fcfg.web_engines;
  const std::string ea = engines.size() > 0 ? engines[0] : "";
  const std::string eb = engines.size() > 1 ? engines[1] : "";
  const std::size_t max_len = cfg.get_size("bilstm.max_len");
  d.examples.resize(d.rows.ids.size());
  kernels::for_each_index(
      d.rows.ids.size(),
      [&](std::size_t i) {
        const auto [t, a] = d.rows.where[i];
        const auto& th = res.threads[t];
        const auto& ans = th.answers[a];
        std::array<std::vector<std::string>, kBranches> toks;
        toks[0] = text::words(tokens_of(ans.tokens, ans.text));
        auto side = [&](const std::string& engine, std::size_t snip, std::size_t trip) {
          if (engine.empty() || !cr.evidence) return;
          const auto results = cr.evidence(th, ans, engine);
          const auto best = best_evidence(ans.text, results, engine, idf);
          toks[snip] = text::words(best.snippet);
          toks[trip] = text::words(best.triplet);
        };
        side(ea, 1, 3);
        side(eb, 2, 4);
        std::vector<double> sim;
        const auto row = d.features.row(i);
        for (auto c : web_cols) sim.push_back(row[c]);
        d.examples[i] = make_bilstm_example(toks, std::move(sim), d.rows.gold[i], *res.cqa_store(),
                                            max_len);
      },
      policy_of(cfg));
  return d;
}

// Encoder block (260 values by default) plus the output score for every row.
FeatureMatrix encoder_features(const BilstmStack& net, const std::vector<BilstmExample>& examples,
                               const std::vector<std::string>& ids, kernels::Policy policy) {
  FeatureMatrix m;
  const std::size_t w = net.embedding_block_size() + 1;
  for (std::size_t c = 0; c < w; ++c) m.columns.push_back("embeddings:" + std::to_string(c));
  m.ids = ids;
  m.values.resize(ids.size() * w);
  kernels::for_each_index(
      ids.size(),
      [&](std::size_t i) {
        auto block = net.embedding_block(examples[i]);
        block.push_back(net.score(examples[i]));
        std::copy(block.begin(), block.end(), m.values.begin() + static_cast<std::ptrdiff_t>(i * w));
      },
      policy);
  return m;
}

BilstmStack fit_encoder(const ExperimentConfig& cfg, const Resources& res,
                        const std::vector<BilstmExample>& examples,
                        std::span<const std::size_t> rows, std::uint64_t seed) {
  const auto train = pick(examples, rows);
  const std::size_t sim = examples.empty() ? 0 : examples.front().similarity.size();
  auto bc = cfg.bilstm(res.cqa_store()->dimension(), sim);
  bc.seed = seed;
  bc.policy = policy_of(cfg);
  return train_bilstm_stack(train, bc);
}

struct SvmOutcome {
  GridSearchResult grid;
  Standardizer standardizer;
  std::vector<std::uint8_t> mask;
};

// Mask, standardize on `rows` and grid-search the RBF SVM. Masks `m` in place.
SvmOutcome fit_cqa_svm(const ExperimentConfig& cfg, FeatureMatrix& m,
                       std::span<const std::size_t> rows, std::span<const std::uint8_t> gold,
                       std::uint64_t seed) {
  SvmOutcome out{{}, {}, cqa_mask(m.columns, cfg.get_list("ablate"), cfg.get_list("only"))};
  apply_mask(m, out.mask);
  out.standardizer = Standardizer::fit(m, rows);
  out.standardizer.apply(m);
  const auto x = gather(m, rows);
  std::vector<std::uint8_t> y;
  for (auto r : rows) y.push_back(gold[r]);
  auto grid = cfg.svm_grid();
  grid.seed = seed;
  SvmConfig base;
  base.policy = kernels::Policy::kSerial;
  out.grid = grid_search_svm(x, m.cols(), y, grid, base);
  return out;
}

}  // namespace

EvalReport eval_cqa(const ExperimentConfig& cfg, const Resources& res) {
  const std::string model = cfg.get("model");
  const bool encoder = wants_encoder(cfg, res);
  auto data = std::make_shared<CqaData>(cqa_data(cfg, res, encoder && model == "svm"));
  const auto& rows = data->rows;
  const auto folds = group_folds(rows.groups);
  CvOptions opts;
  opts.name = report_name(cfg);
  opts.seeds = cfg.seeds();
  opts.ranking = false;
  opts.classification = true;
  opts.policy = policy_of(cfg);

  if (model == "majority") return cross_validate(folds, rows.ids, rows.gold, majority_baseline(rows.gold), opts);
  if (model == "random") return cross_validate(folds, rows.ids, rows.gold, random_baseline(), opts);

  FoldRunner runner = [&cfg, &res, data](const Fold& fold, std::uint64_t seed) {
    FeatureMatrix m = data->features;
    if (!data->examples.empty()) {
      const auto net = fit_encoder(cfg, res, data->examples, fold.train, mix_seed(seed, 7));
      m = FeatureMatrix::hconcat(m, encoder_features(net, data->examples, data->rows.ids,
                                                     kernels::Policy::kSerial));
    }
    const auto fit = fit_cqa_svm(cfg, m, fold.train, data->rows.gold, seed);
    FoldPrediction p;
    p.scores = fit.grid.model.decision(gather(m, fold.test), fold.test.size());
    for (double s : p.scores) p.predicted.push_back(s > 0.0 ? 1 : 0);
    return p;
  };
  return cross_validate(folds, rows.ids, rows.gold, runner, opts);
}

void train_cqa(const ExperimentConfig& cfg, const Resources& res, const std::string& dir) {
  if (cfg.get("model") != "svm") {
    throw ConfigError("train supports the svm model for cqa_factcheck, not '" + cfg.get("model") + "'");
  }
  const bool encoder = wants_encoder(cfg, res);
  auto data = cqa_data(cfg, res, encoder);
  std::vector<std::size_t> all(data.rows.ids.size());
  for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
  const auto seed = cfg.seeds().front();
  FeatureMatrix m = data.features;
  ensure_dir(dir);
  if (!data.examples.empty()) {
    const auto net = fit_encoder(cfg, res, data.examples, all, mix_seed(seed, 7));
    net.save(dir + "/bilstm.txt");
    m = FeatureMatrix::hconcat(m, encoder_features(net, data.examples, data.rows.ids,
                                                   policy_of(cfg)));
  }
  const auto fit = fit_cqa_svm(cfg, m, all, data.rows.gold, seed);
  fit.grid.model.save(dir + "/svm.txt");
  std::ofstream out(dir + "/standardizer.txt");
  fit.standardizer.write(out);
  std::ofstream cols(dir + "/columns.txt");
  for (std::size_t c = 0; c < m.cols(); ++c) {
    cols << m.columns[c] << '\t' << int(fit.mask[c]) << '\n';
  }
  log::info("chose C=" + format_double(fit.grid.best.c) + " gamma=" +
            format_double(fit.grid.best.gamma) + " (cv accuracy " +
            format_fixed(fit.grid.best.accuracy, 3) + ")");
}

// ---------------------------------------------------------------------------
// Question classification

namespace {

constexpr std::size_t kQuestionClasses = 3;

std::size_t class_index(QuestionClass c) { return static_cast<std::size_t>(c) - 1; }

}  // namespace

EvalReport eval_question_class(const ExperimentConfig& cfg, const Resources& res) {
  std::vector<std::vector<std::string>> docs;
  std::vector<std::size_t> gold;
  std::vector<std::string> ids;
  for (const auto& t : res.threads) {
    if (t.question.excluded || t.question.question_class == QuestionClass::kNone) continue;
    docs.push_back(text::words(tokens_of(t.question.tokens, t.question.text())));
    gold.push_back(class_index(t.question.question_class));
    ids.push_back(t.question.id);
  }
  const std::size_t n = docs.size();
  const std::size_t k = std::min(cfg.get_size("qc.folds"), n);
  if (k < 2) throw Error("question classification needs at least 2 labelled questions");
  const std::string model = cfg.get("model");
  const std::size_t slots = cfg.get_size("tfidf.slots");
  LinearSvmConfig lcfg;
  lcfg.c = cfg.get_double("tfidf.c");

  EvalReport rep;
  rep.name = report_name(cfg);
  rep.ranking = false;
  rep.classification = true;
  rep.seeds = cfg.seeds();

  for (auto seed : rep.seeds) {
    std::vector<std::size_t> order(n);
    for (std::size_t i = 0; i < n; ++i) order[i] = i;
    Rng rng(seed);
    rng.shuffle(std::span<std::size_t>(order));
    std::vector<std::size_t> fold_of(n);
    for (std::size_t i = 0; i < n; ++i) fold_of[order[i]] = i % k;

    std::vector<std::size_t> predicted(n);
    std::vector<std::vector<std::size_t>> tests(k);
    kernels::for_each_index(
        k,
        [&](std::size_t f) {
          std::vector<std::size_t> train;
          for (std::size_t i = 0; i < n; ++i) (fold_of[i] == f ? tests[f] : train).push_back(i);
          if (model == "majority") {
            std::array<std::size_t, kQuestionClasses> counts{};
            for (auto r : train) ++counts[gold[r]];
            const auto best = static_cast<std::size_t>(
                std::max_element(counts.begin(), counts.end()) - counts.begin());
            for (auto r : tests[f]) predicted[r] = best;
            return;
          }
          std::vector<std::vector<std::string>> tdocs;
          for (auto r : train) tdocs.push_back(docs[r]);
          const auto vocab = Vocabulary::fit(tdocs, slots);
          std::vector<SparseVector> xs;
          for (const auto& d : tdocs) xs.push_back(vocab.transform_sparse(d));
          std::vector<LinearSvm> ovr;
          for (std::size_t c = 0; c < kQuestionClasses; ++c) {
            std::vector<std::uint8_t> y;
            for (auto r : train) y.push_back(gold[r] == c ? 1 : 0);
            auto cc = lcfg;
            cc.seed = mix_seed(seed, f * kQuestionClasses + c);
            ovr.push_back(train_linear_svm(xs, vocab.slots(), y, cc));
          }
          for (auto r : tests[f]) {
            const auto row = vocab.transform_sparse(docs[r]);
            std::size_t best = 0;
            double best_d = -1e300;
            for (std::size_t c = 0; c < kQuestionClasses; ++c) {
              const double d = ovr[c].decision(row);
              if (d > best_d) {
                best_d = d;
                best = c;
              }
            }
            predicted[r] = best;
          }
        },
        policy_of(cfg));

    // Macro-averaged one-vs-rest precision, recall and F1.
    auto score = [&](std::span<const std::size_t> rows) {
      MetricSet m;
      std::size_t correct = 0;
      for (auto r : rows) correct += predicted[r] == gold[r];
      m.accuracy = rows.empty() ? 0.0 : double(correct) / double(rows.size());
      for (std::size_t c = 0; c < kQuestionClasses; ++c) {
        std::vector<std::uint8_t> p, g;
        for (auto r : rows) {
          p.push_back(predicted[r] == c);
          g.push_back(gold[r] == c);
        }
        const auto cm = classification_metrics(p, g);
        m.precision += cm.precision / kQuestionClasses;
        m.recall += cm.recall / kQuestionClasses;
        m.f1 += cm.f1 / kQuestionClasses;
      }
      return m;
    };
    for (std::size_t f = 0; f < k; ++f) {
      rep.folds.push_back({"fold-" + std::to_string(f + 1), seed, score(tests[f]), tests[f].size()});
    }
    std::vector<std::size_t> all(n);
    for (std::size_t i = 0; i < n; ++i) all[i] = i;
    rep.per_seed.push_back(score(all));
  }

  const double S = double(rep.per_seed.size());
  for (auto c : kClassificationColumns) {
    double mu = 0.0;
    for (const auto& m : rep.per_seed) mu += EvalReport::get(m, c) / S;
    double ss = 0.0;
    for (const auto& m : rep.per_seed) ss += (EvalReport::get(m, c) - mu) * (EvalReport::get(m, c) - mu);
    const double sd = rep.per_seed.size() > 1 ? std::sqrt(ss / (S - 1.0)) : 0.0;
    if (c == "Accuracy") rep.mean.accuracy = mu, rep.stddev.accuracy = sd;
    if (c == "Precision") rep.mean.precision = mu, rep.stddev.precision = sd;
    if (c == "Recall") rep.mean.recall = mu, rep.stddev.recall = sd;
    if (c == "F1") rep.mean.f1 = mu, rep.stddev.f1 = sd;
  }
  return rep;
}

// ---------------------------------------------------------------------------

EvalReport run_eval(const ExperimentConfig& cfg, const Resources& res) {
  switch (cfg.task()) {
    case Task::kCheckworthy: return eval_checkworthy(cfg, res);
    case Task::kCqaFactcheck: return eval_cqa(cfg, res);
    case Task::kQuestionClass: return eval_question_class(cfg, res);
  }
  throw ConfigError("unknown task");
}

FeatureMatrix run_features(const ExperimentConfig& cfg, const Resources& res) {
  switch (cfg.task()) {
    case Task::kCheckworthy:
      return checkworthy_features(cfg, res, res.debates, res.debates);
    case Task::kCqaFactcheck: {
      auto d = cqa_data(cfg, res, false);
      apply_mask(d.features, cqa_mask(d.features.columns, cfg.get_list("ablate"), cfg.get_list("only")));
      return std::move(d.features);
    }
    case Task::kQuestionClass: {
      std::vector<std::vector<std::string>> docs;
      std::vector<std::string> ids;
      for (const auto& t : res.threads) {
        if (t.question.excluded) continue;
        docs.push_back(text::words(tokens_of(t.question.tokens, t.question.text())));
        ids.push_back(t.question.id);
      }
      const auto vocab = Vocabulary::fit(docs, cfg.get_size("tfidf.slots"));
      FeatureMatrix m;
      for (std::size_t c = 0; c < vocab.slots(); ++c) m.columns.push_back("bow:" + std::to_string(c));
      for (std::size_t i = 0; i < docs.size(); ++i) m.append(ids[i], vocab.transform(docs[i]));
      return m;
    }
  }
  throw ConfigError("unknown task");
}

}  // namespace fc
