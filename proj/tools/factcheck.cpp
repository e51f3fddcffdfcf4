// factcheck: command-line driver for the check-worthiness and cQA pipelines.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <unordered_set>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "factcheck/config.hpp"
#include "factcheck/corpus.hpp"
#include "factcheck/error.hpp"
#include "factcheck/evidence.hpp"
#include "factcheck/log.hpp"
#include "factcheck/numfmt.hpp"
#include "factcheck/pipeline.hpp"
#include "factcheck/text.hpp"
#include "factcheck/topics.hpp"

namespace fs = std::filesystem;
using nlohmann::ordered_json;

namespace {

struct Common {
  std::string config;
  std::string task, variant, target_source, out, threads;
  std::string ablate, only, seeds;
  std::optional<std::uint64_t> seed;
  bool live = false;
  std::vector<std::string> sets;
};

void add_common(CLI::App* sub, Common& c) {
  sub->add_option("--config", c.config, "Config file or a manifest.json from an earlier run");
  sub->add_option("--task", c.task, "checkworthy | cqa_factcheck | question_class");
  sub->add_option("--seed", c.seed, "Single seed");
  sub->add_option("--seeds", c.seeds, "Comma-separated seeds; results are averaged");
  sub->add_option("--ablate", c.ablate, "Feature groups to drop, comma-separated");
  sub->add_option("--only", c.only, "Keep only these feature groups");
  sub->add_option("--variant", c.variant, "singleton | multi | multi+any | any | singleton+any");
  sub->add_option("--target-source", c.target_source, "CT, ABC, CNN, WP, NPR, PF, TG, NYT, FC or ANY");
  sub->add_flag("--live", c.live, "Allow network access to the search service");
  sub->add_option("--out", c.out, "Output directory");
  sub->add_option("--threads", c.threads, "parallel | serial");
  sub->add_option("--set", c.sets, "Any config key: --set key=value")->take_all();
}

fc::ExperimentConfig build_config(const Common& c) {
  fc::ExperimentConfig cfg = c.config.empty() ? fc::ExperimentConfig()
                                              : fc::ExperimentConfig::load(c.config);
  for (const auto& kv : c.sets) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) throw fc::ConfigError("--set expects key=value, got '" + kv + "'");
    cfg.set(kv.substr(0, eq), kv.substr(eq + 1));
  }
  if (!c.task.empty()) cfg.set("task", c.task);
  if (!c.variant.empty()) cfg.set("variant", c.variant);
  if (!c.target_source.empty()) cfg.set("target_source", c.target_source);
  if (!c.ablate.empty()) cfg.set("ablate", c.ablate);
  if (!c.only.empty()) cfg.set("only", c.only);
  if (!c.out.empty()) cfg.set("out", c.out);
  if (!c.threads.empty()) cfg.set("threads", c.threads);
  if (c.seed) {
    cfg.set("seed", std::to_string(*c.seed));
    cfg.set("seeds", "");
  }
  if (!c.seeds.empty()) cfg.set("seeds", c.seeds);
  if (c.live) cfg.set("live", "true");
  return cfg;
}

void write_file(const fs::path& p, const std::string& body) {
  std::ofstream out(p, std::ios::binary);
  out << body;
  if (!out) throw fc::Error("cannot write '" + p.string() + "'");
}

fs::path prepare_out(const fc::ExperimentConfig& cfg, std::string_view command) {
  const fs::path dir = cfg.get("out");
  fs::create_directories(dir);
  write_file(dir / "manifest.json", fc::manifest_json(cfg, command));
  return dir;
}

// ---------------------------------------------------------------------------

int cmd_ingest(const std::string& debates, const std::string& cqa, const std::string& sidecar,
               const std::string& out) {
  if (debates.empty() == cqa.empty()) throw fc::ConfigError("ingest needs exactly one of --debates or --cqa");
  const std::optional<std::string> side = sidecar.empty() ? std::nullopt : std::optional(sidecar);
  fs::create_directories(out);
  ordered_json j;
  if (!debates.empty()) {
    const auto ds = fc::load_debates(debates, side);
    fc::save_debates((fs::path(out) / "debates.jsonl").string(), ds,
                     (fs::path(out) / "debates.sidecar.jsonl").string());
    std::size_t sentences = 0, positives = 0;
    ordered_json per = ordered_json::array();
    for (const auto& d : ds) {
      const auto c = fc::count_debate(d);
      sentences += c.sentences;
      positives += c.positives;
      ordered_json e;
      e["debate"] = d.id;
      e["sentences"] = c.sentences;
      e["positives"] = c.positives;
      for (std::size_t s = 0; s < fc::kNumSources; ++s) e[std::string(fc::kSourceNames[s])] = c.per_source[s];
      per.push_back(e);
      std::cout << d.id << ": " << c.sentences << " sentences, " << c.positives << " positive\n";
    }
    j["debates"] = per;
    j["sentences"] = sentences;
    j["positives"] = positives;
    std::cout << "total: " << sentences << " sentences, " << positives << " positive\n";
  } else {
    const auto ts = fc::load_cqa(cqa, side);
    fc::save_cqa((fs::path(out) / "cqa.jsonl").string(), ts);
    const auto c = fc::count_cqa(ts);
    j["threads"] = ts.size();
    j["factual"] = c.factual;
    j["opinion"] = c.opinion;
    j["socializing"] = c.socializing;
    j["excluded"] = c.excluded;
    j["positive"] = c.positive;
    j["negative"] = c.negative;
    j["labelled_threads"] = c.labelled_threads;
    std::cout << "questions: " << c.factual << " factual, " << c.opinion << " opinion, "
              << c.socializing << " socializing, " << c.excluded << " excluded\n"
              << "answers: " << c.positive << " positive, " << c.negative << " negative\n";
  }
  write_file(fs::path(out) / "counts.json", j.dump(2) + "\n");
  return 0;
}

int cmd_features(const fc::ExperimentConfig& cfg) {
  cfg.validate("features");
  const auto dir = prepare_out(cfg, "features");
  const auto res = fc::Resources::load(cfg);
  const auto m = fc::run_features(cfg, res);
  fc::save_feature_dump((dir / "features.tsv").string(), m);
  std::cout << m.rows() << " rows x " << m.cols() << " columns -> " << (dir / "features.tsv").string() << '\n';
  return 0;
}

int cmd_train(const fc::ExperimentConfig& cfg) {
  cfg.validate("train");
  const auto dir = prepare_out(cfg, "train");
  const auto res = fc::Resources::load(cfg);
  switch (cfg.task()) {
    case fc::Task::kCheckworthy: fc::train_checkworthy(cfg, res, dir.string()); break;
    case fc::Task::kCqaFactcheck: fc::train_cqa(cfg, res, dir.string()); break;
    case fc::Task::kQuestionClass:
      throw fc::ConfigError("train is not available for question_class; use eval");
  }
  std::cout << "model written to " << dir.string() << '\n';
  return 0;
}

int cmd_rank(const fc::ExperimentConfig& cfg) {
  cfg.validate("rank");
  if (cfg.task() != fc::Task::kCheckworthy) throw fc::ConfigError("rank needs task = checkworthy");
  const auto dir = prepare_out(cfg, "rank");
  const auto res = fc::Resources::load(cfg);
  const auto transcript = fc::load_transcript(cfg.get("transcript"));
  const auto ranked = fc::rank_transcript(cfg, res, cfg.get("model_dir"), transcript);
  std::ostringstream body;
  body << "rank\tid\tscore\tspeaker\ttext\n";
  for (std::size_t i = 0; i < ranked.size(); ++i) {
    const auto& r = ranked[i];
    body << i + 1 << '\t' << r.id << '\t' << fc::format_double(r.score) << '\t' << r.speaker << '\t'
         << r.text << '\n';
  }
  write_file(dir / "ranking.tsv", body.str());
  std::cout << ranked.size() << " sentences ranked -> " << (dir / "ranking.tsv").string() << '\n';
  return 0;
}

int cmd_eval(const fc::ExperimentConfig& cfg) {
  cfg.validate("eval");
  const auto dir = prepare_out(cfg, "eval");
  const auto res = fc::Resources::load(cfg);
  const auto rep = fc::run_eval(cfg, res);
  write_file(dir / "report.txt", rep.to_text());
  write_file(dir / "report.json", rep.to_json());
  std::cout << rep.to_text();
  return 0;
}

int cmd_fetch(const fc::ExperimentConfig& cfg) {
  cfg.validate("fetch-evidence");
  if (cfg.task() != fc::Task::kCqaFactcheck) throw fc::ConfigError("fetch-evidence needs task = cqa_factcheck");
  fs::create_directories(cfg.get("evidence_cache"));
  const auto dir = prepare_out(cfg, "fetch-evidence");
  const auto res = fc::Resources::load(cfg);
  std::optional<fc::HttpSearchClient> client;
  if (cfg.get_bool("live")) {
    client.emplace(cfg.get("search.host"), static_cast<int>(cfg.get_size("search.port")),
                   cfg.get("search.path"));
  }
  const auto s = fc::fetch_evidence(cfg, res, client ? &*client : nullptr);
  ordered_json j;
  j["mode"] = client ? "live" : "offline";
  j["lookups"] = s.lookups;
  j["with_results"] = s.with_results;
  j["misses"] = s.misses;
  j["failed"] = s.failed;
  write_file(dir / "coverage.json", j.dump(2) + "\n");
  std::cout << s.lookups << " lookups, " << s.with_results << " with results, " << s.misses
            << " not cached, " << s.failed << " failed\n";
  if (!client && s.misses > 0) std::cout << "rerun with --live to fill the cache\n";
  return s.failed > 0 ? 1 : 0;
}

int cmd_train_lda(const std::string& corpus, const std::string& stopwords, const std::string& out,
                  std::size_t topics, std::size_t iterations, std::uint64_t seed) {
  std::ifstream in(corpus);
  if (!in) throw fc::ConfigError("cannot open corpus '" + corpus + "'");
  std::vector<std::vector<std::string>> docs;
  std::string line;
  while (std::getline(in, line)) {
    auto w = fc::text::words(line);
    if (!w.empty()) docs.push_back(std::move(w));
  }
  fc::LdaOptions opt;
  opt.topics = topics;
  opt.iterations = iterations;
  opt.seed = seed;
  if (!stopwords.empty()) {
    std::ifstream sw(stopwords);
    if (!sw) throw fc::ConfigError("cannot open stopwords '" + stopwords + "'");
    while (std::getline(sw, line)) {
      if (!line.empty() && line[0] != '#') opt.stopwords.insert(fc::text::lower(line));
    }
  }
  opt.on_sweep = [&](const fc::SweepStats& s) {
    if ((s.sweep + 1) % 100 == 0) fc::log::info("sweep " + std::to_string(s.sweep + 1));
  };
  const auto model = fc::train_lda(docs, opt);
  fs::create_directories(fs::path(out).parent_path().empty() ? "." : fs::path(out).parent_path());
  model.save(out);
  std::cout << docs.size() << " documents, " << model.vocabulary_size() << " words, "
            << model.topics() << " topics -> " << out << '\n';
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Check-worthiness ranking and answer fact-checking"};
  app.require_subcommand(1);
  bool verbose = false, quiet = false;
  app.add_flag("-v,--verbose", verbose, "Progress messages on stderr");
  app.add_flag("-q,--quiet", quiet, "No warnings");

  std::string in_debates, in_cqa, in_sidecar, in_out = "corpus";
  auto* ingest = app.add_subcommand("ingest", "Validate a corpus, write it back normalized and count labels");
  ingest->add_option("--debates", in_debates, "Debate transcript (JSON lines)");
  ingest->add_option("--cqa", in_cqa, "cQA threads (JSON lines)");
  ingest->add_option("--sidecar", in_sidecar, "Token/POS/NE sidecar");
  ingest->add_option("--out", in_out, "Output directory");

  Common c_features, c_train, c_rank, c_eval, c_fetch;
  add_common(app.add_subcommand("features", "Dump the feature matrix"), c_features);
  add_common(app.add_subcommand("train", "Train on all data and save the model"), c_train);
  add_common(app.add_subcommand("rank", "Rank the sentences of a transcript"), c_rank);
  add_common(app.add_subcommand("eval", "Cross-validate and write a report"), c_eval);
  add_common(app.add_subcommand("fetch-evidence", "Fill or check the evidence cache"), c_fetch);

  std::string lda_corpus, lda_stop, lda_out = "topics.txt";
  std::size_t lda_topics = 300, lda_iters = 1000;
  std::uint64_t lda_seed = 1;
  auto* lda = app.add_subcommand("train-lda", "Train a topic model, one document per line");
  lda->add_option("--corpus", lda_corpus, "Text file, one document per line")->required();
  lda->add_option("--stopwords", lda_stop, "One stop word per line");
  lda->add_option("--topics", lda_topics, "Number of topics");
  lda->add_option("--iterations", lda_iters, "Gibbs sweeps");
  lda->add_option("--seed", lda_seed, "Sampler seed");
  lda->add_option("--out", lda_out, "Model file");

  CLI11_PARSE(app, argc, argv);
  if (verbose) fc::log::level() = fc::log::Level::kInfo;
  if (quiet) fc::log::level() = fc::log::Level::kQuiet;

  try {
    if (ingest->parsed()) return cmd_ingest(in_debates, in_cqa, in_sidecar, in_out);
    if (lda->parsed()) return cmd_train_lda(lda_corpus, lda_stop, lda_out, lda_topics, lda_iters, lda_seed);
    const auto* sub = app.get_subcommands().front();
    const std::string name = sub->get_name();
    if (name == "features") return cmd_features(build_config(c_features));
    if (name == "train") return cmd_train(build_config(c_train));
    if (name == "rank") return cmd_rank(build_config(c_rank));
    if (name == "eval") return cmd_eval(build_config(c_eval));
    if (name == "fetch-evidence") return cmd_fetch(build_config(c_fetch));
  } catch (const fc::ConfigError& e) {
    std::cerr << "configuration error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
