#include "factcheck/config.hpp"

#include <algorithm>
#include <charconv>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <json.hpp>

#include "factcheck/error.hpp"
#include "factcheck/eval.hpp"
#include "factcheck/evidence.hpp"
#include "factcheck/features_debate.hpp"
#include "factcheck/numfmt.hpp"
#include "factcheck/rng.hpp"

namespace fs = std::filesystem;

namespace fc {

namespace {

const std::map<std::string, std::string>& defaults() {
  static const std::map<std::string, std::string> d = {
      {"task", "checkworthy"},
      {"model", "ffnn"},
      {"variant", "singleton"},
      {"target_source", "ANY"},
      {"ablate", ""},
      {"only", ""},
      {"seed", "0"},
      {"seeds", ""},
      {"out", "out"},
      {"live", "false"},
      {"threads", "parallel"},
      // resources
      {"debates", ""},
      {"debates_sidecar", ""},
      {"cqa", ""},
      {"cqa_sidecar", ""},
      {"lexicons", ""},
      {"vectors", ""},
      {"cqa_vectors", ""},
      {"topics", ""},
      {"debate_discourse", ""},
      {"cqa_discourse", ""},
      {"relations", ""},
      {"hq_posts", ""},
      {"evidence_cache", ""},
      {"external_claims", ""},
      {"source_list", ""},
      {"transcript", ""},
      {"model_dir", ""},
      // debate layout
      {"topic_slots", "300"},
      {"embedding_slots", "300"},
      {"bow_slots", "998"},
      {"tfidf.slots", "5000"},
      {"tfidf.c", "1"},
      // models
      {"ffnn.hidden", "200,50"},
      {"ffnn.epochs", "300"},
      {"ffnn.batch", "550"},
      {"ffnn.learning_rate", "0.04"},
      {"ffnn.l2", "0.0001"},
      {"ffnn.momentum", "0.9"},
      {"multitask.shared", "300"},
      {"multitask.task_hidden", "300"},
      {"multitask.epochs", "100"},
      {"multitask.batch", "500"},
      {"multitask.learning_rate", "0.08"},
      {"multitask.momentum", "0.7"},
      {"bilstm", "true"},
      {"bilstm.units", "25"},
      {"bilstm.joint", "60"},
      {"bilstm.epochs", "400"},
      {"bilstm.batch", "32"},
      {"bilstm.learning_rate", "0.001"},
      {"bilstm.max_len", "100"},
      {"svm.c_grid", ""},
      {"svm.gamma_grid", ""},
      {"svm.folds", "5"},
      {"qc.folds", "10"},
      // cQA features
      {"cqa.hq_k", "4"},
      {"cqa.web_engines", "google,bing"},
      {"cqa.forum_engine", "forum"},
      {"cqa.web_cells", "source_copies"},
      {"cqa.forum_cells", "unfiltered"},
      // evidence
      {"search.host", "localhost"},
      {"search.port", "8080"},
      {"search.path", "/search"},
      {"search.results", "10"},
      // topic model training
      {"lda.topics", "300"},
      {"lda.iterations", "1000"},
  };
  return d;
}

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

bool path_key(const std::string& key) {
  const auto& keys = ExperimentConfig::path_keys();
  return std::find(keys.begin(), keys.end(), key) != keys.end() || key == "out";
}

std::vector<double> parse_grid(const std::vector<std::string>& items) {
  std::vector<double> out;
  for (const auto& s : items) out.push_back(parse_double(s));
  return out;
}

}  // namespace

Task task_from_name(std::string_view name) {
  if (name == "checkworthy") return Task::kCheckworthy;
  if (name == "cqa_factcheck") return Task::kCqaFactcheck;
  if (name == "question_class") return Task::kQuestionClass;
  throw ConfigError("unknown task '" + std::string(name) +
                    "' (expected checkworthy, cqa_factcheck or question_class)");
}

std::string_view to_string(Task t) {
  switch (t) {
    case Task::kCheckworthy: return "checkworthy";
    case Task::kCqaFactcheck: return "cqa_factcheck";
    case Task::kQuestionClass: return "question_class";
  }
  return "?";
}

std::size_t label_column(std::string_view name) {
  if (name == "ANY" || name == "any") return kAnyColumn;
  if (auto s = source_from_name(name)) return static_cast<std::size_t>(*s);
  throw ConfigError("unknown source '" + std::string(name) + "'");
}

const std::vector<std::string>& ExperimentConfig::path_keys() {
  static const std::vector<std::string> keys = {
      "debates",        "debates_sidecar", "cqa",           "cqa_sidecar",     "lexicons",
      "vectors",        "cqa_vectors",     "topics",        "debate_discourse", "cqa_discourse",
      "relations",      "hq_posts",        "evidence_cache", "external_claims", "source_list",
      "transcript",     "model_dir"};
  return keys;
}

ExperimentConfig::ExperimentConfig() : values_(defaults()) {}

void ExperimentConfig::set(const std::string& key, const std::string& value) {
  auto it = values_.find(key);
  if (it == values_.end()) throw ConfigError("unknown config key '" + key + "'");
  it->second = value;
}

const std::string& ExperimentConfig::get(const std::string& key) const {
  auto it = values_.find(key);
  if (it == values_.end()) throw ConfigError("unknown config key '" + key + "'");
  return it->second;
}

double ExperimentConfig::get_double(const std::string& key) const {
  try {
    return parse_double(get(key));
  } catch (const ParseError&) {
    throw ConfigError("config key '" + key + "' is not a number: '" + get(key) + "'");
  }
}

std::size_t ExperimentConfig::get_size(const std::string& key) const {
  const auto& v = get(key);
  std::size_t out = 0;
  auto [p, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
  if (v.empty() || ec != std::errc{} || p != v.data() + v.size()) {
    throw ConfigError("config key '" + key + "' is not a non-negative integer: '" + v + "'");
  }
  return out;
}

bool ExperimentConfig::get_bool(const std::string& key) const {
  const auto& v = get(key);
  if (v == "true" || v == "on" || v == "yes" || v == "1") return true;
  if (v == "false" || v == "off" || v == "no" || v == "0") return false;
  throw ConfigError("config key '" + key + "' is not a boolean: '" + v + "'");
}

std::vector<std::string> ExperimentConfig::get_list(const std::string& key) const {
  std::vector<std::string> out;
  std::stringstream ss(get(key));
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

ExperimentConfig ExperimentConfig::parse(std::istream& in, const std::string& base_dir) {
  ExperimentConfig cfg;
  std::string line;
  std::size_t n = 0;
  while (std::getline(in, line)) {
    ++n;
    if (auto h = line.find('#'); h != std::string::npos) line.erase(h);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ParseError("expected 'key = value'", n);
    const std::string key = trim(std::string_view(line).substr(0, eq));
    std::string value = trim(std::string_view(line).substr(eq + 1));
    if (!cfg.values_.count(key)) {
      throw ConfigError("unknown config key '" + key + "' (line " + std::to_string(n) + ")");
    }
    if (path_key(key) && !value.empty() && !base_dir.empty() && fs::path(value).is_relative()) {
      value = (fs::path(base_dir) / value).lexically_normal().string();
    }
    cfg.values_[key] = value;
  }
  return cfg;
}

ExperimentConfig ExperimentConfig::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config '" + path + "'");
  const std::string base = fs::path(path).parent_path().string();
  if ((in >> std::ws).peek() == '{') {
    nlohmann::json j;
    try {
      in >> j;
    } catch (const nlohmann::json::exception& e) {
      throw ParseError("manifest '" + path + "': " + e.what());
    }
    if (!j.contains("config") || !j["config"].is_object()) {
      throw SchemaError("manifest '" + path + "' has no config object");
    }
    ExperimentConfig cfg;
    for (auto& [k, v] : j["config"].items()) {
      if (!v.is_string()) throw SchemaError("manifest config values must be strings");
      cfg.set(k, v.get<std::string>());
    }
    return cfg;
  }
  return parse(in, base);
}

std::vector<std::uint64_t> ExperimentConfig::seeds() const {
  std::vector<std::uint64_t> out;
  for (const auto& s : get_list("seeds")) {
    std::uint64_t v = 0;
    auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc{} || p != s.data() + s.size()) {
      throw ConfigError("bad seed '" + s + "'");
    }
    out.push_back(v);
  }
  if (out.empty()) out.push_back(get_size("seed"));
  return out;
}

FfnnConfig ExperimentConfig::ffnn() const {
  FfnnConfig c;
  c.hidden.clear();
  for (const auto& h : get_list("ffnn.hidden")) c.hidden.push_back(std::stoul(h));
  c.epochs = get_size("ffnn.epochs");
  c.batch = get_size("ffnn.batch");
  c.learning_rate = get_double("ffnn.learning_rate");
  c.l2 = get_double("ffnn.l2");
  c.momentum = get_double("ffnn.momentum");
  return c;
}

MultiTaskConfig ExperimentConfig::multitask() const {
  MultiTaskConfig base;
  base.shared = get_size("multitask.shared");
  base.task_hidden = get_size("multitask.task_hidden");
  base.epochs = get_size("multitask.epochs");
  base.batch = get_size("multitask.batch");
  base.learning_rate = get_double("multitask.learning_rate");
  base.momentum = get_double("multitask.momentum");
  const auto kind = multitask_variant_from_name(get("variant"));
  const auto col = label_column(get("target_source"));
  if (col != kAnyColumn) return variant(kind, static_cast<Source>(col), base);
  switch (kind) {
    case MultiTaskVariant::kSingleton:
    case MultiTaskVariant::kAny:
      return variant(MultiTaskVariant::kAny, Source::kCT, base);
    case MultiTaskVariant::kMultiAny: {
      auto c = variant(kind, Source::kCT, base);
      c.score_task = c.tasks.size() - 1;
      return c;
    }
    default:
      throw ConfigError("variant '" + get("variant") + "' needs a single target source, not ANY");
  }
}

BilstmConfig ExperimentConfig::bilstm(std::size_t embedding_dim,
                                      std::size_t similarity_features) const {
  BilstmConfig c;
  c.embedding_dim = embedding_dim;
  c.similarity_features = similarity_features;
  c.units = get_size("bilstm.units");
  c.joint = get_size("bilstm.joint");
  c.epochs = get_size("bilstm.epochs");
  c.batch = get_size("bilstm.batch");
  c.learning_rate = get_double("bilstm.learning_rate");
  c.max_len = get_size("bilstm.max_len");
  return c;
}

SvmGrid ExperimentConfig::svm_grid() const {
  SvmGrid g = SvmGrid::standard();
  if (has("svm.c_grid")) g.cs = parse_grid(get_list("svm.c_grid"));
  if (has("svm.gamma_grid")) g.gammas = parse_grid(get_list("svm.gamma_grid"));
  g.folds = get_size("svm.folds");
  return g;
}

std::string ExperimentConfig::canonical() const {
  std::string out;
  for (const auto& [k, v] : values_) out += k + " = " + v + "\n";
  return out;
}

std::uint64_t ExperimentConfig::hash() const { return fnv1a(canonical()); }

void ExperimentConfig::validate(std::string_view command) const {
  const Task t = task();
  const std::string model = get("model");
  const bool is_baseline = model == "random" || model == "tfidf_svm_rank" || model == "majority";
  if (t == Task::kCheckworthy) {
    if (model != "ffnn" && model != "multitask" && model != "random" && model != "tfidf_svm_rank") {
      throw ConfigError("model '" + model + "' is not available for checkworthy "
                        "(ffnn, multitask, random, tfidf_svm_rank)");
    }
    if (model == "multitask") multitask();
    label_column(get("target_source"));
    DebateLayout layout(get_size("topic_slots"), get_size("embedding_slots"),
                        get_size("bow_slots"));
    layout.mask(get_list("ablate"), get_list("only"));
  } else if (t == Task::kCqaFactcheck) {
    if (model != "svm" && model != "majority" && model != "random") {
      throw ConfigError("model '" + model + "' is not available for cqa_factcheck (svm, majority, random)");
    }
    static const std::vector<std::string> groups = {
        "thread_support", "forum_support", "hq_support", "web_support", "credibility",
        "linguistic",     "discourse",     "embeddings", "context"};
    for (const auto& key : {"ablate", "only"}) {
      for (const auto& g : get_list(key)) {
        if (std::find(groups.begin(), groups.end(), g) == groups.end()) {
          throw ConfigError("unknown cQA feature group '" + g + "' in " + key);
        }
      }
    }
    BundleSelection::by_name(get("cqa.web_cells"));
    BundleSelection::by_name(get("cqa.forum_cells"));
  } else {
    if (model != "svm" && model != "majority") {
      throw ConfigError("model '" + model + "' is not available for question_class (svm, majority)");
    }
  }
  if (model == "ffnn") ffnn();
  seeds();
  svm_grid();
  get_bool("live");
  get_bool("bilstm");

  std::vector<std::string> required;
  required.push_back(t == Task::kCheckworthy ? "debates" : "cqa");
  if (!is_baseline && (command == "features" || command == "train" || command == "eval" ||
                       command == "rank")) {
    if (t != Task::kQuestionClass) required.push_back("lexicons");
  }
  if (command == "rank") {
    required.push_back("transcript");
    required.push_back("model_dir");
  }
  if (command == "fetch-evidence") required.push_back("evidence_cache");
  for (const auto& k : required) {
    if (!has(k)) throw ConfigError("config key '" + k + "' must be set for " + std::string(command));
  }
  for (const auto& k : path_keys()) {
    if (!has(k)) continue;
    if (k == "evidence_cache" && command == "fetch-evidence") continue;
    if (!fs::exists(get(k))) {
      throw ConfigError("config key '" + k + "' points to '" + get(k) + "', which does not exist");
    }
  }
}

}  // namespace fc
