// One PASS/FAIL/SKIP line per acceptance criterion. Exit status is nonzero
// when any criterion fails. Dataset criteria need FACTCHECK_DATA_DIR.

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <numeric>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "factcheck/config.hpp"
#include "factcheck/discourse.hpp"
#include "factcheck/error.hpp"
#include "factcheck/eval.hpp"
#include "factcheck/features_cqa.hpp"
#include "factcheck/features_debate.hpp"
#include "factcheck/log.hpp"
#include "factcheck/models/bilstm.hpp"
#include "factcheck/models/ffnn.hpp"
#include "factcheck/models/multitask.hpp"
#include "factcheck/models/svm.hpp"
#include "factcheck/pipeline.hpp"
#include "factcheck/rng.hpp"
#include "factcheck/text.hpp"
#include "factcheck/topics.hpp"
#include "synthetic.hpp"

using namespace fc;
namespace fs = std::filesystem;

namespace {

// tolerances
constexpr double kGradTol = 1e-4;
constexpr double kRecurrentGradTol = 1e-3;
constexpr double kKktTol = 1e-3;
constexpr double kLdaSumTol = 1e-6;
constexpr double kLdaDominant = 0.8;
constexpr double kMajorityTol = 0.001;
constexpr double kRandomMapTol = 0.05;
constexpr double kTfidfMargin = 0.05;
constexpr double kMetricSeconds = 10.0;
constexpr double kGradientSeconds = 60.0;

enum class Status { kPass, kFail, kSkip };

struct Outcome {
  Status status = Status::kPass;
  std::string detail;
};

Outcome pass(std::string d = "") { return {Status::kPass, std::move(d)}; }
Outcome fail(std::string d) { return {Status::kFail, std::move(d)}; }
Outcome skip(std::string d) { return {Status::kSkip, std::move(d)}; }
Outcome check(bool ok, std::string d) { return {ok ? Status::kPass : Status::kFail, std::move(d)}; }

std::string num(double v, int prec = 4) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*g", prec, v);
  return buf;
}

int failures = 0;

void run(const std::string& name, const std::function<Outcome()>& body) {
  const auto t0 = std::chrono::steady_clock::now();
  Outcome o;
  try {
    o = body();
  } catch (const std::exception& e) {
    o = fail(std::string("exception: ") + e.what());
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  const char* tag = o.status == Status::kPass ? "PASS" : o.status == Status::kFail ? "FAIL" : "SKIP";
  if (o.status == Status::kFail) ++failures;
  std::printf("%s  %-34s %7.2fs  %s\n", tag, name.c_str(), secs, o.detail.c_str());
  std::fflush(stdout);
}

double elapsed(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

std::vector<std::size_t> all_indices(std::size_t n) {
  std::vector<std::size_t> v(n);
  std::iota(v.begin(), v.end(), 0);
  return v;
}

std::vector<double> random_rows(std::size_t n, std::size_t d, std::uint64_t seed) {
  Rng rng(seed);
  std::vector<double> x(n * d);
  for (auto& v : x) v = rng.normal();
  return x;
}

// ---------------------------------------------------------------------------
// metrics

double ap_oracle(const std::vector<std::uint8_t>& l) {
  double sum = 0;
  int rel = 0;
  for (std::size_t end = 1; end <= l.size(); ++end) {
    if (!l[end - 1]) continue;
    int hits = 0;
    for (std::size_t i = 0; i < end; ++i) hits += l[i];
    sum += double(hits) / double(end);
    ++rel;
  }
  return rel ? sum / rel : 0.0;
}

Outcome metric_oracle() {
  const auto t0 = std::chrono::steady_clock::now();
  std::size_t lists = 0;
  for (unsigned n = 1; n <= 12; ++n) {
    for (unsigned mask = 0; mask < (1u << n); ++mask) {
      std::vector<std::uint8_t> l(n);
      int R = 0;
      for (unsigned i = 0; i < n; ++i) R += l[i] = (mask >> i) & 1u;
      if (std::abs(average_precision(l) - ap_oracle(l)) > 1e-12) return fail("AP differs at n=" + std::to_string(n));
      int top = 0;
      for (int i = 0; i < R; ++i) top += l[i];
      const double rp = R ? double(top) / R : 0.0;
      if (r_precision(l) != rp) return fail("R-Pr differs at n=" + std::to_string(n));
      int hits = 0;
      for (std::size_t k = 1; k <= n; ++k) {
        hits += l[k - 1];
        if (std::abs(precision_at_k(l, k) - double(hits) / double(k)) > 1e-15) {
          return fail("P@k differs at n=" + std::to_string(n));
        }
      }
      ++lists;
    }
  }
  const double secs = elapsed(t0);
  return check(secs < kMetricSeconds, std::to_string(lists) + " lists in " + num(secs, 3) + "s");
}

// ---------------------------------------------------------------------------
// gradients

double ffnn_gradient() {
  FfnnConfig cfg;
  cfg.hidden = {6, 4};
  cfg.l2 = 0.01;
  cfg.seed = 3;
  Ffnn net(5, cfg);
  const auto x = random_rows(9, 5, 1);
  std::vector<std::uint8_t> y(9);
  for (std::size_t i = 0; i < 9; ++i) y[i] = x[5 * i] > 0;
  std::vector<double> grad(net.params().size());
  net.loss_and_gradient(x, y, 9, grad);
  auto loss = [&](std::span<const double> p) {
    Ffnn copy = net;
    std::copy(p.begin(), p.end(), copy.params().begin());
    return copy.loss_and_gradient(x, y, 9, {});
  };
  const std::vector<double> p0(net.params().begin(), net.params().end());
  return nn::gradient_check(p0, grad, loss, all_indices(p0.size()));
}

double multitask_gradient() {
  auto cfg = variant(MultiTaskVariant::kMultiAny, Source::kCT);
  cfg.shared = 5;
  cfg.task_hidden = 3;
  cfg.seed = 2;
  MultiTaskNet net(4, cfg);
  const auto x = random_rows(8, 4, 5);
  Rng rng(6);
  std::vector<std::uint8_t> labels(8 * 10);
  for (auto& l : labels) l = rng.uniform() < 0.4;
  std::vector<double> grad(net.params().size());
  net.loss_and_gradient(x, labels, 10, 8, grad);
  auto loss = [&](std::span<const double> p) {
    MultiTaskNet copy = net;
    std::copy(p.begin(), p.end(), copy.params().begin());
    return copy.loss_and_gradient(x, labels, 10, 8, {});
  };
  const std::vector<double> p0(net.params().begin(), net.params().end());
  return nn::gradient_check(p0, grad, loss, all_indices(p0.size()));
}

double bilstm_gradient() {
  BilstmConfig cfg;
  cfg.embedding_dim = 3;
  cfg.units = 2;
  cfg.similarity_features = 2;
  cfg.joint = 4;
  cfg.seed = 8;
  BilstmStack net(cfg);
  Rng rng(12);
  std::vector<BilstmExample> batch;
  for (int i = 0; i < 3; ++i) {
    BilstmExample ex;
    for (std::size_t b = 0; b < kBranches; ++b) {
      ex.sequences[b].resize((b == 4 ? 0 : 2 + b % 2) * 3);
      for (auto& v : ex.sequences[b]) v = rng.normal();
    }
    ex.similarity = {rng.uniform(), rng.uniform()};
    ex.label = static_cast<std::uint8_t>(i % 2);
    batch.push_back(std::move(ex));
  }
  std::vector<double> grad(net.params().size());
  net.loss_and_gradient(batch, grad);
  auto loss = [&](std::span<const double> q) {
    BilstmStack copy = net;
    std::copy(q.begin(), q.end(), copy.params().begin());
    return copy.loss_and_gradient(batch, {});
  };
  const std::vector<double> p0(net.params().begin(), net.params().end());
  return nn::gradient_check(p0, grad, loss, all_indices(p0.size()), 1e-5);
}

Outcome gradients() {
  const auto t0 = std::chrono::steady_clock::now();
  const double f = ffnn_gradient();
  const double m = multitask_gradient();
  const double b = bilstm_gradient();
  const double secs = elapsed(t0);
  const std::string d = "ffnn " + num(f, 3) + ", multitask " + num(m, 3) + ", bilstm " + num(b, 3) +
                        " in " + num(secs, 3) + "s";
  return check(f < kGradTol && m < kGradTol && b < kRecurrentGradTol && secs < kGradientSeconds, d);
}

// ---------------------------------------------------------------------------
// multi-task structure

Outcome multitask_structure() {
  auto cfg = variant(MultiTaskVariant::kMultiAny, Source::kPF);
  cfg.shared = 6;
  cfg.task_hidden = 4;
  cfg.epochs = 1;
  cfg.batch = 8;
  cfg.l2 = 0.0;
  cfg.seed = 9;
  const std::size_t frozen = 3;
  cfg.task_weights.assign(cfg.tasks.size(), 1.0);
  cfg.task_weights[frozen] = 0.0;
  const std::size_t n = 40, cols = 5;
  const auto x = random_rows(n, cols, 21);
  Rng rng(22);
  std::vector<std::uint8_t> labels(n * 10);
  for (auto& l : labels) l = rng.uniform() < 0.3;

  const MultiTaskNet before(cols, cfg);
  if (before.heads() != 10) return fail(std::to_string(before.heads()) + " heads");
  const auto out = before.predict(x, n);
  if (out.size() != n * 10) return fail("output is not n x 10");
  for (double p : out) {
    if (!(p > 0.0 && p < 1.0)) return fail("head output outside (0, 1)");
  }
  const auto after = train_multitask(x, cols, labels, 10, cfg);

  auto delta = [&](std::pair<std::size_t, std::size_t> r) {
    double d = 0;
    for (std::size_t i = r.first; i < r.second; ++i) d = std::max(d, std::abs(after.params()[i] - before.params()[i]));
    return d;
  };
  const double head = delta(before.head_range(frozen));
  const double shared = delta(before.shared_range());
  double others = 0;
  for (std::size_t t = 0; t < 10; ++t) {
    if (t != frozen) others = std::min(others == 0 ? 1e300 : others, delta(before.head_range(t)));
  }
  return check(head == 0.0 && shared > 0.0 && others > 0.0,
               "10 heads; frozen head delta " + num(head) + ", shared delta " + num(shared) +
                   ", smallest other head delta " + num(others));
}

// ---------------------------------------------------------------------------
// svm

Outcome svm_separable() {
  std::vector<double> x;
  std::vector<std::uint8_t> y;
  Rng rng(31);
  for (int i = 0; i < 60; ++i) {
    const bool pos = i % 2;
    x.push_back((pos ? 2.5 : -2.5) + 0.6 * rng.normal());
    x.push_back(rng.normal());
    y.push_back(pos);
  }
  SvmConfig cfg;
  cfg.c = 10;
  cfg.gamma = 0.5;
  const auto fit = train_svm_rbf(x, 2, y, cfg);
  const auto pred = fit.model.predict(x, 60);
  std::size_t right = 0;
  for (std::size_t i = 0; i < 60; ++i) right += pred[i] == y[i];
  const double acc = right / 60.0;
  const double kkt = kkt_violation(x, 2, y, fit.alpha, fit.model.bias(), cfg.c, cfg.gamma);
  return check(acc == 1.0 && kkt < kKktTol, "train accuracy " + num(acc) + ", KKT " + num(kkt, 3));
}

Outcome svm_grid() {
  // concentric rings: tiny gamma cannot separate them, moderate gamma can
  std::vector<double> x;
  std::vector<std::uint8_t> y;
  Rng rng(41);
  for (int i = 0; i < 80; ++i) {
    const bool pos = i % 2;
    const double r = pos ? 3.0 + 0.2 * rng.normal() : 0.8 * rng.uniform();
    const double a = 6.283185307179586 * rng.uniform();
    x.push_back(r * std::cos(a));
    x.push_back(r * std::sin(a));
    y.push_back(pos);
  }
  SvmGrid grid;
  grid.cs = {0.01, 1.0, 10.0};
  grid.gammas = {1e-4, 0.5};
  grid.folds = 4;
  grid.seed = 3;
  const auto res = grid_search_svm(x, 2, y, grid);
  if (res.table.size() != 6) return fail("grid table has " + std::to_string(res.table.size()) + " points");
  std::size_t best = 0;
  for (std::size_t i = 1; i < res.table.size(); ++i) {
    if (res.table[i].accuracy > res.table[best].accuracy) best = i;
  }
  const auto& b = res.table[best];
  const bool same = b.c == res.best.c && b.gamma == res.best.gamma && b.accuracy == res.best.accuracy;
  return check(same && res.best.gamma == 0.5 && res.best.accuracy > 0.95,
               "best C=" + num(res.best.c) + " gamma=" + num(res.best.gamma) + " accuracy " +
                   num(res.best.accuracy));
}

// ---------------------------------------------------------------------------
// feature contracts

Outcome debate_contract() {
  const DebateLayout layout;
  const std::array<std::size_t, kNumDebateGroups> sizes = {3, 3, 8, 303, 303, 5, 3, 20, 1045, 2, 1, 13, 1, 1};
  std::string bad;
  for (std::size_t g = 0; g < kNumDebateGroups; ++g) {
    if (layout.size(static_cast<DebateGroup>(g)) != sizes[g]) bad += " " + std::string(kDebateGroupNames[g]);
  }
  if (!bad.empty()) return fail("group sizes differ:" + bad);

  const auto debates = testing::make_debates({2, 40, 0.3, 5});
  const auto vectors = testing::make_vectors();
  const auto lex = testing::lexicons();
  std::vector<std::vector<std::string>> docs;
  for (const auto& d : debates) {
    for (const auto& s : d.sentences) docs.push_back(text::words(s.text));
  }
  LdaOptions lo;
  lo.topics = 5;
  lo.iterations = 20;
  const auto topics = train_lda(docs, lo);
  const auto vocab = Vocabulary::fit(docs, 998);
  const auto refs = reference_sentences(debates);
  DebateResources res;
  res.lexicons = &lex;
  res.vocabulary = &vocab;
  res.vectors = &vectors;
  res.topics = &topics;
  res.training_refs = refs;
  log::level() = log::Level::kQuiet;
  const auto m = extract_debate_features(debates, res, layout);
  log::level() = log::Level::kWarn;
  if (m.cols() != 1711) return fail("row length " + std::to_string(m.cols()));

  std::size_t checked = 0;
  for (const char* group : {"discourse", "context", "topics", "claimbuster", "metadata"}) {
    const std::vector<std::string> ablate = {group};
    auto masked = m;
    apply_mask(masked, layout.mask(ablate));
    std::vector<std::uint8_t> in(m.cols(), 0);
    for (auto c : layout.columns_of(group)) in[c] = 1;
    for (std::size_t r = 0; r < m.rows(); ++r) {
      for (std::size_t c = 0; c < m.cols(); ++c) {
        const bool ok = in[c] ? masked.row(r)[c] == 0.0 : masked.row(r)[c] == m.row(r)[c];
        if (!ok) return fail(std::string("ablating ") + group + " touched column " + m.columns[c]);
      }
    }
    ++checked;
  }
  return pass("1711 columns, 14 group sizes, " + std::to_string(checked) + " ablations exact");
}

Outcome small_contracts() {
  const auto tree = RstTree::join(5, NucleusSide::kLeft, RstTree::leaf(1, {0, 1}), RstTree::leaf(2, {1, 2}));
  const auto disc = discourse_features(tree, 1);
  const auto threads = testing::make_cqa();
  const auto cred = credibility_features(threads[0].answers[0]);
  const auto support = thread_support(threads[0], 0, nullptr);
  return check(disc.size() == 20 && cred.size() == 31 && support.size() == 5 && kCredibilityNames.size() == 31,
               "discourse " + std::to_string(disc.size()) + ", credibility " + std::to_string(cred.size()) +
                   ", thread support " + std::to_string(support.size()));
}

// ---------------------------------------------------------------------------
// lda

std::vector<std::vector<std::string>> two_clusters() {
  std::vector<std::vector<std::string>> docs;
  const std::vector<std::string> a = {"tax", "budget", "deficit", "economy", "jobs"};
  const std::vector<std::string> b = {"army", "war", "troops", "border", "missile"};
  for (int d = 0; d < 8; ++d) {
    std::vector<std::string> doc;
    for (int i = 0; i < 200; ++i) doc.push_back((d % 2 ? b : a)[(i * 7 + d) % 5]);
    docs.push_back(doc);
  }
  return docs;
}

Outcome lda() {
  const auto docs = two_clusters();
  LdaOptions opt;
  opt.topics = 2;
  opt.iterations = 300;
  opt.seed = 7;
  const auto m1 = train_lda(docs, opt);
  const auto m2 = train_lda(docs, opt);
  std::ostringstream s1, s2;
  m1.save(s1);
  m2.save(s2);
  const bool same = m1 == m2 && s1.str() == s2.str();

  double worst_sum = 0, min_dominant = 1;
  std::array<int, 2> dominant_of{-1, -1};
  bool separated = true;
  for (std::size_t d = 0; d < m1.training_documents(); ++d) {
    const auto dist = m1.training_distribution(d);
    worst_sum = std::max(worst_sum, std::abs(std::accumulate(dist.begin(), dist.end(), 0.0) - 1.0));
    const auto top = static_cast<int>(std::max_element(dist.begin(), dist.end()) - dist.begin());
    min_dominant = std::min(min_dominant, dist[top]);
    auto& slot = dominant_of[d % 2];
    if (slot < 0) slot = top;
    separated = separated && slot == top;
  }
  separated = separated && dominant_of[0] != dominant_of[1];
  const std::vector<std::string> probe = {"tax", "budget", "jobs"};
  const auto inferred = m1.infer(probe);
  worst_sum = std::max(worst_sum, std::abs(inferred[0] + inferred[1] - 1.0));
  return check(same && separated && worst_sum < kLdaSumTol && min_dominant > kLdaDominant,
               std::string(same ? "bit-exact rerun" : "reruns differ") + ", max |sum-1| " + num(worst_sum, 3) +
                   ", min dominant mass " + num(min_dominant, 3) + (separated ? "" : ", clusters merged"));
}

// ---------------------------------------------------------------------------
// determinism

Outcome determinism() {
  log::level() = log::Level::kQuiet;
  testing::TempDir dir("fc-accept");
  const auto fx = testing::write_fixture(dir.str("fixture"));
  auto cfg = ExperimentConfig::load(fx.checkworthy_config);
  cfg.set("ffnn.epochs", "5");
  const std::string manifest = dir.str("manifest.json");
  {
    std::ofstream out(manifest);
    out << manifest_json(cfg, "eval");
  }
  const auto a = run_eval(ExperimentConfig::load(manifest), Resources::load(ExperimentConfig::load(manifest)));
  const auto b = run_eval(ExperimentConfig::load(manifest), Resources::load(ExperimentConfig::load(manifest)));
  const auto cqa = ExperimentConfig::load(fx.cqa_config);
  const auto c = run_eval(cqa, Resources::load(cqa));
  const auto d = run_eval(cqa, Resources::load(cqa));
  log::level() = log::Level::kWarn;
  const bool ok = a.to_json() == b.to_json() && a.to_text() == b.to_text() && c.to_json() == d.to_json();
  return check(ok, ok ? "checkworthy and cqa reports byte-identical" : "reports differ between runs");
}

// ---------------------------------------------------------------------------
// dataset criteria

struct Data {
  std::string dir;
  std::optional<ExperimentConfig> checkworthy;
  std::optional<ExperimentConfig> cqa;
};

Data find_data() {
  Data d;
  const char* env = std::getenv("FACTCHECK_DATA_DIR");
  if (!env || !*env) return d;
  d.dir = env;
  if (fs::exists(d.dir + "/checkworthy.cfg")) d.checkworthy = ExperimentConfig::load(d.dir + "/checkworthy.cfg");
  if (fs::exists(d.dir + "/cqa.cfg")) d.cqa = ExperimentConfig::load(d.dir + "/cqa.cfg");
  return d;
}

const char* kNoData = "FACTCHECK_DATA_DIR not set";

Outcome debate_counts(const Data& data) {
  if (!data.checkworthy) return skip(data.dir.empty() ? kNoData : "no checkworthy.cfg in data dir");
  const auto res = Resources::load(*data.checkworthy);
  std::size_t sentences = 0, positives = 0;
  std::string per;
  for (const auto& d : res.debates) {
    const auto c = count_debate(d);
    sentences += c.sentences;
    positives += c.positives;
    per += (per.empty() ? "" : "/") + std::to_string(c.positives);
  }
  return check(sentences == 5415 && positives == 880 && per == "218/235/183/244",
               std::to_string(sentences) + " sentences, " + std::to_string(positives) + " positive, per debate " + per);
}

Outcome cqa_counts(const Data& data) {
  if (!data.cqa) return skip(data.dir.empty() ? kNoData : "no cqa.cfg in data dir");
  const auto res = Resources::load(*data.cqa);
  const auto c = count_cqa(res.threads);
  return check(c.factual == 373 && c.opinion == 689 && c.socializing == 295 && c.positive == 128 && c.negative == 121,
               "questions " + std::to_string(c.factual) + "/" + std::to_string(c.opinion) + "/" +
                   std::to_string(c.socializing) + ", answers " + std::to_string(c.positive) + "/" +
                   std::to_string(c.negative));
}

Outcome majority(const Data& data) {
  if (!data.cqa) return skip(data.dir.empty() ? kNoData : "no cqa.cfg in data dir");
  auto cfg = *data.cqa;
  cfg.set("model", "majority");
  const auto r = eval_cqa(cfg, Resources::load(cfg));
  const auto& m = r.mean;
  return check(std::abs(m.accuracy - 0.514) <= kMajorityTol && std::abs(m.recall - 1.0) <= kMajorityTol &&
                   std::abs(m.f1 - 0.679) <= kMajorityTol,
               "accuracy " + num(m.accuracy) + ", recall " + num(m.recall) + ", F1 " + num(m.f1));
}

std::string seed_list(int n) {
  std::string s;
  for (int i = 1; i <= n; ++i) s += (i > 1 ? "," : "") + std::to_string(i);
  return s;
}

Outcome random_map(const Data& data) {
  if (!data.checkworthy) return skip(data.dir.empty() ? kNoData : "no checkworthy.cfg in data dir");
  auto cfg = *data.checkworthy;
  cfg.set("model", "random");
  cfg.set("seeds", seed_list(100));
  const auto r = eval_checkworthy(cfg, Resources::load(cfg));
  return check(std::abs(r.mean.map - 0.164) <= kRandomMapTol, "MAP " + num(r.mean.map) + " over 100 seeds");
}

Outcome checkworthy_direction(const Data& data) {
  if (!data.checkworthy) return skip(data.dir.empty() ? kNoData : "no checkworthy.cfg in data dir");
  const auto res = Resources::load(*data.checkworthy);
  auto full = *data.checkworthy;
  full.set("model", "ffnn");
  full.set("ablate", "");
  auto tfidf = *data.checkworthy;
  tfidf.set("model", "tfidf_svm_rank");
  auto noctx = full;
  noctx.set("ablate", "context");
  const double all = eval_checkworthy(full, res).mean.map;
  const double base = eval_checkworthy(tfidf, res).mean.map;
  const double without = eval_checkworthy(noctx, res).mean.map;
  return check(all >= base + kTfidfMargin && without < all,
               "All " + num(all) + ", TF-IDF " + num(base) + ", All without context " + num(without));
}

Outcome multitask_direction(const Data& data) {
  if (!data.checkworthy) return skip(data.dir.empty() ? kNoData : "no checkworthy.cfg in data dir");
  const auto res = Resources::load(*data.checkworthy);
  double single = 0, multi = 0;
  for (auto name : kSourceNames) {
    auto cfg = *data.checkworthy;
    cfg.set("model", "multitask");
    cfg.set("seeds", "1,2,3");
    cfg.set("target_source", std::string(name));
    cfg.set("variant", "singleton");
    single += eval_checkworthy(cfg, res).mean.map / kNumSources;
    cfg.set("variant", "multi");
    multi += eval_checkworthy(cfg, res).mean.map / kNumSources;
  }
  return check(multi >= single, "mean MAP multi " + num(multi) + ", singleton " + num(single));
}

Outcome cqa_direction(const Data& data) {
  if (!data.cqa) return skip(data.dir.empty() ? kNoData : "no cqa.cfg in data dir");
  const auto res = Resources::load(*data.cqa);
  auto full = *data.cqa;
  full.set("model", "svm");
  full.set("ablate", "");
  auto noctx = full;
  noctx.set("ablate", "context");
  const double all = eval_cqa(full, res).mean.accuracy;
  const double without = eval_cqa(noctx, res).mean.accuracy;
  return check(all > without, "accuracy All " + num(all) + ", without context " + num(without));
}

}  // namespace

int main() {
  log::level() = log::Level::kWarn;
  run("metrics.brute_force_le12", metric_oracle);
  run("models.gradient_checks", gradients);
  run("models.multitask_structure", multitask_structure);
  run("svm.separable_kkt", svm_separable);
  run("svm.rigged_grid", svm_grid);
  run("features.debate_contract", debate_contract);
  run("features.small_contracts", small_contracts);
  run("lda.sums_seed_clusters", lda);
  run("eval.deterministic_reports", determinism);

  Data data;
  try {
    data = find_data();
  } catch (const std::exception& e) {
    std::printf("data dir unusable: %s\n", e.what());
  }
  run("data.debate_counts", [&] { return debate_counts(data); });
  run("data.cqa_counts", [&] { return cqa_counts(data); });
  run("data.majority_baseline", [&] { return majority(data); });
  run("data.random_map", [&] { return random_map(data); });
  run("data.checkworthy_direction", [&] { return checkworthy_direction(data); });
  run("data.multitask_direction", [&] { return multitask_direction(data); });
  run("data.cqa_direction", [&] { return cqa_direction(data); });

  std::printf("%d failed\n", failures);
  return failures ? 1 : 0;
}
