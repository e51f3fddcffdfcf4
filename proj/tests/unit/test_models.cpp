#include <doctest.h>

#include <cmath>
#include <numeric>
#include <sstream>

#include "factcheck/error.hpp"
#include "factcheck/models/bilstm.hpp"
#include "factcheck/models/ffnn.hpp"
#include "factcheck/models/multitask.hpp"
#include "factcheck/models/svm.hpp"
#include "factcheck/rng.hpp"

using namespace fc;

namespace {

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

BilstmExample tiny_example(Rng& rng, std::size_t dim, std::size_t sim, std::uint8_t label) {
  BilstmExample ex;
  for (std::size_t b = 0; b < kBranches; ++b) {
    const std::size_t len = b == 2 ? 0 : 3;
    ex.sequences[b].resize(len * dim);
    for (auto& v : ex.sequences[b]) v = rng.normal();
  }
  ex.similarity.resize(sim);
  for (auto& v : ex.similarity) v = rng.uniform();
  ex.label = label;
  return ex;
}

}  // namespace

TEST_SUITE("models") {

TEST_CASE("ffnn learns xor") {
  const std::vector<double> x = {0, 0, 0, 1, 1, 0, 1, 1};
  const std::vector<std::uint8_t> y = {0, 1, 1, 0};
  FfnnConfig cfg;
  cfg.hidden = {8};
  cfg.epochs = 5000;
  cfg.batch = 4;
  cfg.learning_rate = 0.1;
  cfg.seed = 3;
  std::vector<double> losses;
  cfg.on_epoch = [&](std::size_t, double l) { losses.push_back(l); };
  const auto net = train_ffnn(x, 2, y, cfg);
  for (std::size_t i = 0; i < 4; ++i) {
    const std::vector<double> row(x.begin() + 2 * i, x.begin() + 2 * i + 2);
    CHECK((net.score(row) > 0.5) == (y[i] == 1));
    const auto p = net.predict_proba(row);
    CHECK(p[0] + p[1] == doctest::Approx(1.0).epsilon(1e-12));
  }
  CHECK(losses.size() == 5000);
  CHECK(losses[9] < losses[0]);
}

TEST_CASE("ffnn gradient matches finite differences") {
  FfnnConfig cfg;
  cfg.hidden = {4, 3};
  cfg.seed = 2;
  cfg.l2 = 0.01;
  Ffnn net(5, cfg);
  const auto x = random_rows(6, 5, 8);
  const std::vector<std::uint8_t> y = {1, 0, 0, 1, 1, 0};
  std::vector<double> grad(net.params().size());
  net.loss_and_gradient(x, y, 6, grad);
  auto loss = [&](std::span<const double> p) {
    Ffnn copy = net;
    std::copy(p.begin(), p.end(), copy.params().begin());
    return copy.loss_and_gradient(x, y, 6, {});
  };
  const std::vector<double> p0(net.params().begin(), net.params().end());
  CHECK(nn::gradient_check(p0, grad, loss, all_indices(p0.size())) < 1e-4);
}

TEST_CASE("ffnn save and load are exact") {
  FfnnConfig cfg;
  cfg.hidden = {3};
  cfg.seed = 5;
  Ffnn net(4, cfg);
  std::stringstream buf;
  net.write(buf);
  const auto back = Ffnn::read(buf);
  CHECK(std::equal(net.params().begin(), net.params().end(), back.params().begin(), back.params().end()));
  CHECK(back.config().hidden == cfg.hidden);
  std::istringstream wrong("factcheck-model svm v1\n");
  CHECK_THROWS(Ffnn::read(wrong));
}

TEST_CASE("ffnn refuses non-finite input") {
  std::vector<double> x = {std::nan(""), 1, 2, 3};
  const std::vector<std::uint8_t> y = {0, 1};
  FfnnConfig cfg;
  cfg.hidden = {2};
  cfg.epochs = 2;
  CHECK_THROWS_AS(train_ffnn(x, 2, y, cfg), TrainingError);
}

TEST_CASE("multi-task variants") {
  CHECK(variant(MultiTaskVariant::kSingleton, Source::kCNN).tasks.size() == 1);
  CHECK(variant(MultiTaskVariant::kMulti, Source::kCNN).tasks.size() == 9);
  CHECK(variant(MultiTaskVariant::kMultiAny, Source::kCNN).tasks.size() == 10);
  CHECK(variant(MultiTaskVariant::kAny, Source::kCNN).tasks == std::vector<std::size_t>{kAnyColumn});
  const auto sa = variant(MultiTaskVariant::kSingletonAny, Source::kPF);
  CHECK(sa.tasks.size() == 2);
  CHECK(sa.tasks[sa.score_task] == static_cast<std::size_t>(Source::kPF));
  const auto m = variant(MultiTaskVariant::kMulti, Source::kWP);
  CHECK(m.tasks[m.score_task] == static_cast<std::size_t>(Source::kWP));
  CHECK(multitask_variant_from_name("multi+any") == MultiTaskVariant::kMultiAny);
  CHECK_THROWS_AS(multitask_variant_from_name("ensemble"), ConfigError);
}

TEST_CASE("multi-task heads and gradients") {
  auto cfg = variant(MultiTaskVariant::kMultiAny, Source::kCT);
  cfg.shared = 4;
  cfg.task_hidden = 3;
  cfg.seed = 1;
  MultiTaskNet net(5, cfg);
  CHECK(net.heads() == 10);
  const auto x = random_rows(7, 5, 3);
  Rng rng(4);
  std::vector<std::uint8_t> labels(7 * 10);
  for (auto& l : labels) l = rng.uniform() < 0.4;
  const auto out = net.predict(x, 7);
  CHECK(out.size() == 70);
  for (double p : out) {
    CHECK(p >= 0.0);
    CHECK(p <= 1.0);
  }

  std::vector<double> grad(net.params().size());
  net.loss_and_gradient(x, labels, 10, 7, grad);
  auto loss = [&](std::span<const double> p) {
    MultiTaskNet copy = net;
    std::copy(p.begin(), p.end(), copy.params().begin());
    return copy.loss_and_gradient(x, labels, 10, 7, {});
  };
  const std::vector<double> p0(net.params().begin(), net.params().end());
  CHECK(nn::gradient_check(p0, grad, loss, all_indices(p0.size())) < 1e-4);

  // the shared gradient is the sum of the per-task gradients
  const auto [lo, hi] = net.shared_range();
  std::vector<double> summed(grad.size(), 0.0);
  for (std::size_t t = 0; t < 10; ++t) {
    std::vector<double> w(10, 0.0);
    w[t] = 1.0;
    std::vector<double> g(grad.size());
    net.loss_and_gradient(x, labels, 10, 7, g, w);
    for (std::size_t i = lo; i < hi; ++i) summed[i] += g[i];
  }
  for (std::size_t i = lo; i < hi; ++i) CHECK(summed[i] == doctest::Approx(grad[i]).epsilon(1e-9));

  std::vector<std::uint8_t> short_labels(7 * 3);
  CHECK_THROWS_AS(train_multitask(x, 5, short_labels, 3, cfg), ConfigError);
}

TEST_CASE("identical label columns give matching rankings") {
  MultiTaskConfig cfg;
  cfg.tasks = {0, 1};
  cfg.shared = 8;
  cfg.task_hidden = 8;
  cfg.epochs = 200;
  cfg.batch = 40;
  cfg.learning_rate = 0.05;
  const auto x = random_rows(40, 3, 11);
  std::vector<std::uint8_t> labels(40 * 2);
  for (std::size_t i = 0; i < 40; ++i) labels[2 * i] = labels[2 * i + 1] = x[3 * i] + x[3 * i + 1] > 0;
  const auto net = train_multitask(x, 3, labels, 2, cfg);
  const auto out = net.predict(x, 40);
  std::size_t agree = 0;
  for (std::size_t i = 0; i < 40; ++i) agree += (out[2 * i] > 0.5) == (out[2 * i + 1] > 0.5);
  CHECK(agree >= 38);
}

TEST_CASE("bi-LSTM stack shapes and gradients") {
  BilstmConfig cfg;
  cfg.embedding_dim = 3;
  cfg.units = 2;
  cfg.similarity_features = 2;
  cfg.joint = 4;
  cfg.seed = 6;
  BilstmStack net(cfg);
  Rng rng(10);
  std::vector<BilstmExample> batch;
  for (int i = 0; i < 3; ++i) batch.push_back(tiny_example(rng, 3, 2, static_cast<std::uint8_t>(i % 2)));
  const auto p = net.predict_proba(batch[0]);
  CHECK(p[0] + p[1] == doctest::Approx(1.0).epsilon(1e-12));
  const auto layers = net.extract_layers(batch[0]);
  CHECK(layers.concatenation.size() == 5 * 2 * 2 + 2);
  CHECK(layers.joint.size() == 4);
  CHECK(layers.score >= 0.0);
  CHECK(layers.score <= 1.0);
  CHECK(net.embedding_block(batch[0]).size() == net.embedding_block_size());
  CHECK(net.embedding_block(batch[0]) == net.embedding_block(batch[0]));
  // the empty branch encodes to zeros
  for (std::size_t k = 8; k < 12; ++k) CHECK(layers.concatenation[k] == 0.0);

  std::vector<double> grad(net.params().size());
  net.loss_and_gradient(batch, grad);
  auto loss = [&](std::span<const double> q) {
    BilstmStack copy = net;
    std::copy(q.begin(), q.end(), copy.params().begin());
    return copy.loss_and_gradient(batch, {});
  };
  const std::vector<double> p0(net.params().begin(), net.params().end());
  CHECK(nn::gradient_check(p0, grad, loss, all_indices(p0.size()), 1e-5) < 1e-3);

  BilstmConfig def;
  CHECK(BilstmStack(def).embedding_block_size() == 260);
  std::stringstream buf;
  net.write(buf);
  const auto back = BilstmStack::read(buf);
  CHECK(back.predict_proba(batch[1]) == net.predict_proba(batch[1]));
}

TEST_CASE("svm on a separable set") {
  std::vector<double> x;
  std::vector<std::uint8_t> y;
  Rng rng(2);
  for (int i = 0; i < 40; ++i) {
    const bool pos = i % 2;
    x.push_back((pos ? 2.0 : -2.0) + 0.5 * rng.normal());
    x.push_back(rng.normal());
    y.push_back(pos);
  }
  SvmConfig cfg;
  cfg.c = 10;
  cfg.gamma = 0.5;
  const auto fit = train_svm_rbf(x, 2, y, cfg);
  CHECK(fit.converged);
  const auto pred = fit.model.predict(x, 40);
  CHECK(pred == y);
  const auto dec = fit.model.decision(x, 40);
  for (std::size_t i = 0; i < 40; ++i) CHECK((dec[i] > 0) == (pred[i] == 1));
  CHECK(kkt_violation(x, 2, y, fit.alpha, fit.model.bias(), cfg.c, cfg.gamma) < 1e-3);

  std::stringstream buf;
  fit.model.write(buf);
  const auto back = SvmModel::read(buf);
  CHECK(back.decision(x, 40) == dec);

  const std::vector<std::uint8_t> one(40, 1);
  CHECK_THROWS_AS(train_svm_rbf(x, 2, one, cfg), TrainingError);
}

TEST_CASE("stratified folds keep class balance") {
  std::vector<std::uint8_t> y(30, 0);
  for (int i = 0; i < 10; ++i) y[i] = 1;
  const auto f = stratified_folds(y, 5, 3);
  for (std::size_t k = 0; k < 5; ++k) {
    int pos = 0, all = 0;
    for (std::size_t i = 0; i < 30; ++i) {
      if (f[i] != k) continue;
      ++all;
      pos += y[i];
    }
    CHECK(all == 6);
    CHECK(pos == 2);
  }
  CHECK(stratified_folds(y, 5, 3) == f);
}

TEST_CASE("linear and multiclass svm") {
  std::vector<SparseVector> rows;
  std::vector<std::uint8_t> y;
  for (int i = 0; i < 20; ++i) {
    rows.push_back({{static_cast<std::size_t>(i % 2), 1.0}});
    y.push_back(i % 2);
  }
  const auto lin = train_linear_svm(rows, 2, y, {});
  for (int i = 0; i < 20; ++i) CHECK((lin.decision(rows[i]) > 0) == (y[i] == 1));

  std::vector<double> x;
  std::vector<std::size_t> cls;
  for (int i = 0; i < 30; ++i) {
    const std::size_t c = i % 3;
    x.push_back(c == 0 ? 3 : 0);
    x.push_back(c == 1 ? 3 : 0);
    cls.push_back(c);
  }
  const auto mc = train_svm_multiclass(x, 2, cls, 3, {});
  CHECK(mc.classes() == 3);
  for (int i = 0; i < 30; ++i) CHECK(mc.predict(std::span<const double>(x).subspan(2 * i, 2)) == cls[i]);
}

}  // TEST_SUITE
