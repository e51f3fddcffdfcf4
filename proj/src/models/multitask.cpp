#include "factcheck/models/multitask.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>

#include "factcheck/error.hpp"
#include "factcheck/numfmt.hpp"

namespace fc {

namespace {

constexpr std::array<std::string_view, 5> kVariantNames = {"singleton", "multi", "multi+any",
                                                           "any", "singleton+any"};

}  // namespace

MultiTaskVariant multitask_variant_from_name(std::string_view name) {
  for (std::size_t i = 0; i < kVariantNames.size(); ++i) {
    if (kVariantNames[i] == name) return static_cast<MultiTaskVariant>(i);
  }
  throw ConfigError("unknown multi-task variant '" + std::string(name) + "'");
}

std::string_view to_string(MultiTaskVariant v) { return kVariantNames[static_cast<std::size_t>(v)]; }

MultiTaskConfig variant(MultiTaskVariant kind, Source target, MultiTaskConfig base) {
  const auto t = static_cast<std::size_t>(target);
  base.tasks.clear();
  base.task_weights.clear();
  switch (kind) {
    case MultiTaskVariant::kSingleton:
      base.tasks = {t};
      base.score_task = 0;
      break;
    case MultiTaskVariant::kMulti:
    case MultiTaskVariant::kMultiAny:
      for (std::size_t s = 0; s < kNumSources; ++s) base.tasks.push_back(s);
      if (kind == MultiTaskVariant::kMultiAny) base.tasks.push_back(kAnyColumn);
      base.score_task = t;
      break;
    case MultiTaskVariant::kAny:
      base.tasks = {kAnyColumn};
      base.score_task = 0;
      break;
    case MultiTaskVariant::kSingletonAny:
      base.tasks = {t, kAnyColumn};
      base.score_task = 0;
      break;
  }
  return base;
}

MultiTaskNet::MultiTaskNet(std::size_t inputs, const MultiTaskConfig& cfg)
    : inputs_(inputs), cfg_(cfg) {
  if (cfg.tasks.empty()) throw ConfigError("multi-task net needs at least one task");
  if (cfg.score_task >= cfg.tasks.size()) throw ConfigError("score task out of range");
  if (!cfg.task_weights.empty() && cfg.task_weights.size() != cfg.tasks.size()) {
    throw ConfigError("task weights do not match tasks");
  }
  if (inputs == 0 || cfg.shared == 0 || cfg.task_hidden == 0) {
    throw ConfigError("multi-task layer sizes must be positive");
  }
  build_layout();
  params_.assign(layout_.size(), 0.0);
  Rng rng(cfg.seed);
  for (const auto& t : layout_.tensors()) {
    if (t.decay) nn::init_fan_in(params_, t, rng);
  }
}

void MultiTaskNet::build_layout() {
  layout_ = {};
  layout_.add("Ws", inputs_, cfg_.shared, true, cfg_.l2);
  layout_.add("bs", 1, cfg_.shared, false);
  for (std::size_t t = 0; t < cfg_.tasks.size(); ++t) {
    const std::string k = std::to_string(t);
    layout_.add("Wt" + k, cfg_.shared, cfg_.task_hidden, true, cfg_.l2);
    layout_.add("bt" + k, 1, cfg_.task_hidden, false);
    layout_.add("Wo" + k, cfg_.task_hidden, 1, true, cfg_.l2);
    layout_.add("bo" + k, 1, 1, false);
  }
}

std::pair<std::size_t, std::size_t> MultiTaskNet::shared_range() const {
  return {layout_[0].offset, layout_[1].offset + layout_[1].size()};
}

std::pair<std::size_t, std::size_t> MultiTaskNet::head_range(std::size_t t) const {
  const std::size_t first = 2 + 4 * t;
  return {layout_[first].offset, layout_[first + 3].offset + layout_[first + 3].size()};
}

double MultiTaskNet::task_weight(std::size_t t, std::span<const double> override_w) const {
  if (!override_w.empty()) return override_w[t];
  return cfg_.task_weights.empty() ? 1.0 : cfg_.task_weights[t];
}

namespace {

void dense_relu(const double* in, const double* W, const double* b, double* out, std::size_t n,
                std::size_t k, std::size_t m, kernels::Policy p, bool relu) {
  kernels::matmul(in, W, out, n, k, m, p);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < m; ++j) {
      double& z = out[i * m + j];
      z += b[j];
      if (relu) z = nn::relu(z);
    }
  }
}

}  // namespace

std::vector<double> MultiTaskNet::predict(std::span<const double> x, std::size_t n) const {
  const std::size_t S = cfg_.shared, H = cfg_.task_hidden, T = heads();
  const double* P = params_.data();
  std::vector<double> hs(n * S), ht(n * H), o(n);
  dense_relu(x.data(), P + layout_[0].offset, P + layout_[1].offset, hs.data(), n, inputs_, S,
             cfg_.policy, true);
  std::vector<double> out(n * T);
  for (std::size_t t = 0; t < T; ++t) {
    const std::size_t base = 2 + 4 * t;
    dense_relu(hs.data(), P + layout_[base].offset, P + layout_[base + 1].offset, ht.data(), n, S,
               H, cfg_.policy, true);
    dense_relu(ht.data(), P + layout_[base + 2].offset, P + layout_[base + 3].offset, o.data(), n,
               H, 1, cfg_.policy, false);
    for (std::size_t i = 0; i < n; ++i) out[i * T + t] = nn::sigmoid(o[i]);
  }
  return out;
}

std::vector<double> MultiTaskNet::scores(std::span<const double> x, std::size_t n) const {
  const auto p = predict(x, n);
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i) out[i] = p[i * heads() + cfg_.score_task];
  return out;
}

double MultiTaskNet::loss_and_gradient(std::span<const double> x,
                                       std::span<const std::uint8_t> labels,
                                       std::size_t label_cols, std::size_t n,
                                       std::span<double> grad,
                                       std::span<const double> weights_override) const {
  const std::size_t S = cfg_.shared, H = cfg_.task_hidden, T = heads();
  const auto policy = cfg_.policy;
  const double* P = params_.data();
  const double inv_n = 1.0 / static_cast<double>(n);
  const bool want_grad = !grad.empty();
  if (want_grad) std::fill(grad.begin(), grad.end(), 0.0);

  std::vector<double> hs(n * S);
  dense_relu(x.data(), P + layout_[0].offset, P + layout_[1].offset, hs.data(), n, inputs_, S,
             policy, true);
  std::vector<double> d_hs(want_grad ? n * S : 0, 0.0);
  std::vector<double> ht(n * H), o(n), d_o(n), d_ht(n * H);
  double loss = 0.0;
  for (std::size_t t = 0; t < T; ++t) {
    const double w = task_weight(t, weights_override);
    const std::size_t base = 2 + 4 * t;
    const auto& Wt = layout_[base];
    const auto& bt = layout_[base + 1];
    const auto& Wo = layout_[base + 2];
    const auto& bo = layout_[base + 3];
    dense_relu(hs.data(), P + Wt.offset, P + bt.offset, ht.data(), n, S, H, policy, true);
    dense_relu(ht.data(), P + Wo.offset, P + bo.offset, o.data(), n, H, 1, policy, false);
    const std::size_t col = cfg_.tasks[t];
    double task_loss = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const double z = o[i];
      const double yv = labels[i * label_cols + col] ? 1.0 : 0.0;
      // log(1 + e^z) - y z, computed stably.
      task_loss += (z > 0 ? z + std::log1p(std::exp(-z)) : std::log1p(std::exp(z))) - yv * z;
      d_o[i] = w * (nn::sigmoid(z) - yv) * inv_n;
    }
    loss += w * task_loss * inv_n;
    if (!want_grad || w == 0.0) continue;

    kernels::matmul_at(ht.data(), d_o.data(), grad.data() + Wo.offset, n, H, 1, policy);
    for (std::size_t i = 0; i < n; ++i) grad[bo.offset] += d_o[i];
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < H; ++j) {
        d_ht[i * H + j] = ht[i * H + j] > 0.0 ? d_o[i] * P[Wo.offset + j] : 0.0;
      }
    }
    kernels::matmul_at(hs.data(), d_ht.data(), grad.data() + Wt.offset, n, S, H, policy);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < H; ++j) grad[bt.offset + j] += d_ht[i * H + j];
    }
    kernels::matmul_bt(d_ht.data(), P + Wt.offset, d_hs.data(), n, H, S, policy, true);
  }
  if (want_grad) {
    for (std::size_t k = 0; k < d_hs.size(); ++k) {
      if (hs[k] <= 0.0) d_hs[k] = 0.0;
    }
    kernels::matmul_at(x.data(), d_hs.data(), grad.data() + layout_[0].offset, n, inputs_, S,
                       policy);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < S; ++j) grad[layout_[1].offset + j] += d_hs[i * S + j];
    }
  }
  return loss + nn::l2_penalty(layout_, params_, inv_n, grad);
}

void MultiTaskNet::write(std::ostream& out) const {
  nn::ModelFile f;
  f.kind = "multitask";
  f.config["inputs"] = std::to_string(inputs_);
  f.config["shared"] = std::to_string(cfg_.shared);
  f.config["task_hidden"] = std::to_string(cfg_.task_hidden);
  f.config["tasks"] = nn::join_sizes(cfg_.tasks);
  std::string weights;
  for (std::size_t i = 0; i < cfg_.task_weights.size(); ++i) {
    weights += (i ? "," : "") + format_double(cfg_.task_weights[i]);
  }
  f.config["task_weights"] = weights.empty() ? "-" : weights;
  f.config["score_task"] = std::to_string(cfg_.score_task);
  f.config["epochs"] = std::to_string(cfg_.epochs);
  f.config["batch"] = std::to_string(cfg_.batch);
  f.config["learning_rate"] = format_double(cfg_.learning_rate);
  f.config["momentum"] = format_double(cfg_.momentum);
  f.config["l2"] = format_double(cfg_.l2);
  f.config["seed"] = std::to_string(cfg_.seed);
  f.params = params_;
  f.write(out);
}

MultiTaskNet MultiTaskNet::read(std::istream& in) {
  const auto f = nn::ModelFile::read(in, "multitask");
  MultiTaskNet m;
  m.inputs_ = f.get_size("inputs");
  m.cfg_.shared = f.get_size("shared");
  m.cfg_.task_hidden = f.get_size("task_hidden");
  m.cfg_.tasks = f.get_sizes("tasks");
  if (const auto& w = f.get("task_weights"); w != "-") {
    std::size_t start = 0;
    while (start <= w.size()) {
      auto comma = w.find(',', start);
      if (comma == std::string::npos) comma = w.size();
      m.cfg_.task_weights.push_back(parse_double(w.substr(start, comma - start)));
      start = comma + 1;
    }
  }
  m.cfg_.score_task = f.get_size("score_task");
  m.cfg_.epochs = f.get_size("epochs");
  m.cfg_.batch = f.get_size("batch");
  m.cfg_.learning_rate = f.get_double("learning_rate");
  m.cfg_.momentum = f.get_double("momentum");
  m.cfg_.l2 = f.get_double("l2");
  m.cfg_.seed = std::stoull(f.get("seed"));
  m.build_layout();
  if (f.params.size() != m.layout_.size()) throw SchemaError("multi-task parameter count mismatch");
  m.params_ = f.params;
  return m;
}

void MultiTaskNet::save(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw Error("cannot write '" + path + "'");
  write(out);
}

MultiTaskNet MultiTaskNet::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open model '" + path + "'");
  return read(in);
}

MultiTaskNet train_multitask(std::span<const double> x, std::size_t cols,
                             std::span<const std::uint8_t> labels, std::size_t label_cols,
                             const MultiTaskConfig& cfg) {
  if (cols == 0 || x.size() % cols != 0) throw Error("feature rows must be equal-length");
  const std::size_t n = x.size() / cols;
  if (label_cols == 0 || labels.size() != n * label_cols) {
    throw ConfigError("label matrix does not match the feature rows");
  }
  for (auto t : cfg.tasks) {
    if (t >= label_cols) {
      throw ConfigError("task column " + std::to_string(t) + " is outside the label matrix (" +
                        std::to_string(label_cols) + " columns)");
    }
  }
  if (n == 0) throw TrainingError("no training rows");
  MultiTaskNet net(cols, cfg);
  nn::NesterovSgd opt(cfg.learning_rate, cfg.momentum);
  Rng rng(mix_seed(cfg.seed, 1));
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  const std::size_t batch = std::max<std::size_t>(1, std::min(cfg.batch, n));
  std::vector<double> bx, grad(net.params().size());
  std::vector<std::uint8_t> by;
  for (std::size_t epoch = 1; epoch <= cfg.epochs; ++epoch) {
    rng.shuffle(std::span<std::size_t>(order));
    double total = 0.0;
    for (std::size_t start = 0; start < n; start += batch) {
      const std::size_t m = std::min(batch, n - start);
      bx.resize(m * cols);
      by.resize(m * label_cols);
      for (std::size_t i = 0; i < m; ++i) {
        const std::size_t r = order[start + i];
        std::copy_n(x.begin() + static_cast<std::ptrdiff_t>(r * cols), cols,
                    bx.begin() + static_cast<std::ptrdiff_t>(i * cols));
        std::copy_n(labels.begin() + static_cast<std::ptrdiff_t>(r * label_cols), label_cols,
                    by.begin() + static_cast<std::ptrdiff_t>(i * label_cols));
      }
      const double loss = net.loss_and_gradient(bx, by, label_cols, m, grad);
      if (!std::isfinite(loss)) {
        throw TrainingError("multi-task loss is not finite at epoch " + std::to_string(epoch));
      }
      total += loss * static_cast<double>(m);
      opt.step(net.params(), grad);
    }
    if (cfg.on_epoch) cfg.on_epoch(epoch, total / static_cast<double>(n));
  }
  return net;
}

}  // namespace fc
