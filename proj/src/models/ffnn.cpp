#include "factcheck/models/ffnn.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>

#include "factcheck/error.hpp"
#include "factcheck/numfmt.hpp"

namespace fc {

Ffnn::Ffnn(std::size_t inputs, const FfnnConfig& cfg) : inputs_(inputs), cfg_(cfg) {
  if (inputs == 0) throw ConfigError("FFNN needs at least one input");
  for (auto h : cfg.hidden) {
    if (h == 0) throw ConfigError("FFNN hidden sizes must be positive");
  }
  if (!(cfg.learning_rate > 0.0)) throw ConfigError("FFNN learning rate must be positive");
  build_layout();
  params_.assign(layout_.size(), 0.0);
  Rng rng(cfg.seed);
  for (const auto& t : layout_.tensors()) {
    if (t.decay) nn::init_fan_in(params_, t, rng);
  }
}

std::vector<std::size_t> Ffnn::sizes() const {
  std::vector<std::size_t> s{inputs_};
  s.insert(s.end(), cfg_.hidden.begin(), cfg_.hidden.end());
  s.push_back(2);
  return s;
}

void Ffnn::build_layout() {
  layout_ = {};
  const auto s = sizes();
  for (std::size_t l = 0; l + 1 < s.size(); ++l) {
    layout_.add("W" + std::to_string(l), s[l], s[l + 1], true, cfg_.l2);
    layout_.add("b" + std::to_string(l), 1, s[l + 1], false);
  }
}

double Ffnn::loss_and_gradient(std::span<const double> x, std::span<const std::uint8_t> y,
                               std::size_t n, std::span<double> grad) const {
  const auto s = sizes();
  const std::size_t L = s.size() - 1;
  const auto policy = cfg_.policy;
  // acts[l] is the input of layer l (acts[0] = X).
  std::vector<std::vector<double>> acts(L + 1);
  acts[0].assign(x.begin(), x.begin() + static_cast<std::ptrdiff_t>(n * inputs_));
  for (std::size_t l = 0; l < L; ++l) {
    const auto& W = layout_[2 * l];
    const auto& b = layout_[2 * l + 1];
    acts[l + 1].assign(n * s[l + 1], 0.0);
    kernels::matmul(acts[l].data(), params_.data() + W.offset, acts[l + 1].data(), n, s[l],
                    s[l + 1], policy);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < s[l + 1]; ++j) {
        double& z = acts[l + 1][i * s[l + 1] + j];
        z += params_[b.offset + j];
        if (l + 1 < L) z = nn::relu(z);
      }
    }
  }
  // Softmax cross-entropy; delta = (p - onehot) / n.
  double loss = 0.0;
  std::vector<double> delta(n * 2);
  for (std::size_t i = 0; i < n; ++i) {
    const double z0 = acts[L][2 * i], z1 = acts[L][2 * i + 1];
    const double m = std::max(z0, z1);
    const double lse = m + std::log(std::exp(z0 - m) + std::exp(z1 - m));
    loss += lse - (y[i] ? z1 : z0);
    const double p1 = std::exp(z1 - lse);
    delta[2 * i] = ((1.0 - p1) - (y[i] ? 0.0 : 1.0)) / static_cast<double>(n);
    delta[2 * i + 1] = (p1 - (y[i] ? 1.0 : 0.0)) / static_cast<double>(n);
  }
  loss /= static_cast<double>(n);
  const double inv_n = 1.0 / static_cast<double>(n);
  if (grad.empty()) return loss + nn::l2_penalty(layout_, params_, inv_n, {});

  std::fill(grad.begin(), grad.end(), 0.0);
  for (std::size_t l = L; l-- > 0;) {
    const auto& W = layout_[2 * l];
    const auto& b = layout_[2 * l + 1];
    kernels::matmul_at(acts[l].data(), delta.data(), grad.data() + W.offset, n, s[l], s[l + 1],
                       policy);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < s[l + 1]; ++j) grad[b.offset + j] += delta[i * s[l + 1] + j];
    }
    if (l == 0) break;
    std::vector<double> prev(n * s[l]);
    kernels::matmul_bt(delta.data(), params_.data() + W.offset, prev.data(), n, s[l + 1], s[l],
                       policy);
    for (std::size_t k = 0; k < prev.size(); ++k) {
      if (acts[l][k] <= 0.0) prev[k] = 0.0;
    }
    delta = std::move(prev);
  }
  return loss + nn::l2_penalty(layout_, params_, inv_n, grad);
}

std::vector<double> Ffnn::predict_proba(std::span<const double> x, std::size_t n) const {
  const auto s = sizes();
  const std::size_t L = s.size() - 1;
  std::vector<double> cur(x.begin(), x.begin() + static_cast<std::ptrdiff_t>(n * inputs_));
  for (std::size_t l = 0; l < L; ++l) {
    const auto& W = layout_[2 * l];
    const auto& b = layout_[2 * l + 1];
    std::vector<double> next(n * s[l + 1]);
    kernels::matmul(cur.data(), params_.data() + W.offset, next.data(), n, s[l], s[l + 1],
                    cfg_.policy);
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < s[l + 1]; ++j) {
        double& z = next[i * s[l + 1] + j];
        z += params_[b.offset + j];
        if (l + 1 < L) z = nn::relu(z);
      }
    }
    cur = std::move(next);
  }
  for (std::size_t i = 0; i < n; ++i) {
    const auto [p0, p1] = nn::softmax2(cur[2 * i], cur[2 * i + 1]);
    cur[2 * i] = p0;
    cur[2 * i + 1] = p1;
  }
  return cur;
}

std::array<double, 2> Ffnn::predict_proba(std::span<const double> row) const {
  const auto p = predict_proba(row, 1);
  return {p[0], p[1]};
}

double Ffnn::score(std::span<const double> row) const { return predict_proba(row)[1]; }

std::vector<double> Ffnn::scores(std::span<const double> x, std::size_t n) const {
  const auto p = predict_proba(x, n);
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i) out[i] = p[2 * i + 1];
  return out;
}

void Ffnn::write(std::ostream& out) const {
  nn::ModelFile f;
  f.kind = "ffnn";
  f.config["inputs"] = std::to_string(inputs_);
  f.config["hidden"] = nn::join_sizes(cfg_.hidden);
  f.config["epochs"] = std::to_string(cfg_.epochs);
  f.config["batch"] = std::to_string(cfg_.batch);
  f.config["learning_rate"] = format_double(cfg_.learning_rate);
  f.config["l2"] = format_double(cfg_.l2);
  f.config["momentum"] = format_double(cfg_.momentum);
  f.config["seed"] = std::to_string(cfg_.seed);
  f.params = params_;
  f.write(out);
}

Ffnn Ffnn::read(std::istream& in) {
  const auto f = nn::ModelFile::read(in, "ffnn");
  Ffnn m;
  m.inputs_ = f.get_size("inputs");
  m.cfg_.hidden = f.get_sizes("hidden");
  m.cfg_.epochs = f.get_size("epochs");
  m.cfg_.batch = f.get_size("batch");
  m.cfg_.learning_rate = f.get_double("learning_rate");
  m.cfg_.l2 = f.get_double("l2");
  m.cfg_.momentum = f.get_double("momentum");
  m.cfg_.seed = std::stoull(f.get("seed"));
  m.build_layout();
  if (f.params.size() != m.layout_.size()) throw SchemaError("FFNN parameter count mismatch");
  m.params_ = f.params;
  return m;
}

void Ffnn::save(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw Error("cannot write '" + path + "'");
  write(out);
}

Ffnn Ffnn::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open model '" + path + "'");
  return read(in);
}

Ffnn train_ffnn(std::span<const double> x, std::size_t cols, std::span<const std::uint8_t> y,
                const FfnnConfig& cfg) {
  if (cols == 0 || x.size() % cols != 0) throw Error("feature rows must be equal-length");
  const std::size_t n = x.size() / cols;
  if (n != y.size()) throw Error("feature and label counts differ");
  if (n == 0) throw TrainingError("no training rows");
  for (auto v : y) {
    if (v > 1) throw Error("FFNN labels must be binary");
  }
  Ffnn model(cols, cfg);
  nn::NesterovSgd opt(cfg.learning_rate, cfg.momentum);
  Rng rng(mix_seed(cfg.seed, 1));
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  const std::size_t batch = std::max<std::size_t>(1, std::min(cfg.batch, n));
  std::vector<double> bx;
  std::vector<std::uint8_t> by;
  std::vector<double> grad(model.params().size());
  for (std::size_t epoch = 1; epoch <= cfg.epochs; ++epoch) {
    rng.shuffle(std::span<std::size_t>(order));
    double total = 0.0;
    for (std::size_t start = 0, b = 0; start < n; start += batch, ++b) {
      const std::size_t m = std::min(batch, n - start);
      bx.resize(m * cols);
      by.resize(m);
      for (std::size_t i = 0; i < m; ++i) {
        const std::size_t r = order[start + i];
        std::copy_n(x.begin() + static_cast<std::ptrdiff_t>(r * cols), cols,
                    bx.begin() + static_cast<std::ptrdiff_t>(i * cols));
        by[i] = y[r];
      }
      const double loss = model.loss_and_gradient(bx, by, m, grad);
      if (!std::isfinite(loss)) {
        throw TrainingError("FFNN loss is not finite at epoch " + std::to_string(epoch) +
                            ", batch " + std::to_string(b) + " (learning rate " +
                            format_double(cfg.learning_rate) + ")");
      }
      total += loss * static_cast<double>(m);
      opt.step(model.params(), grad);
    }
    if (cfg.on_epoch) cfg.on_epoch(epoch, total / static_cast<double>(n));
  }
  return model;
}

}  // namespace fc
