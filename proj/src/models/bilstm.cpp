#include "factcheck/models/bilstm.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>

#include "factcheck/error.hpp"
#include "factcheck/numfmt.hpp"

namespace fc {

BilstmExample make_bilstm_example(const std::array<std::vector<std::string>, kBranches>& tokens,
                                  std::vector<double> similarity, std::uint8_t label,
                                  const VectorStore& vectors, std::size_t max_len) {
  BilstmExample ex;
  for (std::size_t b = 0; b < kBranches; ++b) {
    std::size_t len = 0;
    for (const auto& t : tokens[b]) {
      if (len >= max_len) break;
      auto v = vectors.find(t);
      if (v.empty()) continue;
      ex.sequences[b].insert(ex.sequences[b].end(), v.begin(), v.end());
      ++len;
    }
  }
  ex.similarity = std::move(similarity);
  ex.label = label;
  return ex;
}

BilstmStack::BilstmStack(const BilstmConfig& cfg) : cfg_(cfg) {
  if (cfg.embedding_dim == 0 || cfg.units == 0 || cfg.joint == 0) {
    throw ConfigError("bi-LSTM sizes must be positive");
  }
  if (cfg.lstm_dropout < 0.0 || cfg.lstm_dropout >= 1.0 || cfg.joint_dropout < 0.0 ||
      cfg.joint_dropout >= 1.0) {
    throw ConfigError("dropout rates must be in [0, 1)");
  }
  build_layout();
  params_.assign(layout_.size(), 0.0);
  Rng rng(cfg.seed);
  const std::size_t H = cfg.units;
  for (const auto& t : layout_.tensors()) {
    if (t.decay) nn::init_fan_in(params_, t, rng);
  }
  // Forget-gate bias starts at 1.
  for (std::size_t b = 0; b < kBranches; ++b) {
    for (std::size_t d = 0; d < 2; ++d) {
      const auto& bias = layout_[direction(b, d).b];
      for (std::size_t j = H; j < 2 * H; ++j) params_[bias.offset + j] = 1.0;
    }
  }
}

void BilstmStack::build_layout() {
  layout_ = {};
  const std::size_t E = cfg_.embedding_dim, H = cfg_.units;
  for (std::size_t b = 0; b < kBranches; ++b) {
    for (std::size_t d = 0; d < 2; ++d) {
      const std::string k = std::to_string(b) + (d ? "b" : "f");
      layout_.add("W" + k, E, 4 * H, true, cfg_.lstm_l2);
      layout_.add("U" + k, H, 4 * H, true, cfg_.lstm_l2);
      layout_.add("b" + k, 1, 4 * H, false);
    }
  }
  joint_W_ = layout_.add("Wj", concat_size(), cfg_.joint, true, cfg_.joint_l2);
  joint_b_ = layout_.add("bj", 1, cfg_.joint, false);
  out_W_ = layout_.add("Wout", cfg_.joint, 2, true, 0.0);
  out_b_ = layout_.add("bout", 1, 2, false);
}

BilstmStack::Direction BilstmStack::direction(std::size_t branch, std::size_t dir) const {
  const std::size_t base = 3 * (2 * branch + dir);
  return {base, base + 1, base + 2};
}

namespace {

struct DirCache {
  std::size_t T = 0;
  std::vector<double> a;  // T x 4H pre-activations (i, f, c, o)
  std::vector<double> c;  // (T + 1) x H, row 0 is the zero state
  std::vector<double> h;  // (T + 1) x H
};

// Runs one direction over `x` (T x E); reversed when `reverse`.
void lstm_forward(const double* P, std::size_t W, std::size_t U, std::size_t bias,
                  const std::vector<double>& x, std::size_t E, std::size_t H, bool reverse,
                  DirCache& cache) {
  const std::size_t T = x.size() / E;
  cache.T = T;
  cache.a.assign(T * 4 * H, 0.0);
  cache.c.assign((T + 1) * H, 0.0);
  cache.h.assign((T + 1) * H, 0.0);
  for (std::size_t t = 0; t < T; ++t) {
    const double* xt = x.data() + (reverse ? T - 1 - t : t) * E;
    double* a = cache.a.data() + t * 4 * H;
    const double* hp = cache.h.data() + t * H;
    const double* cp = cache.c.data() + t * H;
    for (std::size_t j = 0; j < 4 * H; ++j) a[j] = P[bias + j];
    for (std::size_t e = 0; e < E; ++e) {
      const double v = xt[e];
      if (v == 0.0) continue;
      const double* row = P + W + e * 4 * H;
      for (std::size_t j = 0; j < 4 * H; ++j) a[j] += v * row[j];
    }
    for (std::size_t k = 0; k < H; ++k) {
      const double v = hp[k];
      if (v == 0.0) continue;
      const double* row = P + U + k * 4 * H;
      for (std::size_t j = 0; j < 4 * H; ++j) a[j] += v * row[j];
    }
    double* c = cache.c.data() + (t + 1) * H;
    double* h = cache.h.data() + (t + 1) * H;
    for (std::size_t k = 0; k < H; ++k) {
      const double i = nn::hard_sigmoid(a[k]);
      const double f = nn::hard_sigmoid(a[H + k]);
      const double g = std::tanh(a[2 * H + k]);
      const double o = nn::hard_sigmoid(a[3 * H + k]);
      c[k] = f * cp[k] + i * g;
      h[k] = o * std::tanh(c[k]);
    }
  }
}

void lstm_backward(const double* P, std::size_t W, std::size_t U, std::size_t bias,
                   const std::vector<double>& x, std::size_t E, std::size_t H, bool reverse,
                   const DirCache& cache, const double* dh_last, double* G) {
  const std::size_t T = cache.T;
  std::vector<double> dh(dh_last, dh_last + H), dc(H, 0.0), da(4 * H), dh_prev(H);
  for (std::size_t t = T; t-- > 0;) {
    const double* a = cache.a.data() + t * 4 * H;
    const double* c = cache.c.data() + (t + 1) * H;
    const double* cp = cache.c.data() + t * H;
    const double* hp = cache.h.data() + t * H;
    for (std::size_t k = 0; k < H; ++k) {
      const double i = nn::hard_sigmoid(a[k]);
      const double f = nn::hard_sigmoid(a[H + k]);
      const double g = std::tanh(a[2 * H + k]);
      const double o = nn::hard_sigmoid(a[3 * H + k]);
      const double tc = std::tanh(c[k]);
      const double d_o = dh[k] * tc;
      const double d_c = dc[k] + dh[k] * o * (1.0 - tc * tc);
      da[k] = d_c * g * nn::hard_sigmoid_grad(a[k]);
      da[H + k] = d_c * cp[k] * nn::hard_sigmoid_grad(a[H + k]);
      da[2 * H + k] = d_c * i * (1.0 - g * g);
      da[3 * H + k] = d_o * nn::hard_sigmoid_grad(a[3 * H + k]);
      dc[k] = d_c * f;
    }
    const double* xt = x.data() + (reverse ? T - 1 - t : t) * E;
    for (std::size_t e = 0; e < E; ++e) {
      const double v = xt[e];
      if (v == 0.0) continue;
      double* row = G + W + e * 4 * H;
      for (std::size_t j = 0; j < 4 * H; ++j) row[j] += v * da[j];
    }
    for (std::size_t k = 0; k < H; ++k) {
      const double v = hp[k];
      double* row = G + U + k * 4 * H;
      const double* urow = P + U + k * 4 * H;
      double s = 0.0;
      for (std::size_t j = 0; j < 4 * H; ++j) {
        if (v != 0.0) row[j] += v * da[j];
        s += urow[j] * da[j];
      }
      dh_prev[k] = s;
    }
    for (std::size_t j = 0; j < 4 * H; ++j) G[bias + j] += da[j];
    dh.swap(dh_prev);
  }
}

}  // namespace

double BilstmStack::example(const BilstmExample& ex, Rng* dropout_rng, std::span<double> grad,
                            BilstmLayers* layers) const {
  const std::size_t E = cfg_.embedding_dim, H = cfg_.units, J = cfg_.joint;
  const std::size_t C = concat_size();
  if (ex.similarity.size() != cfg_.similarity_features) {
    throw Error("example has " + std::to_string(ex.similarity.size()) +
                " similarity features, model expects " + std::to_string(cfg_.similarity_features));
  }
  const double* P = params_.data();

  std::array<std::array<DirCache, 2>, kBranches> caches;
  std::vector<double> concat(C, 0.0);
  for (std::size_t b = 0; b < kBranches; ++b) {
    const auto& seq = ex.sequences[b];
    if (seq.size() % E != 0) throw Error("sequence width does not match the embedding size");
    if (seq.empty()) continue;
    for (std::size_t d = 0; d < 2; ++d) {
      const auto dir = direction(b, d);
      lstm_forward(P, layout_[dir.W].offset, layout_[dir.U].offset, layout_[dir.b].offset, seq, E,
                   H, d == 1, caches[b][d]);
      const double* h = caches[b][d].h.data() + caches[b][d].T * H;
      std::copy(h, h + H, concat.begin() + static_cast<std::ptrdiff_t>((2 * b + d) * H));
    }
  }
  std::copy(ex.similarity.begin(), ex.similarity.end(),
            concat.begin() + static_cast<std::ptrdiff_t>(kBranches * 2 * H));

  // Inverted dropout on the branch encodings and on the joint layer.
  std::vector<double> mask_enc, mask_joint;
  std::vector<double> x = concat;
  if (dropout_rng && cfg_.lstm_dropout > 0.0) {
    mask_enc.assign(kBranches * 2 * H, 0.0);
    const double keep = 1.0 - cfg_.lstm_dropout;
    for (auto& m : mask_enc) m = dropout_rng->uniform() < keep ? 1.0 / keep : 0.0;
    for (std::size_t k = 0; k < mask_enc.size(); ++k) x[k] *= mask_enc[k];
  }
  const auto& Wj = layout_[joint_W_];
  const auto& bj = layout_[joint_b_];
  std::vector<double> joint(J);
  for (std::size_t j = 0; j < J; ++j) joint[j] = P[bj.offset + j];
  for (std::size_t k = 0; k < C; ++k) {
    const double v = x[k];
    if (v == 0.0) continue;
    const double* row = P + Wj.offset + k * J;
    for (std::size_t j = 0; j < J; ++j) joint[j] += v * row[j];
  }
  for (auto& v : joint) v = std::tanh(v);
  std::vector<double> jd = joint;
  if (dropout_rng && cfg_.joint_dropout > 0.0) {
    mask_joint.assign(J, 0.0);
    const double keep = 1.0 - cfg_.joint_dropout;
    for (auto& m : mask_joint) m = dropout_rng->uniform() < keep ? 1.0 / keep : 0.0;
    for (std::size_t j = 0; j < J; ++j) jd[j] *= mask_joint[j];
  }
  const auto& Wo = layout_[out_W_];
  const auto& bo = layout_[out_b_];
  double z0 = P[bo.offset], z1 = P[bo.offset + 1];
  for (std::size_t j = 0; j < J; ++j) {
    z0 += jd[j] * P[Wo.offset + 2 * j];
    z1 += jd[j] * P[Wo.offset + 2 * j + 1];
  }
  const auto [p0, p1] = nn::softmax2(z0, z1);
  if (layers) {
    layers->concatenation = concat;
    layers->joint = joint;
    layers->score = p1;
  }
  const double m = std::max(z0, z1);
  const double lse = m + std::log(std::exp(z0 - m) + std::exp(z1 - m));
  const double loss = lse - (ex.label ? z1 : z0);
  if (grad.empty()) return loss;

  double* G = grad.data();
  const double dz0 = p0 - (ex.label ? 0.0 : 1.0);
  const double dz1 = p1 - (ex.label ? 1.0 : 0.0);
  G[bo.offset] += dz0;
  G[bo.offset + 1] += dz1;
  std::vector<double> dj(J);
  for (std::size_t j = 0; j < J; ++j) {
    G[Wo.offset + 2 * j] += jd[j] * dz0;
    G[Wo.offset + 2 * j + 1] += jd[j] * dz1;
    double d = dz0 * P[Wo.offset + 2 * j] + dz1 * P[Wo.offset + 2 * j + 1];
    if (!mask_joint.empty()) d *= mask_joint[j];
    dj[j] = d * (1.0 - joint[j] * joint[j]);
  }
  std::vector<double> dx(C, 0.0);
  for (std::size_t k = 0; k < C; ++k) {
    const double v = x[k];
    double* grow = G + Wj.offset + k * J;
    const double* prow = P + Wj.offset + k * J;
    double s = 0.0;
    for (std::size_t j = 0; j < J; ++j) {
      if (v != 0.0) grow[j] += v * dj[j];
      s += prow[j] * dj[j];
    }
    dx[k] = s;
  }
  for (std::size_t j = 0; j < J; ++j) G[bj.offset + j] += dj[j];
  if (!mask_enc.empty()) {
    for (std::size_t k = 0; k < mask_enc.size(); ++k) dx[k] *= mask_enc[k];
  }
  for (std::size_t b = 0; b < kBranches; ++b) {
    if (ex.sequences[b].empty()) continue;
    for (std::size_t d = 0; d < 2; ++d) {
      const auto dir = direction(b, d);
      lstm_backward(P, layout_[dir.W].offset, layout_[dir.U].offset, layout_[dir.b].offset,
                    ex.sequences[b], E, H, d == 1, caches[b][d], dx.data() + (2 * b + d) * H, G);
    }
  }
  return loss;
}

std::array<double, 2> BilstmStack::predict_proba(const BilstmExample& ex) const {
  BilstmLayers l;
  example(ex, nullptr, {}, &l);
  return {1.0 - l.score, l.score};
}

BilstmLayers BilstmStack::extract_layers(const BilstmExample& ex) const {
  BilstmLayers l;
  example(ex, nullptr, {}, &l);
  return l;
}

std::vector<double> BilstmStack::embedding_block(const BilstmExample& ex) const {
  const auto l = extract_layers(ex);
  const std::size_t W = 2 * cfg_.units;
  std::vector<double> out;
  out.reserve(embedding_block_size());
  auto enc = [&](Branch b) {
    const auto start = l.concatenation.begin() + static_cast<std::ptrdiff_t>(static_cast<std::size_t>(b) * W);
    return std::vector<double>(start, start + static_cast<std::ptrdiff_t>(W));
  };
  for (Branch b : {Branch::kClaim, Branch::kSnippetA, Branch::kSnippetB}) {
    const auto e = enc(b);
    out.insert(out.end(), e.begin(), e.end());
  }
  const auto ta = enc(Branch::kTripletA), tb = enc(Branch::kTripletB);
  for (std::size_t k = 0; k < W; ++k) out.push_back(std::max(ta[k], tb[k]));
  out.insert(out.end(), l.joint.begin(), l.joint.end());
  return out;
}

double BilstmStack::loss_and_gradient(std::span<const BilstmExample> batch, std::span<double> grad,
                                      bool dropout, std::uint64_t dropout_seed) const {
  const std::size_t n = batch.size();
  if (n == 0) throw TrainingError("empty batch");
  const bool want_grad = !grad.empty();
  // Fixed chunking keeps the summation order independent of the thread count.
  const std::size_t chunks = std::min<std::size_t>(n, 8);
  std::vector<std::vector<double>> partial(chunks);
  std::vector<double> losses(n, 0.0);
  kernels::for_each_index(
      chunks,
      [&](std::size_t c) {
        if (want_grad) partial[c].assign(params_.size(), 0.0);
        for (std::size_t i = c; i < n; i += chunks) {
          Rng rng(mix_seed(dropout_seed, i));
          losses[i] = example(batch[i], dropout ? &rng : nullptr,
                              want_grad ? std::span<double>(partial[c]) : std::span<double>(),
                              nullptr);
        }
      },
      cfg_.policy);
  const double inv_n = 1.0 / static_cast<double>(n);
  double loss = 0.0;
  for (double l : losses) loss += l;
  loss *= inv_n;
  if (want_grad) {
    std::fill(grad.begin(), grad.end(), 0.0);
    for (const auto& p : partial) {
      for (std::size_t k = 0; k < grad.size(); ++k) grad[k] += p[k];
    }
    for (auto& g : grad) g *= inv_n;
  }
  return loss + nn::l2_penalty(layout_, params_, 2.0, grad);
}

void BilstmStack::write(std::ostream& out) const {
  nn::ModelFile f;
  f.kind = "bilstm";
  f.config["embedding_dim"] = std::to_string(cfg_.embedding_dim);
  f.config["units"] = std::to_string(cfg_.units);
  f.config["similarity_features"] = std::to_string(cfg_.similarity_features);
  f.config["joint"] = std::to_string(cfg_.joint);
  f.config["learning_rate"] = format_double(cfg_.learning_rate);
  f.config["lstm_l2"] = format_double(cfg_.lstm_l2);
  f.config["lstm_dropout"] = format_double(cfg_.lstm_dropout);
  f.config["joint_l2"] = format_double(cfg_.joint_l2);
  f.config["joint_dropout"] = format_double(cfg_.joint_dropout);
  f.config["batch"] = std::to_string(cfg_.batch);
  f.config["epochs"] = std::to_string(cfg_.epochs);
  f.config["max_len"] = std::to_string(cfg_.max_len);
  f.config["seed"] = std::to_string(cfg_.seed);
  f.params = params_;
  f.write(out);
}

BilstmStack BilstmStack::read(std::istream& in) {
  const auto f = nn::ModelFile::read(in, "bilstm");
  BilstmStack m;
  m.cfg_.embedding_dim = f.get_size("embedding_dim");
  m.cfg_.units = f.get_size("units");
  m.cfg_.similarity_features = f.get_size("similarity_features");
  m.cfg_.joint = f.get_size("joint");
  m.cfg_.learning_rate = f.get_double("learning_rate");
  m.cfg_.lstm_l2 = f.get_double("lstm_l2");
  m.cfg_.lstm_dropout = f.get_double("lstm_dropout");
  m.cfg_.joint_l2 = f.get_double("joint_l2");
  m.cfg_.joint_dropout = f.get_double("joint_dropout");
  m.cfg_.batch = f.get_size("batch");
  m.cfg_.epochs = f.get_size("epochs");
  m.cfg_.max_len = f.get_size("max_len");
  m.cfg_.seed = std::stoull(f.get("seed"));
  m.build_layout();
  if (f.params.size() != m.layout_.size()) throw SchemaError("bi-LSTM parameter count mismatch");
  m.params_ = f.params;
  return m;
}

void BilstmStack::save(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw Error("cannot write '" + path + "'");
  write(out);
}

BilstmStack BilstmStack::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open model '" + path + "'");
  return read(in);
}

BilstmStack train_bilstm_stack(std::span<const BilstmExample> examples, const BilstmConfig& cfg) {
  if (examples.empty()) throw TrainingError("no training examples");
  BilstmStack model(cfg);
  nn::RmsProp opt(cfg.learning_rate);
  Rng rng(mix_seed(cfg.seed, 1));
  const std::size_t n = examples.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  const std::size_t batch = std::max<std::size_t>(1, std::min(cfg.batch, n));
  std::vector<double> grad(model.params().size());
  std::vector<BilstmExample> bx;
  std::uint64_t step = 0;
  for (std::size_t epoch = 1; epoch <= cfg.epochs; ++epoch) {
    rng.shuffle(std::span<std::size_t>(order));
    double total = 0.0;
    for (std::size_t start = 0; start < n; start += batch) {
      const std::size_t m = std::min(batch, n - start);
      bx.clear();
      for (std::size_t i = 0; i < m; ++i) bx.push_back(examples[order[start + i]]);
      const double loss =
          model.loss_and_gradient(bx, grad, true, mix_seed(cfg.seed, 1000003 + step++));
      if (!std::isfinite(loss)) {
        throw TrainingError("bi-LSTM loss is not finite at epoch " + std::to_string(epoch));
      }
      total += loss * static_cast<double>(m);
      opt.step(model.params(), grad);
    }
    if (cfg.on_epoch) cfg.on_epoch(epoch, total / static_cast<double>(n));
  }
  return model;
}

}  // namespace fc
