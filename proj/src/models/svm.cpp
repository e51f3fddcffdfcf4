#include "factcheck/models/svm.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <numeric>
#include <string>

#include "factcheck/error.hpp"
#include "factcheck/models/nn.hpp"
#include "factcheck/numfmt.hpp"
#include "factcheck/rng.hpp"

namespace fc {

namespace {

constexpr double kTau = 1e-12;

void check_shape(std::span<const double> x, std::size_t cols, std::size_t n) {
  if (cols == 0 || x.size() != n * cols) throw Error("feature rows must be equal-length");
}

std::vector<double> gram(std::span<const double> x, std::size_t n, std::size_t cols, double gamma,
                         kernels::Policy policy) {
  std::vector<double> k(n * n);
  kernels::rbf_gram(x.data(), n, cols, gamma, k.data(), policy);
  return k;
}

}  // namespace

double SvmModel::decision(std::span<const double> row) const {
  return decision(row, 1)[0];
}

std::vector<double> SvmModel::decision(std::span<const double> x, std::size_t n) const {
  check_shape(x, cols_, n);
  const std::size_t m = coef_.size();
  std::vector<double> out(n, -bias_);
  if (m == 0) return out;
  std::vector<double> k(n * m);
  kernels::rbf_cross(x.data(), n, sv_.data(), m, cols_, gamma_, k.data(), policy_);
  for (std::size_t i = 0; i < n; ++i) {
    double s = 0.0;
    for (std::size_t j = 0; j < m; ++j) s += coef_[j] * k[i * m + j];
    out[i] += s;
  }
  return out;
}

std::vector<std::uint8_t> SvmModel::predict(std::span<const double> x, std::size_t n) const {
  const auto d = decision(x, n);
  std::vector<std::uint8_t> out(n);
  for (std::size_t i = 0; i < n; ++i) out[i] = d[i] > 0.0 ? 1 : 0;
  return out;
}

void SvmModel::write(std::ostream& out) const {
  nn::ModelFile f;
  f.kind = "svm";
  f.config["c"] = format_double(c_);
  f.config["gamma"] = format_double(gamma_);
  f.config["bias"] = format_double(bias_);
  f.config["cols"] = std::to_string(cols_);
  f.config["support"] = std::to_string(coef_.size());
  f.params = coef_;
  f.params.insert(f.params.end(), sv_.begin(), sv_.end());
  f.write(out);
}

SvmModel SvmModel::read(std::istream& in) {
  const auto f = nn::ModelFile::read(in, "svm");
  SvmModel m;
  m.c_ = f.get_double("c");
  m.gamma_ = f.get_double("gamma");
  m.bias_ = f.get_double("bias");
  m.cols_ = f.get_size("cols");
  const std::size_t s = f.get_size("support");
  if (f.params.size() != s * (1 + m.cols_)) throw SchemaError("SVM parameter count mismatch");
  m.coef_.assign(f.params.begin(), f.params.begin() + static_cast<std::ptrdiff_t>(s));
  m.sv_.assign(f.params.begin() + static_cast<std::ptrdiff_t>(s), f.params.end());
  return m;
}

void SvmModel::save(const std::string& path) const {
  std::ofstream out(path);
  if (!out) throw Error("cannot write '" + path + "'");
  write(out);
}

SvmModel SvmModel::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open model '" + path + "'");
  return read(in);
}

SvmFit train_svm_rbf(std::span<const double> x, std::size_t cols, std::span<const std::uint8_t> y,
                     const SvmConfig& cfg) {
  const std::size_t n = y.size();
  check_shape(x, cols, n);
  if (!(cfg.c > 0.0) || !(cfg.gamma > 0.0)) throw ConfigError("SVM c and gamma must be positive");
  std::size_t pos = 0;
  for (auto v : y) pos += v ? 1 : 0;
  if (pos == 0 || pos == n) throw TrainingError("SVM training needs both classes");

  const auto K = gram(x, n, cols, cfg.gamma, cfg.policy);
  std::vector<double> ys(n), alpha(n, 0.0), G(n, -1.0);
  for (std::size_t i = 0; i < n; ++i) ys[i] = y[i] ? 1.0 : -1.0;
  const double C = cfg.c;
  auto upper = [&](std::size_t t) { return alpha[t] >= C; };
  auto lower = [&](std::size_t t) { return alpha[t] <= 0.0; };

  SvmFit fit;
  std::size_t iter = 0;
  for (; iter < cfg.max_iter; ++iter) {
    double gmax = -std::numeric_limits<double>::infinity();
    double gmax2 = -std::numeric_limits<double>::infinity();
    std::size_t i = n, j = n;
    for (std::size_t t = 0; t < n; ++t) {
      if (ys[t] > 0) {
        if (!upper(t) && -G[t] >= gmax) gmax = -G[t], i = t;
      } else {
        if (!lower(t) && G[t] >= gmax) gmax = G[t], i = t;
      }
    }
    if (i == n) {
      fit.converged = true;
      break;
    }
    const double* Ki = K.data() + i * n;
    double best = std::numeric_limits<double>::infinity();
    for (std::size_t t = 0; t < n; ++t) {
      double diff;
      if (ys[t] > 0) {
        if (lower(t)) continue;
        diff = gmax + G[t];
        gmax2 = std::max(gmax2, G[t]);
      } else {
        if (upper(t)) continue;
        diff = gmax - G[t];
        gmax2 = std::max(gmax2, -G[t]);
      }
      if (diff <= 0.0) continue;
      double quad = Ki[i] + K[t * n + t] - 2.0 * Ki[t];
      if (quad <= 0.0) quad = kTau;
      const double obj = -(diff * diff) / quad;
      if (obj <= best) best = obj, j = t;
    }
    if (gmax + gmax2 < cfg.eps || j == n) {
      fit.converged = true;
      break;
    }

    const double* Kj = K.data() + j * n;
    const double old_i = alpha[i], old_j = alpha[j];
    const double kij = Ki[j];
    if (ys[i] != ys[j]) {
      double quad = Ki[i] + Kj[j] + 2.0 * kij;
      if (quad <= 0.0) quad = kTau;
      // Q_ij = y_i y_j K_ij = -K_ij here.
      const double delta = (-G[i] - G[j]) / quad;
      const double diff = alpha[i] - alpha[j];
      alpha[i] += delta;
      alpha[j] += delta;
      if (diff > 0) {
        if (alpha[j] < 0) alpha[j] = 0, alpha[i] = diff;
      } else {
        if (alpha[i] < 0) alpha[i] = 0, alpha[j] = -diff;
      }
      if (diff > 0) {
        if (alpha[i] > C) alpha[i] = C, alpha[j] = C - diff;
      } else {
        if (alpha[j] > C) alpha[j] = C, alpha[i] = C + diff;
      }
    } else {
      double quad = Ki[i] + Kj[j] - 2.0 * kij;
      if (quad <= 0.0) quad = kTau;
      const double delta = (G[i] - G[j]) / quad;
      const double sum = alpha[i] + alpha[j];
      alpha[i] -= delta;
      alpha[j] += delta;
      if (sum > C) {
        if (alpha[i] > C) alpha[i] = C, alpha[j] = sum - C;
      } else {
        if (alpha[j] < 0) alpha[j] = 0, alpha[i] = sum;
      }
      if (sum > C) {
        if (alpha[j] > C) alpha[j] = C, alpha[i] = sum - C;
      } else {
        if (alpha[i] < 0) alpha[i] = 0, alpha[j] = sum;
      }
    }
    const double di = alpha[i] - old_i, dj = alpha[j] - old_j;
    for (std::size_t t = 0; t < n; ++t) {
      G[t] += ys[t] * (ys[i] * Ki[t] * di + ys[j] * Kj[t] * dj);
    }
  }
  fit.iterations = iter;

  // Bias from free vectors, else the midpoint of the feasible interval.
  double ub = std::numeric_limits<double>::infinity();
  double lb = -std::numeric_limits<double>::infinity();
  double sum_free = 0.0;
  std::size_t n_free = 0;
  for (std::size_t t = 0; t < n; ++t) {
    const double yg = ys[t] * G[t];
    if (upper(t)) {
      if (ys[t] < 0) ub = std::min(ub, yg);
      else lb = std::max(lb, yg);
    } else if (lower(t)) {
      if (ys[t] > 0) ub = std::min(ub, yg);
      else lb = std::max(lb, yg);
    } else {
      ++n_free;
      sum_free += yg;
    }
  }
  const double rho = n_free > 0 ? sum_free / static_cast<double>(n_free) : (ub + lb) / 2.0;

  SvmModel& m = fit.model;
  m.c_ = cfg.c;
  m.gamma_ = cfg.gamma;
  m.bias_ = rho;
  m.cols_ = cols;
  m.policy_ = cfg.policy;
  for (std::size_t t = 0; t < n; ++t) {
    if (alpha[t] <= 0.0) continue;
    m.coef_.push_back(alpha[t] * ys[t]);
    m.sv_.insert(m.sv_.end(), x.begin() + static_cast<std::ptrdiff_t>(t * cols),
                 x.begin() + static_cast<std::ptrdiff_t>((t + 1) * cols));
  }
  fit.alpha = std::move(alpha);
  return fit;
}

double kkt_violation(std::span<const double> x, std::size_t cols, std::span<const std::uint8_t> y,
                     std::span<const double> alpha, double bias, double c, double gamma) {
  const std::size_t n = y.size();
  check_shape(x, cols, n);
  if (alpha.size() != n) throw Error("alpha length does not match the training rows");
  double worst = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    double f = -bias;
    for (std::size_t j = 0; j < n; ++j) {
      if (alpha[j] == 0.0) continue;
      double d2 = 0.0;
      for (std::size_t k = 0; k < cols; ++k) {
        const double d = x[i * cols + k] - x[j * cols + k];
        d2 += d * d;
      }
      f += alpha[j] * (y[j] ? 1.0 : -1.0) * std::exp(-gamma * d2);
    }
    const double yf = (y[i] ? 1.0 : -1.0) * f;
    double v;
    if (alpha[i] <= 0.0) v = std::max(0.0, 1.0 - yf);
    else if (alpha[i] >= c) v = std::max(0.0, yf - 1.0);
    else v = std::abs(yf - 1.0);
    worst = std::max(worst, v);
  }
  return worst;
}

SvmGrid SvmGrid::standard() {
  SvmGrid g;
  for (int e = -5; e <= 15; e += 2) g.cs.push_back(std::ldexp(1.0, e));
  for (int e = -15; e <= 3; e += 2) g.gammas.push_back(std::ldexp(1.0, e));
  return g;
}

std::vector<std::size_t> stratified_folds(std::span<const std::uint8_t> y, std::size_t folds,
                                          std::uint64_t seed) {
  if (folds < 2) throw ConfigError("cross-validation needs at least 2 folds");
  std::vector<std::size_t> out(y.size());
  Rng rng(seed);
  for (std::uint8_t cls : {std::uint8_t{0}, std::uint8_t{1}}) {
    std::vector<std::size_t> idx;
    for (std::size_t i = 0; i < y.size(); ++i) {
      if ((y[i] ? 1 : 0) == cls) idx.push_back(i);
    }
    rng.shuffle(std::span<std::size_t>(idx));
    for (std::size_t k = 0; k < idx.size(); ++k) out[idx[k]] = k % folds;
  }
  return out;
}

GridSearchResult grid_search_svm(std::span<const double> x, std::size_t cols,
                                 std::span<const std::uint8_t> y, const SvmGrid& grid,
                                 SvmConfig base) {
  const std::size_t n = y.size();
  check_shape(x, cols, n);
  if (grid.cs.empty() || grid.gammas.empty()) throw ConfigError("empty SVM grid");
  std::size_t pos = 0;
  for (auto v : y) pos += v ? 1 : 0;
  if (pos == 0 || pos == n) throw TrainingError("SVM training needs both classes");
  const std::size_t folds = std::min(grid.folds, std::min(pos, n - pos));
  if (folds < 2) throw TrainingError("too few examples per class for cross-validation");
  const auto fold = stratified_folds(y, folds, grid.seed);

  GridSearchResult res;
  res.table.resize(grid.cs.size() * grid.gammas.size());
  const auto outer = base.policy;
  kernels::for_each_index(
      res.table.size(),
      [&](std::size_t p) {
        SvmConfig cfg = base;
        cfg.c = grid.cs[p / grid.gammas.size()];
        cfg.gamma = grid.gammas[p % grid.gammas.size()];
        cfg.policy = kernels::Policy::kSerial;
        std::size_t correct = 0;
        for (std::size_t f = 0; f < folds; ++f) {
          std::vector<double> tx, vx;
          std::vector<std::uint8_t> ty, vy;
          for (std::size_t i = 0; i < n; ++i) {
            auto& dx = fold[i] == f ? vx : tx;
            auto& dy = fold[i] == f ? vy : ty;
            dx.insert(dx.end(), x.begin() + static_cast<std::ptrdiff_t>(i * cols),
                      x.begin() + static_cast<std::ptrdiff_t>((i + 1) * cols));
            dy.push_back(y[i]);
          }
          const auto model = train_svm_rbf(tx, cols, ty, cfg).model;
          const auto pred = model.predict(vx, vy.size());
          for (std::size_t i = 0; i < vy.size(); ++i) correct += pred[i] == (vy[i] ? 1 : 0);
        }
        res.table[p] = {cfg.c, cfg.gamma, static_cast<double>(correct) / static_cast<double>(n)};
      },
      outer);
  res.best = res.table[0];
  for (const auto& g : res.table) {
    if (g.accuracy > res.best.accuracy) res.best = g;
  }
  SvmConfig cfg = base;
  cfg.c = res.best.c;
  cfg.gamma = res.best.gamma;
  res.model = train_svm_rbf(x, cols, y, cfg).model;
  return res;
}

std::vector<double> SvmMulticlass::decisions(std::span<const double> row) const {
  std::vector<double> d;
  d.reserve(models_.size());
  for (const auto& m : models_) d.push_back(m.decision(row));
  return d;
}

std::size_t SvmMulticlass::predict(std::span<const double> row) const {
  const auto d = decisions(row);
  return static_cast<std::size_t>(std::max_element(d.begin(), d.end()) - d.begin());
}

void SvmMulticlass::write(std::ostream& out) const {
  out << "svm-multiclass " << models_.size() << '\n';
  for (const auto& m : models_) m.write(out);
}

SvmMulticlass SvmMulticlass::read(std::istream& in) {
  std::string magic;
  std::size_t k = 0;
  if (!(in >> magic >> k) || magic != "svm-multiclass") {
    throw ParseError("not a multiclass SVM file", 1);
  }
  in.ignore(std::numeric_limits<std::streamsize>::max(), '\n');
  SvmMulticlass m;
  for (std::size_t i = 0; i < k; ++i) {
    m.models_.push_back(SvmModel::read(in));
    in.ignore(std::numeric_limits<std::streamsize>::max(), '\n');
  }
  return m;
}

SvmMulticlass train_svm_multiclass(std::span<const double> x, std::size_t cols,
                                   std::span<const std::size_t> y, std::size_t classes,
                                   const SvmConfig& cfg) {
  if (classes < 2) throw ConfigError("multiclass SVM needs at least 2 classes");
  SvmMulticlass out;
  std::vector<std::uint8_t> bin(y.size());
  for (std::size_t k = 0; k < classes; ++k) {
    for (std::size_t i = 0; i < y.size(); ++i) {
      if (y[i] >= classes) throw Error("class id out of range");
      bin[i] = y[i] == k ? 1 : 0;
    }
    out.models_.push_back(train_svm_rbf(x, cols, bin, cfg).model);
  }
  return out;
}

double LinearSvm::decision(const SparseVector& row) const {
  double s = b_;
  for (const auto& [k, v] : row) {
    if (k < w_.size()) s += w_[k] * v;
  }
  return s;
}

LinearSvm train_linear_svm(std::span<const SparseVector> rows, std::size_t dims,
                           std::span<const std::uint8_t> y, const LinearSvmConfig& cfg) {
  const std::size_t n = rows.size();
  if (n != y.size()) throw Error("feature and label counts differ");
  if (!(cfg.c > 0.0)) throw ConfigError("SVM c must be positive");
  std::size_t pos = 0;
  for (auto v : y) pos += v ? 1 : 0;
  if (pos == 0 || pos == n) throw TrainingError("SVM training needs both classes");

  LinearSvm m;
  m.w_.assign(dims, 0.0);
  std::vector<double> alpha(n, 0.0), qd(n, 1.0);
  for (std::size_t i = 0; i < n; ++i) {
    for (const auto& [k, v] : rows[i]) {
      if (k >= dims) throw Error("sparse index beyond the declared dimension");
      qd[i] += v * v;
    }
  }
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  Rng rng(cfg.seed);
  for (std::size_t epoch = 0; epoch < cfg.max_epochs; ++epoch) {
    rng.shuffle(std::span<std::size_t>(order));
    double pg_max = -std::numeric_limits<double>::infinity();
    double pg_min = std::numeric_limits<double>::infinity();
    for (auto i : order) {
      const double yi = y[i] ? 1.0 : -1.0;
      const double g = yi * m.decision(rows[i]) - 1.0;
      double pg = g;
      if (alpha[i] <= 0.0) pg = std::min(g, 0.0);
      else if (alpha[i] >= cfg.c) pg = std::max(g, 0.0);
      pg_max = std::max(pg_max, pg);
      pg_min = std::min(pg_min, pg);
      if (pg == 0.0) continue;
      const double old = alpha[i];
      alpha[i] = std::clamp(old - g / qd[i], 0.0, cfg.c);
      const double d = (alpha[i] - old) * yi;
      for (const auto& [k, v] : rows[i]) m.w_[k] += d * v;
      m.b_ += d;
    }
    if (pg_max - pg_min < cfg.eps) break;
  }
  return m;
}

}  // namespace fc
