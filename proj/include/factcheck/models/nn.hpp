#pragma once

#include <cmath>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "factcheck/rng.hpp"

namespace fc::nn {

/// A named block inside a flat parameter vector, row-major rows x cols.
struct Tensor {
  std::string name;
  std::size_t offset = 0;
  std::size_t rows = 0;
  std::size_t cols = 0;
  /// Subject to L2 weight decay (weights yes, biases no).
  bool decay = true;
  double l2 = 0.0;

  std::size_t size() const { return rows * cols; }
};

class ParamLayout {
 public:
  std::size_t add(std::string name, std::size_t rows, std::size_t cols, bool decay, double l2 = 0.0);
  const Tensor& operator[](std::size_t i) const { return tensors_[i]; }
  const std::vector<Tensor>& tensors() const { return tensors_; }
  std::size_t size() const { return total_; }

 private:
  std::vector<Tensor> tensors_;
  std::size_t total_ = 0;
};

/// Uniform in [-b, b] with b = sqrt(6 / fan_in), fan_in = tensor rows.
void init_fan_in(std::span<double> params, const Tensor& t, Rng& rng);

inline double relu(double x) { return x > 0.0 ? x : 0.0; }
inline double sigmoid(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}
/// clip(0.2 x + 0.5, 0, 1).
inline double hard_sigmoid(double x) {
  const double y = 0.2 * x + 0.5;
  return y < 0.0 ? 0.0 : (y > 1.0 ? 1.0 : y);
}
inline double hard_sigmoid_grad(double x) { return (x > -2.5 && x < 2.5) ? 0.2 : 0.0; }

/// Two-way softmax of logits (z0, z1), returned as probabilities.
inline std::pair<double, double> softmax2(double z0, double z1) {
  const double m = z0 > z1 ? z0 : z1;
  const double e0 = std::exp(z0 - m), e1 = std::exp(z1 - m);
  return {e0 / (e0 + e1), e1 / (e0 + e1)};
}

/// sklearn-style Nesterov momentum:
///   v <- mu * v - lr * g;  w <- w + mu * v - lr * g.
class NesterovSgd {
 public:
  NesterovSgd(double lr, double momentum) : lr_(lr), mu_(momentum) {}
  void step(std::span<double> params, std::span<const double> grad);

 private:
  double lr_, mu_;
  std::vector<double> velocity_;
};

/// cache <- rho * cache + (1 - rho) g^2;  w <- w - lr g / (sqrt(cache) + eps).
class RmsProp {
 public:
  explicit RmsProp(double lr, double rho = 0.9, double eps = 1e-7) : lr_(lr), rho_(rho), eps_(eps) {}
  void step(std::span<double> params, std::span<const double> grad);

 private:
  double lr_, rho_, eps_;
  std::vector<double> cache_;
};

/// Sum over decayed tensors of l2 / 2 * ||W||^2, and the matching gradient
/// added into `grad` (scaled by `scale`).
double l2_penalty(const ParamLayout& layout, std::span<const double> params, double scale,
                  std::span<double> grad);

// ---------------------------------------------------------------------------
// Model files: a header line, `key value` config lines, then a parameter block.

struct ModelFile {
  std::string kind;
  int version = 1;
  std::map<std::string, std::string> config;
  std::vector<double> params;

  void write(std::ostream& out) const;
  static ModelFile read(std::istream& in, const std::string& expected_kind);
  void save(const std::string& path) const;
  static ModelFile load(const std::string& path, const std::string& expected_kind);

  const std::string& get(const std::string& key) const;
  double get_double(const std::string& key) const;
  std::size_t get_size(const std::string& key) const;
  std::vector<std::size_t> get_sizes(const std::string& key) const;
};

std::string join_sizes(std::span<const std::size_t> xs);

/// Central finite-difference check of `grad` for `loss` at `params`.
/// Returns the largest |a - n| / max(|a| + |n|, floor) over the checked indices.
double gradient_check(std::vector<double> params, std::span<const double> grad,
                      const std::function<double(std::span<const double>)>& loss,
                      std::span<const std::size_t> indices, double eps = 1e-6,
                      double floor = 1e-6);

}  // namespace fc::nn
