#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "factcheck/kernels.hpp"
#include "factcheck/models/nn.hpp"

namespace fc {

struct FfnnConfig {
  std::vector<std::size_t> hidden{200, 50};
  std::size_t epochs = 300;
  std::size_t batch = 550;
  double learning_rate = 0.04;
  double l2 = 0.0001;
  double momentum = 0.9;
  std::uint64_t seed = 0;
  kernels::Policy policy = kernels::Policy::kParallel;
  /// Called after every epoch with the mean training loss.
  std::function<void(std::size_t, double)> on_epoch;
};

/// Feed-forward ranker: ReLU hidden layers and a two-way softmax output,
/// trained on mean cross-entropy plus l2 / 2 * ||W||^2 / batch.
class Ffnn {
 public:
  Ffnn() = default;
  Ffnn(std::size_t inputs, const FfnnConfig& cfg);

  std::size_t inputs() const { return inputs_; }
  const FfnnConfig& config() const { return cfg_; }
  std::span<double> params() { return params_; }
  std::span<const double> params() const { return params_; }

  /// n x 2 class probabilities for row-major X[n x inputs].
  std::vector<double> predict_proba(std::span<const double> x, std::size_t n) const;
  std::array<double, 2> predict_proba(std::span<const double> row) const;
  /// Positive-class probability.
  double score(std::span<const double> row) const;
  std::vector<double> scores(std::span<const double> x, std::size_t n) const;

  /// Mean loss over the n rows; the gradient is written to `grad` when it is
  /// non-empty (same length as params()).
  double loss_and_gradient(std::span<const double> x, std::span<const std::uint8_t> y,
                           std::size_t n, std::span<double> grad) const;

  void write(std::ostream& out) const;
  static Ffnn read(std::istream& in);
  void save(const std::string& path) const;
  static Ffnn load(const std::string& path);

 private:
  void build_layout();
  std::vector<std::size_t> sizes() const;

  std::size_t inputs_ = 0;
  FfnnConfig cfg_;
  nn::ParamLayout layout_;
  std::vector<double> params_;
};

/// Mini-batch Nesterov SGD, reshuffling every epoch from the seed. Throws
/// TrainingError when the loss stops being finite.
Ffnn train_ffnn(std::span<const double> x, std::size_t cols, std::span<const std::uint8_t> y,
                const FfnnConfig& cfg);

}  // namespace fc
