#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "factcheck/corpus.hpp"
#include "factcheck/kernels.hpp"
#include "factcheck/models/nn.hpp"

namespace fc {

struct MultiTaskConfig {
  std::size_t shared = 300;
  std::size_t task_hidden = 300;
  /// Label-matrix columns (0..8 sources, 9 ANY), one head each.
  std::vector<std::size_t> tasks;
  /// Loss weight per task; empty means 1 for all. A zero weight freezes the
  /// head's contribution to the shared layer.
  std::vector<double> task_weights;
  /// Index into `tasks` of the head whose output is used for ranking.
  std::size_t score_task = 0;
  std::size_t epochs = 100;
  std::size_t batch = 500;
  double learning_rate = 0.08;
  double momentum = 0.7;
  double l2 = 0.0;
  std::uint64_t seed = 0;
  kernels::Policy policy = kernels::Policy::kParallel;
  std::function<void(std::size_t, double)> on_epoch;
};

enum class MultiTaskVariant : std::uint8_t { kSingleton, kMulti, kMultiAny, kAny, kSingletonAny };

MultiTaskVariant multitask_variant_from_name(std::string_view name);
std::string_view to_string(MultiTaskVariant v);

/// Task set of a variant for one target source:
/// singleton {target}, multi {9 sources}, multi+any {9 sources, ANY},
/// any {ANY} and singleton+any {target, ANY}. The score head is the target's
/// head (ANY's for the "any" variant).
MultiTaskConfig variant(MultiTaskVariant kind, Source target, MultiTaskConfig base = {});

/// One shared ReLU layer, then per task a ReLU layer and a sigmoid output.
/// The loss is the weighted sum over tasks of mean binary cross-entropy.
class MultiTaskNet {
 public:
  MultiTaskNet() = default;
  MultiTaskNet(std::size_t inputs, const MultiTaskConfig& cfg);

  std::size_t inputs() const { return inputs_; }
  std::size_t heads() const { return cfg_.tasks.size(); }
  const MultiTaskConfig& config() const { return cfg_; }
  std::span<double> params() { return params_; }
  std::span<const double> params() const { return params_; }
  /// Range of the shared layer's parameters inside params().
  std::pair<std::size_t, std::size_t> shared_range() const;
  /// Range of head t's private parameters (hidden layer and output).
  std::pair<std::size_t, std::size_t> head_range(std::size_t t) const;

  /// n x heads sigmoid outputs.
  std::vector<double> predict(std::span<const double> x, std::size_t n) const;
  /// Output of the score head for every row.
  std::vector<double> scores(std::span<const double> x, std::size_t n) const;

  /// `labels` is n x label_cols (row-major); heads read their task column.
  double loss_and_gradient(std::span<const double> x, std::span<const std::uint8_t> labels,
                           std::size_t label_cols, std::size_t n, std::span<double> grad,
                           std::span<const double> weights_override = {}) const;

  void write(std::ostream& out) const;
  static MultiTaskNet read(std::istream& in);
  void save(const std::string& path) const;
  static MultiTaskNet load(const std::string& path);

 private:
  void build_layout();
  double task_weight(std::size_t t, std::span<const double> override_w) const;

  std::size_t inputs_ = 0;
  MultiTaskConfig cfg_;
  nn::ParamLayout layout_;
  std::vector<double> params_;
};

/// Throws ConfigError when a task column is outside the label matrix.
MultiTaskNet train_multitask(std::span<const double> x, std::size_t cols,
                             std::span<const std::uint8_t> labels, std::size_t label_cols,
                             const MultiTaskConfig& cfg);

}  // namespace fc
