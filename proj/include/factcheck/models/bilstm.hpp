#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <functional>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "factcheck/embeddings.hpp"
#include "factcheck/kernels.hpp"
#include "factcheck/models/nn.hpp"

namespace fc {

/// Text branches in input order.
enum class Branch : std::uint8_t {
  kClaim,
  kSnippetA,   // best snippet from the first engine
  kSnippetB,   // best snippet from the second engine
  kTripletA,   // best page triplet from the first engine
  kTripletB,
};
inline constexpr std::size_t kBranches = 5;

struct BilstmConfig {
  std::size_t embedding_dim = 100;
  std::size_t units = 25;
  std::size_t similarity_features = 0;
  std::size_t joint = 60;
  double learning_rate = 0.001;
  double lstm_l2 = 0.1;
  double lstm_dropout = 0.5;
  double joint_l2 = 0.01;
  double joint_dropout = 0.3;
  std::size_t batch = 32;
  std::size_t epochs = 400;
  /// Longer sequences keep their first max_len tokens.
  std::size_t max_len = 100;
  std::uint64_t seed = 0;
  kernels::Policy policy = kernels::Policy::kParallel;
  std::function<void(std::size_t, double)> on_epoch;
};

struct BilstmExample {
  /// Each sequence is len x embedding_dim, row-major; empty means no text.
  std::array<std::vector<double>, kBranches> sequences;
  std::vector<double> similarity;
  std::uint8_t label = 0;
};

/// Looks up each token (out-of-vocabulary tokens are skipped) and truncates
/// to max_len.
BilstmExample make_bilstm_example(const std::array<std::vector<std::string>, kBranches>& tokens,
                                  std::vector<double> similarity, std::uint8_t label,
                                  const VectorStore& vectors, std::size_t max_len = 100);

struct BilstmLayers {
  /// Branch encodings (5 x 2 units) followed by the similarity features.
  std::vector<double> concatenation;
  std::vector<double> joint;
  double score = 0.0;
};

/// Five bidirectional LSTM encoders (hard-sigmoid gates, tanh cell), a tanh
/// joint layer over their concatenation plus similarity features, and a
/// two-way softmax.
class BilstmStack {
 public:
  BilstmStack() = default;
  explicit BilstmStack(const BilstmConfig& cfg);

  const BilstmConfig& config() const { return cfg_; }
  std::span<double> params() { return params_; }
  std::span<const double> params() const { return params_; }

  std::array<double, 2> predict_proba(const BilstmExample& ex) const;
  double score(const BilstmExample& ex) const { return predict_proba(ex)[1]; }
  BilstmLayers extract_layers(const BilstmExample& ex) const;

  /// Claim, snippet A, snippet B, element-wise max of the two triplet
  /// encodings, then the joint layer: 4 x 2 units + joint values (260 by default).
  std::vector<double> embedding_block(const BilstmExample& ex) const;
  std::size_t embedding_block_size() const { return 8 * cfg_.units + cfg_.joint; }

  /// Mean cross-entropy over the batch plus the L2 terms (l2 * sum w^2).
  /// With `dropout` false no units are dropped; otherwise masks are drawn
  /// from mix_seed(dropout_seed, example index).
  double loss_and_gradient(std::span<const BilstmExample> batch, std::span<double> grad,
                           bool dropout = false, std::uint64_t dropout_seed = 0) const;

  void write(std::ostream& out) const;
  static BilstmStack read(std::istream& in);
  void save(const std::string& path) const;
  static BilstmStack load(const std::string& path);

 private:
  struct Direction {
    std::size_t W, U, b;
  };

  void build_layout();
  std::size_t concat_size() const { return kBranches * 2 * cfg_.units + cfg_.similarity_features; }
  Direction direction(std::size_t branch, std::size_t dir) const;
  double example(const BilstmExample& ex, Rng* dropout_rng, std::span<double> grad,
                 BilstmLayers* layers) const;

  BilstmConfig cfg_;
  nn::ParamLayout layout_;
  std::vector<double> params_;
  std::size_t joint_W_ = 0, joint_b_ = 0, out_W_ = 0, out_b_ = 0;
};

BilstmStack train_bilstm_stack(std::span<const BilstmExample> examples, const BilstmConfig& cfg);

}  // namespace fc
