#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "factcheck/kernels.hpp"
#include "factcheck/tfidf.hpp"

namespace fc {

struct SvmFit;

struct SvmConfig {
  double c = 1.0;
  double gamma = 0.1;
  /// Stopping gap on the maximal violating pair.
  double eps = 1e-5;
  std::size_t max_iter = 10'000'000;
  kernels::Policy policy = kernels::Policy::kParallel;
};

/// Binary RBF-kernel SVM. Labels are 0/1 with 1 the positive class.
class SvmModel {
 public:
  double c() const { return c_; }
  double gamma() const { return gamma_; }
  double bias() const { return bias_; }
  std::size_t cols() const { return cols_; }
  std::size_t support_count() const { return coef_.size(); }
  const std::vector<double>& support_vectors() const { return sv_; }
  /// alpha_i * y_i per support vector, y in {-1, +1}.
  const std::vector<double>& dual_coef() const { return coef_; }

  double decision(std::span<const double> row) const;
  std::vector<double> decision(std::span<const double> x, std::size_t n) const;
  /// 1 when decision > 0.
  std::uint8_t predict(std::span<const double> row) const { return decision(row) > 0.0 ? 1 : 0; }
  std::vector<std::uint8_t> predict(std::span<const double> x, std::size_t n) const;

  void write(std::ostream& out) const;
  static SvmModel read(std::istream& in);
  void save(const std::string& path) const;
  static SvmModel load(const std::string& path);

  friend SvmFit train_svm_rbf(std::span<const double>, std::size_t, std::span<const std::uint8_t>,
                              const SvmConfig&);

 private:
  double c_ = 1.0, gamma_ = 0.1, bias_ = 0.0;
  std::size_t cols_ = 0;
  std::vector<double> sv_;
  std::vector<double> coef_;
  kernels::Policy policy_ = kernels::Policy::kParallel;
};

struct SvmFit {
  SvmModel model;
  /// Full dual vector over the training rows (zeros kept).
  std::vector<double> alpha;
  std::size_t iterations = 0;
  bool converged = false;
};

/// SMO with second-order working-set selection on the full kernel matrix.
/// Throws TrainingError when only one class is present.
SvmFit train_svm_rbf(std::span<const double> x, std::size_t cols, std::span<const std::uint8_t> y,
                     const SvmConfig& cfg);

/// Largest violation of the KKT conditions of (alpha, bias) on the training
/// set, recomputed from scratch:
///   alpha = 0     -> y f(x) >= 1
///   0 < alpha < C -> y f(x) == 1
///   alpha = C     -> y f(x) <= 1
double kkt_violation(std::span<const double> x, std::size_t cols, std::span<const std::uint8_t> y,
                     std::span<const double> alpha, double bias, double c, double gamma);

struct SvmGrid {
  std::vector<double> cs;
  std::vector<double> gammas;
  std::size_t folds = 5;
  std::uint64_t seed = 0;
  /// Powers of two: c in 2^-5..2^15 step 2^2, gamma in 2^-15..2^3 step 2^2.
  static SvmGrid standard();
};

struct GridPoint {
  double c = 0.0, gamma = 0.0, accuracy = 0.0;
};

struct GridSearchResult {
  GridPoint best;
  /// Row-major over (c, gamma) in grid order.
  std::vector<GridPoint> table;
  SvmModel model;
};

/// Stratified k-fold CV accuracy per grid point; ties go to the earlier point.
/// The returned model is refit on all rows with the chosen point.
GridSearchResult grid_search_svm(std::span<const double> x, std::size_t cols,
                                 std::span<const std::uint8_t> y, const SvmGrid& grid,
                                 SvmConfig base = {});

/// Stratified fold assignment (0..folds-1) per row, seeded.
std::vector<std::size_t> stratified_folds(std::span<const std::uint8_t> y, std::size_t folds,
                                          std::uint64_t seed);

/// One-vs-rest over class ids 0..classes-1; predicts the largest decision.
class SvmMulticlass {
 public:
  std::size_t classes() const { return models_.size(); }
  const SvmModel& model(std::size_t k) const { return models_[k]; }
  std::size_t predict(std::span<const double> row) const;
  std::vector<double> decisions(std::span<const double> row) const;

  void write(std::ostream& out) const;
  static SvmMulticlass read(std::istream& in);

  friend SvmMulticlass train_svm_multiclass(std::span<const double>, std::size_t,
                                            std::span<const std::size_t>, std::size_t,
                                            const SvmConfig&);

 private:
  std::vector<SvmModel> models_;
};

SvmMulticlass train_svm_multiclass(std::span<const double> x, std::size_t cols,
                                   std::span<const std::size_t> y, std::size_t classes,
                                   const SvmConfig& cfg);

struct LinearSvmConfig {
  double c = 1.0;
  double eps = 1e-4;
  std::size_t max_epochs = 1000;
  std::uint64_t seed = 0;
};

/// L2-regularised hinge-loss linear SVM on sparse rows, trained by dual
/// coordinate descent. A constant 1 feature carries the bias.
class LinearSvm {
 public:
  double decision(const SparseVector& row) const;
  const std::vector<double>& weights() const { return w_; }
  double bias() const { return b_; }

  friend LinearSvm train_linear_svm(std::span<const SparseVector>, std::size_t,
                                    std::span<const std::uint8_t>, const LinearSvmConfig&);

 private:
  std::vector<double> w_;
  double b_ = 0.0;
};

LinearSvm train_linear_svm(std::span<const SparseVector> rows, std::size_t dims,
                           std::span<const std::uint8_t> y, const LinearSvmConfig& cfg);

}  // namespace fc
