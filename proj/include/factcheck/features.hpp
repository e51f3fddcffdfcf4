#pragma once

#include <cstddef>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace fc {

/// Dense row-major feature table with named columns and row ids.
struct FeatureMatrix {
  std::vector<std::string> columns;
  std::vector<std::string> ids;
  std::vector<double> values;

  std::size_t rows() const { return ids.size(); }
  std::size_t cols() const { return columns.size(); }
  std::span<const double> row(std::size_t r) const {
    return std::span<const double>(values).subspan(r * cols(), cols());
  }
  std::span<double> row(std::size_t r) { return std::span<double>(values).subspan(r * cols(), cols()); }

  void append(std::string id, std::span<const double> row_values);
  /// Rows picked by index, in the given order.
  FeatureMatrix select_rows(std::span<const std::size_t> rows) const;
  /// Column-wise concatenation; row ids must agree.
  static FeatureMatrix hconcat(const FeatureMatrix& a, const FeatureMatrix& b);
  bool operator==(const FeatureMatrix&) const = default;
};

/// Tab-separated: header `id<TAB>col...`, one row per line, shortest
/// round-trip decimals so a dump reads back bit-identically.
void write_feature_dump(std::ostream& out, const FeatureMatrix& m);
FeatureMatrix read_feature_dump(std::istream& in);
void save_feature_dump(const std::string& path, const FeatureMatrix& m);
FeatureMatrix load_feature_dump(const std::string& path);

/// Per-column z-scoring with statistics from the training rows. Constant
/// columns get scale 1.
class Standardizer {
 public:
  static Standardizer fit(const FeatureMatrix& m, std::span<const std::size_t> rows);
  static Standardizer fit(const FeatureMatrix& m);
  void apply(FeatureMatrix& m) const;
  void apply(std::span<double> row) const;
  const std::vector<double>& mean() const { return mean_; }
  const std::vector<double>& scale() const { return scale_; }

  /// "standardizer <n>", then the means and the scales, one line each.
  void write(std::ostream& out) const;
  static Standardizer read(std::istream& in);

 private:
  std::vector<double> mean_;
  std::vector<double> scale_;
};

}  // namespace fc
