#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <string>
#include <string_view>
#include <vector>

#include "factcheck/models/bilstm.hpp"
#include "factcheck/models/ffnn.hpp"
#include "factcheck/models/multitask.hpp"
#include "factcheck/models/svm.hpp"

namespace fc {

enum class Task : std::uint8_t { kCheckworthy, kCqaFactcheck, kQuestionClass };
Task task_from_name(std::string_view name);
std::string_view to_string(Task t);

/// Flat `key = value` settings. Every key has a default; unknown keys are
/// rejected. List values are comma-separated.
class ExperimentConfig {
 public:
  ExperimentConfig();

  /// `key = value` lines, `#` comments. Relative paths resolve against
  /// `base_dir`.
  static ExperimentConfig parse(std::istream& in, const std::string& base_dir = "");
  /// A config file, or a run manifest (JSON with a "config" object).
  static ExperimentConfig load(const std::string& path);

  void set(const std::string& key, const std::string& value);
  const std::string& get(const std::string& key) const;
  bool has(const std::string& key) const { return !get(key).empty(); }
  double get_double(const std::string& key) const;
  std::size_t get_size(const std::string& key) const;
  bool get_bool(const std::string& key) const;
  std::vector<std::string> get_list(const std::string& key) const;
  const std::map<std::string, std::string>& values() const { return values_; }

  Task task() const { return task_from_name(get("task")); }
  /// `seeds` when set, else `seed`.
  std::vector<std::uint64_t> seeds() const;

  FfnnConfig ffnn() const;
  /// Variant tasks for `target_source` (ANY maps to the "any" head).
  MultiTaskConfig multitask() const;
  BilstmConfig bilstm(std::size_t embedding_dim, std::size_t similarity_features) const;
  SvmGrid svm_grid() const;

  /// One `key = value` line per key in key order.
  std::string canonical() const;
  std::uint64_t hash() const;

  /// Checks names, numbers and that every resource needed by the task and
  /// command exists. Throws ConfigError with the offending key.
  void validate(std::string_view command) const;

  /// Keys that name files or directories.
  static const std::vector<std::string>& path_keys();

 private:
  std::map<std::string, std::string> values_;
};

/// Label-matrix column of a source name or "ANY".
std::size_t label_column(std::string_view name);

}  // namespace fc
