#pragma once

#include <array>
#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace fc {

inline constexpr std::size_t kNumRelations = 18;
inline constexpr std::array<std::string_view, kNumRelations> kRelationNames = {
    "Attribution", "Background",  "Cause",        "Comparison",     "Condition",
    "Contrast",    "Elaboration", "Enablement",   "Evaluation",     "Explanation",
    "Joint",       "Manner-Means", "Topic-Comment", "Summary",      "Temporal",
    "Topic-Change", "Textual-Organization", "Same-Unit"};

inline constexpr std::size_t kDiscourseFeatures = kNumRelations + 2;

enum class NucleusSide : std::uint8_t { kLeft, kRight, kBoth };

/// Maps parser labels onto the 18 coarse relations. Canonical names match
/// case-insensitively (with '_' == '-'); anything else needs a table entry.
class RelationMap {
 public:
  RelationMap() = default;
  /// Lines `parser_label<TAB>Coarse-Relation`, '#' comments.
  static RelationMap load(const std::string& path);
  void add(std::string_view label, std::string_view coarse);
  std::optional<std::size_t> resolve(std::string_view label) const;

 private:
  std::unordered_map<std::string, std::size_t> table_;
};

/// A binary RST tree over elementary discourse units; leaves carry the
/// sentence they belong to.
class RstTree {
 public:
  struct Node {
    int relation = -1;  // index into kRelationNames; -1 for leaves
    NucleusSide side = NucleusSide::kBoth;
    int left = -1;
    int right = -1;
    int sentence_id = 0;
    std::array<int, 2> edu_span{0, 0};
    bool is_leaf() const { return relation < 0; }
  };

  static RstTree leaf(int sentence_id, std::array<int, 2> edu_span = {0, 0});
  static RstTree join(std::size_t relation, NucleusSide side, const RstTree& left,
                      const RstTree& right);

  const std::vector<Node>& nodes() const { return nodes_; }
  int root() const { return root_; }
  std::set<int> sentence_ids() const;
  std::size_t edu_count(int sentence_id) const;

 private:
  std::vector<Node> nodes_;
  int root_ = -1;

  int append(const RstTree& other);
};

/// Trees keyed by segment id. Record format (JSON Lines):
/// {"segment_id": ..., "tree": NODE}, NODE = {"relation", "nucleus_side",
/// "children": [NODE, NODE]} or {"leaf": {"sentence_id", "edu_span": [a, b]}}.
std::map<std::string, RstTree> load_rst(const std::string& path,
                                        const RelationMap& relations = {});
std::map<std::string, RstTree> parse_rst(std::istream& in, const RelationMap& relations = {});

/// 18 indicators (relations joining the target's units directly with another
/// sentence) followed by the nucleus and satellite EDU counts of the target.
std::array<double, kDiscourseFeatures> discourse_features(const RstTree& tree,
                                                          const std::set<int>& target_ids);

inline std::array<double, kDiscourseFeatures> discourse_features(const RstTree& tree,
                                                                 int target_sentence_id) {
  return discourse_features(tree, std::set<int>{target_sentence_id});
}

}  // namespace fc
