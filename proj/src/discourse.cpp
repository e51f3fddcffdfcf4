#include "factcheck/discourse.hpp"

#include <algorithm>
#include <fstream>

#include "factcheck/error.hpp"
#include "factcheck/text.hpp"
#include <json.hpp>

namespace fc {
namespace {

using json = nlohmann::json;

std::string normalise_label(std::string_view s) {
  std::string out = text::lower(s);
  std::replace(out.begin(), out.end(), '_', '-');
  return out;
}

}  // namespace

RelationMap RelationMap::load(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open relation map '" + path + "'");
  RelationMap m;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    const auto tab = line.find('\t');
    if (tab == std::string::npos) throw ParseError("relation map needs label<TAB>relation", lineno);
    std::string coarse = line.substr(tab + 1);
    while (!coarse.empty() && (coarse.back() == '\r' || coarse.back() == ' ')) coarse.pop_back();
    m.add(line.substr(0, tab), coarse);
  }
  return m;
}

void RelationMap::add(std::string_view label, std::string_view coarse) {
  const std::string target = normalise_label(coarse);
  for (std::size_t i = 0; i < kNumRelations; ++i) {
    if (normalise_label(kRelationNames[i]) == target) {
      table_[normalise_label(label)] = i;
      return;
    }
  }
  throw SchemaError("relation map target '" + std::string(coarse) + "' is not a known relation");
}

std::optional<std::size_t> RelationMap::resolve(std::string_view label) const {
  const std::string norm = normalise_label(label);
  for (std::size_t i = 0; i < kNumRelations; ++i) {
    if (normalise_label(kRelationNames[i]) == norm) return i;
  }
  if (auto it = table_.find(norm); it != table_.end()) return it->second;
  return std::nullopt;
}

RstTree RstTree::leaf(int sentence_id, std::array<int, 2> edu_span) {
  RstTree t;
  Node n;
  n.sentence_id = sentence_id;
  n.edu_span = edu_span;
  t.nodes_.push_back(n);
  t.root_ = 0;
  return t;
}

int RstTree::append(const RstTree& other) {
  const int offset = static_cast<int>(nodes_.size());
  for (Node n : other.nodes_) {
    if (n.left >= 0) n.left += offset;
    if (n.right >= 0) n.right += offset;
    nodes_.push_back(n);
  }
  return other.root_ + offset;
}

RstTree RstTree::join(std::size_t relation, NucleusSide side, const RstTree& left,
                      const RstTree& right) {
  if (relation >= kNumRelations) throw SchemaError("relation index out of range");
  RstTree t;
  const int l = t.append(left);
  const int r = t.append(right);
  Node n;
  n.relation = static_cast<int>(relation);
  n.side = side;
  n.left = l;
  n.right = r;
  t.nodes_.push_back(n);
  t.root_ = static_cast<int>(t.nodes_.size()) - 1;
  return t;
}

std::set<int> RstTree::sentence_ids() const {
  std::set<int> ids;
  for (const auto& n : nodes_) {
    if (n.is_leaf()) ids.insert(n.sentence_id);
  }
  return ids;
}

std::size_t RstTree::edu_count(int sentence_id) const {
  return static_cast<std::size_t>(std::count_if(nodes_.begin(), nodes_.end(), [&](const Node& n) {
    return n.is_leaf() && n.sentence_id == sentence_id;
  }));
}

namespace {

RstTree parse_node(const json& j, const RelationMap& relations, std::size_t lineno) {
  if (!j.is_object()) throw ParseError("tree node must be an object", lineno);
  if (j.contains("leaf")) {
    const json& l = j["leaf"];
    if (!l.contains("sentence_id")) throw ParseError("leaf needs 'sentence_id'", lineno);
    std::array<int, 2> span{0, 0};
    if (l.contains("edu_span")) {
      const json& s = l["edu_span"];
      if (!s.is_array() || s.size() != 2) throw ParseError("edu_span must be [begin, end]", lineno);
      span = {s[0].get<int>(), s[1].get<int>()};
    }
    return RstTree::leaf(l["sentence_id"].get<int>(), span);
  }
  if (!j.contains("children") || !j["children"].is_array()) {
    throw ParseError("internal node needs 'children'", lineno);
  }
  if (j["children"].size() != 2) {
    throw SchemaError("non-binary RST node with " + std::to_string(j["children"].size()) +
                      " children (line " + std::to_string(lineno) + ")");
  }
  const std::string label = j.value("relation", std::string{});
  const auto rel = relations.resolve(label);
  if (!rel) {
    throw SchemaError("unknown discourse relation '" + label + "' (line " +
                      std::to_string(lineno) + ")");
  }
  NucleusSide side = NucleusSide::kBoth;
  const std::string ns = text::lower(j.value("nucleus_side", std::string("both")));
  if (ns == "left") {
    side = NucleusSide::kLeft;
  } else if (ns == "right") {
    side = NucleusSide::kRight;
  } else if (ns != "both") {
    throw SchemaError("nucleus_side must be left, right or both (line " + std::to_string(lineno) +
                      ")");
  }
  return RstTree::join(*rel, side, parse_node(j["children"][0], relations, lineno),
                       parse_node(j["children"][1], relations, lineno));
}

}  // namespace

std::map<std::string, RstTree> parse_rst(std::istream& in, const RelationMap& relations) {
  std::map<std::string, RstTree> out;
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    json rec;
    try {
      rec = json::parse(line);
    } catch (const json::parse_error& e) {
      throw ParseError(std::string("malformed tree record: ") + e.what(), lineno);
    }
    if (!rec.contains("segment_id") || !rec.contains("tree")) {
      throw ParseError("tree record needs 'segment_id' and 'tree'", lineno);
    }
    const std::string id = rec["segment_id"].is_string() ? rec["segment_id"].get<std::string>()
                                                         : rec["segment_id"].dump();
    out.insert_or_assign(id, parse_node(rec["tree"], relations, lineno));
  }
  return out;
}

std::map<std::string, RstTree> load_rst(const std::string& path, const RelationMap& relations) {
  std::ifstream in(path);
  if (!in) throw Error("cannot open tree file '" + path + "'");
  return parse_rst(in, relations);
}

std::array<double, kDiscourseFeatures> discourse_features(const RstTree& tree,
                                                          const std::set<int>& target_ids) {
  std::array<double, kDiscourseFeatures> out{};
  const auto& nodes = tree.nodes();
  if (nodes.empty()) return out;

  // Children precede parents in node order, so one forward pass fills both flags.
  std::vector<char> all_target(nodes.size(), 0);
  std::vector<char> has_other(nodes.size(), 0);
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    const auto& n = nodes[i];
    if (n.is_leaf()) {
      const bool t = target_ids.count(n.sentence_id) > 0;
      all_target[i] = t;
      has_other[i] = !t;
    } else {
      all_target[i] = all_target[n.left] && all_target[n.right];
      has_other[i] = has_other[n.left] || has_other[n.right];
    }
  }

  std::vector<char> nucleus(nodes.size(), 0);
  nucleus[tree.root()] = 1;
  for (std::size_t i = nodes.size(); i-- > 0;) {
    const auto& n = nodes[i];
    if (n.is_leaf()) continue;
    nucleus[n.left] = n.side != NucleusSide::kRight;
    nucleus[n.right] = n.side != NucleusSide::kLeft;
    if ((all_target[n.left] && has_other[n.right]) || (all_target[n.right] && has_other[n.left])) {
      out[static_cast<std::size_t>(n.relation)] = 1.0;
    }
  }
  for (std::size_t i = 0; i < nodes.size(); ++i) {
    if (!nodes[i].is_leaf() || !target_ids.count(nodes[i].sentence_id)) continue;
    out[nucleus[i] ? kNumRelations : kNumRelations + 1] += 1.0;
  }
  return out;
}

}  // namespace fc
