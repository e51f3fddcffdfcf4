#include <doctest.h>

#include <sstream>

#include "factcheck/discourse.hpp"
#include "factcheck/error.hpp"

using namespace fc;

namespace {

std::size_t rel(std::string_view name) {
  for (std::size_t i = 0; i < kNumRelations; ++i) {
    if (kRelationNames[i] == name) return i;
  }
  throw Error("no relation");
}

}  // namespace

TEST_SUITE("discourse") {

TEST_CASE("tree records") {
  std::istringstream in(
      "{\"segment_id\":\"d1:0\",\"tree\":{\"leaf\":{\"sentence_id\":1}}}\n"
      "{\"segment_id\":\"d1:1\",\"tree\":{\"relation\":\"Elaboration\",\"nucleus_side\":\"left\","
      "\"children\":[{\"leaf\":{\"sentence_id\":2}},{\"leaf\":{\"sentence_id\":3}}]}}\n");
  const auto trees = parse_rst(in);
  REQUIRE(trees.size() == 2);
  const auto single = discourse_features(trees.at("d1:0"), 1);
  for (std::size_t i = 0; i < kNumRelations; ++i) CHECK(single[i] == 0.0);
  CHECK(single[kNumRelations] == 1.0);
  CHECK(single[kNumRelations + 1] == 0.0);

  const auto f = discourse_features(trees.at("d1:1"), 3);
  CHECK(f[rel("Elaboration")] == 1.0);
  CHECK(f[kNumRelations] == 0.0);
  CHECK(f[kNumRelations + 1] == 1.0);

  std::istringstream foo(
      "{\"segment_id\":\"x\",\"tree\":{\"relation\":\"Foo\",\"children\":[{\"leaf\":{\"sentence_id\":1}},"
      "{\"leaf\":{\"sentence_id\":2}}]}}\n");
  CHECK_THROWS_AS(parse_rst(foo), SchemaError);

  std::istringstream ternary(
      "{\"segment_id\":\"x\",\"tree\":{\"relation\":\"Joint\",\"children\":[{\"leaf\":{\"sentence_id\":1}},"
      "{\"leaf\":{\"sentence_id\":2}},{\"leaf\":{\"sentence_id\":3}}]}}\n");
  CHECK_THROWS_AS(parse_rst(ternary), SchemaError);
}

TEST_CASE("contrast link sets exactly one indicator") {
  const auto t = RstTree::join(rel("Contrast"), NucleusSide::kBoth, RstTree::leaf(1), RstTree::leaf(2));
  const auto f = discourse_features(t, 1);
  for (std::size_t i = 0; i < kNumRelations; ++i) CHECK(f[i] == (i == rel("Contrast") ? 1.0 : 0.0));
}

TEST_CASE("relations inside the target sentence are not links") {
  // sentence 1 has two EDUs joined by Attribution, then Cause links it to sentence 2
  const auto s1 = RstTree::join(rel("Attribution"), NucleusSide::kRight, RstTree::leaf(1, {0, 1}),
                                RstTree::leaf(1, {1, 2}));
  const auto t = RstTree::join(rel("Cause"), NucleusSide::kLeft, s1, RstTree::leaf(2));
  const auto f = discourse_features(t, 1);
  CHECK(f[rel("Attribution")] == 0.0);
  CHECK(f[rel("Cause")] == 1.0);
  CHECK(f[kNumRelations] + f[kNumRelations + 1] == t.edu_count(1));
  CHECK(f[kNumRelations] == 1.0);
  CHECK(f[kNumRelations + 1] == 1.0);
}

TEST_CASE("missing target gives zero indicators") {
  const auto t = RstTree::join(rel("Joint"), NucleusSide::kBoth, RstTree::leaf(1), RstTree::leaf(2));
  const auto f = discourse_features(t, 9);
  for (double v : f) CHECK(v == 0.0);
}

TEST_CASE("features ignore sentence numbering") {
  auto build = [](int a, int b, int c) {
    const auto left = RstTree::join(rel("Temporal"), NucleusSide::kLeft, RstTree::leaf(a), RstTree::leaf(b));
    return RstTree::join(rel("Background"), NucleusSide::kRight, left, RstTree::leaf(c));
  };
  const auto t1 = build(1, 2, 3);
  const auto t2 = build(10, 20, 30);
  CHECK(discourse_features(t1, 1) == discourse_features(t2, 10));
  CHECK(discourse_features(t1, 2) == discourse_features(t2, 20));
  CHECK(discourse_features(t1, 3) == discourse_features(t2, 30));
  for (int id : {1, 2, 3}) {
    const auto f = discourse_features(t1, id);
    for (std::size_t i = 0; i < kNumRelations; ++i) CHECK((f[i] == 0.0 || f[i] == 1.0));
    CHECK(f[kNumRelations] + f[kNumRelations + 1] == t1.edu_count(id));
  }
}

TEST_CASE("relation map") {
  RelationMap m;
  CHECK(m.resolve("elaboration") == rel("Elaboration"));
  CHECK(m.resolve("manner_means") == rel("Manner-Means"));
  CHECK_FALSE(m.resolve("elaboration-additional").has_value());
  m.add("elaboration-additional", "Elaboration");
  CHECK(m.resolve("elaboration-additional") == rel("Elaboration"));
  CHECK_THROWS_AS(m.add("x", "Nonsense"), SchemaError);
}

}  // TEST_SUITE
