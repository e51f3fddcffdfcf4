#pragma once

// Small generated corpora and resources for tests. Everything is a pure
// function of the seed.

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "factcheck/corpus.hpp"
#include "factcheck/embeddings.hpp"
#include "factcheck/evidence.hpp"
#include "factcheck/lexicons.hpp"

namespace fc::testing {

class TempDir {
 public:
  explicit TempDir(const std::string& tag = "fc");
  ~TempDir();
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
  const std::filesystem::path& path() const { return path_; }
  std::string str(const std::string& child = "") const;

 private:
  std::filesystem::path path_;
};

struct DebateSpec {
  std::size_t debates = 4;
  std::size_t sentences = 120;
  /// Share of candidate sentences that carry a factual claim.
  double claim_rate = 0.25;
  std::uint64_t seed = 1;
};

/// Two candidates and a moderator; claim sentences contain numbers and
/// policy words and are selected by most sources, chit-chat rarely.
std::vector<Debate> make_debates(const DebateSpec& spec = {});

struct CqaSpec {
  std::size_t threads = 12;
  std::size_t answers = 4;
  std::uint64_t seed = 2;
};

/// Questions of all three classes; Good answers carry a factuality label that
/// depends on their wording.
std::vector<CqaThread> make_cqa(const CqaSpec& spec = {});

/// The shipped lexicon files.
std::string lexicon_dir();
LexiconSet lexicons();

/// Random vectors (dimension `dim`) for every word the generators use.
VectorStore make_vectors(std::size_t dim = 8, std::uint64_t seed = 3);
void write_vectors(const std::string& path, const VectorStore& v);

/// Offline stand-in for a search service. Hits depend only on engine and
/// query: fee/law/office queries get agreeing official pages, the rest get
/// forum chatter. Counts calls.
class FakeSearch : public SearchClient {
 public:
  std::vector<SearchHit> search(std::string_view engine, const Query& query) override;
  std::size_t calls = 0;
  /// Fail every call with TransportError.
  bool down = false;
};

/// A complete on-disk experiment: corpora, lexicons copy, vectors, configs
/// for each task. Returns the config path for `task`.
struct Fixture {
  std::string root;
  std::string checkworthy_config;
  std::string cqa_config;
  std::string question_config;
  std::string transcript;
};
Fixture write_fixture(const std::string& root, std::uint64_t seed = 1);

}  // namespace fc::testing
