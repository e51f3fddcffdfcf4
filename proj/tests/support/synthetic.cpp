#include "synthetic.hpp"

#include <fstream>
#include <set>

#include <unistd.h>

#include "factcheck/config.hpp"
#include "factcheck/error.hpp"
#include "factcheck/numfmt.hpp"
#include "factcheck/pipeline.hpp"
#include "factcheck/rng.hpp"
#include "factcheck/text.hpp"

namespace fs = std::filesystem;

namespace fc::testing {

TempDir::TempDir(const std::string& tag) {
  static std::uint64_t counter = 0;
  Rng rng(mix_seed(static_cast<std::uint64_t>(::getpid()), counter++));
  do {
    path_ = fs::temp_directory_path() / (tag + "-" + std::to_string(rng.next() % 1000000007ULL));
  } while (fs::exists(path_));
  fs::create_directories(path_);
}

TempDir::~TempDir() {
  std::error_code ec;
  fs::remove_all(path_, ec);
}

std::string TempDir::str(const std::string& child) const {
  return child.empty() ? path_.string() : (path_ / child).string();
}

namespace {

const char* kClaims[] = {
    "Unemployment went up {n} percent under {opp}.",
    "We lost {n} million jobs in manufacturing.",
    "Taxes will rise by {n} billion dollars under that plan.",
    "The national debt doubled in {n} years.",
    "Crime fell {n} percent in our cities last year.",
    "{opp} voted against the budget {n} times.",
    "Our trade deficit is {n} billion dollars a year.",
    "{opp} said climate change is a hoax.",
};

const char* kChatter[] = {
    "Thank you very much.",
    "I think that is right.",
    "Let me say this.",
    "We need to talk about the future.",
    "That is not true.",
    "I did not.",
    "Folks know what I mean.",
    "I believe we can do better.",
    "We can obviously see this.",
    "Well, look.",
};

const char* kModerator[] = {
    "Let us move on to the next question.",
    "Please answer the question.",
    "Time is up.",
    "The next segment is about the economy.",
};

std::string fill(std::string tmpl, const std::string& n, const std::string& opp) {
  for (auto [key, val] : {std::pair<std::string, std::string>{"{n}", n}, {"{opp}", opp}}) {
    for (auto p = tmpl.find(key); p != std::string::npos; p = tmpl.find(key)) tmpl.replace(p, key.size(), val);
  }
  return tmpl;
}

template <std::size_t N>
const char* choose(Rng& rng, const char* (&items)[N]) {
  return items[rng.below(N)];
}

}  // namespace

std::vector<Debate> make_debates(const DebateSpec& spec) {
  Rng rng(spec.seed);
  const std::vector<Candidate> cands = {{"Alice Smith", {"Alice", "Smith"}},
                                        {"Bob Jones", {"Bob", "Jones"}}};
  std::vector<Debate> out;
  for (std::size_t d = 0; d < spec.debates; ++d) {
    Debate deb;
    deb.id = "d" + std::to_string(d + 1);
    deb.moderators = {"Mod Lee"};
    deb.candidates = cands;
    std::size_t turn = 0;
    int sid = 1;
    while (deb.sentences.size() < spec.sentences) {
      const bool moderator = turn % 5 == 4;
      const std::size_t who = turn % 2;
      const std::size_t len = moderator ? 1 : 1 + rng.below(4);
      for (std::size_t k = 0; k < len && deb.sentences.size() < spec.sentences; ++k) {
        Sentence s;
        s.id = sid++;
        s.speaker = moderator ? "Mod Lee" : cands[who].speaker;
        s.is_moderator = moderator;
        AnnotationMatrix::Row row{};
        bool claim = false;
        if (moderator) {
          s.text = choose(rng, kModerator);
        } else if (rng.uniform() < spec.claim_rate) {
          claim = true;
          s.text = fill(choose(rng, kClaims), std::to_string(2 + rng.below(40)),
                        cands[1 - who].names[rng.below(2)]);
        } else {
          s.text = choose(rng, kChatter);
        }
        for (auto& cell : row) cell = rng.uniform() < (claim ? 0.6 : 0.02) ? 1 : 0;
        if (claim && rng.uniform() < 0.15) s.events[0] = true;
        if (!claim && rng.uniform() < 0.05) s.events[1] = true;
        s.tokens = text::annotate(s.text);
        deb.annotations.add_row(s.id, row);
        deb.sentences.push_back(std::move(s));
      }
      ++turn;
    }
    out.push_back(std::move(deb));
  }
  return out;
}

std::vector<CqaThread> make_cqa(const CqaSpec& spec) {
  Rng rng(spec.seed);
  const char* factual_q[] = {"How much does a visa cost in Doha?",
                             "What time does the immigration office in Doha open?",
                             "Is a driving licence from India valid in Qatar?",
                             "How many days of annual leave does the labour law give?"};
  const char* opinion_q[] = {"Which school is the best in Qatar?", "Is it worth buying a car in Doha?"};
  const char* social_q[] = {"Anyone up for football this weekend?", "Good morning everyone, how are you?"};
  const char* true_a[] = {
      "The fee is {n} riyals at the immigration office, according to the ministry website.",
      "The office opens at {n} in the morning, the official portal lists the hours.",
      "Yes, the labour law gives {n} days and the ministry confirmed it.",
  };
  const char* false_a[] = {
      "I heard it is free, maybe nobody pays anything :)",
      "Never, they close forever, lol!!",
      "No idea really, probably nothing at all??",
  };
  const char* other_a[] = {"Good luck with that.", "Welcome to Qatar!", "Same question here."};

  std::vector<CqaThread> out;
  for (std::size_t t = 0; t < spec.threads; ++t) {
    CqaThread th;
    th.question.id = "Q" + std::to_string(t + 1);
    th.question.category = "Visas and Permits";
    th.question.user = "user" + std::to_string(t % 5);
    th.question.datetime = "2015-05-0" + std::to_string(1 + t % 9) + " 10:00:00";
    const std::size_t kind = t % 3;
    if (kind == 0) {
      th.question.question_class = QuestionClass::kFactual;
      th.question.subject = "visa question";
      th.question.body = factual_q[rng.below(4)];
    } else if (kind == 1) {
      th.question.question_class = QuestionClass::kOpinion;
      th.question.subject = "advice";
      th.question.body = opinion_q[rng.below(2)];
    } else {
      th.question.question_class = QuestionClass::kSocializing;
      th.question.subject = "hello";
      th.question.body = social_q[rng.below(2)];
    }
    th.question.tokens = text::annotate(th.question.text());
    for (std::size_t a = 0; a < spec.answers; ++a) {
      Answer ans;
      ans.id = th.question.id + "_C" + std::to_string(a + 1);
      ans.user = "user" + std::to_string((t + a + 1) % 7);
      if (kind == 0 && a < 3) {
        ans.goodness = Goodness::kGood;
        const bool positive = rng.uniform() < 0.5;
        ans.factuality = positive ? Factuality::kPositive : Factuality::kNegative;
        ans.fine = positive ? FineLabel::kTrue
                            : (rng.uniform() < 0.5 ? FineLabel::kFalse : FineLabel::kResponderUnsure);
        ans.text = fill(positive ? true_a[rng.below(3)] : false_a[rng.below(3)],
                        std::to_string(1 + rng.below(300)), "");
      } else {
        ans.goodness = rng.uniform() < 0.5 ? Goodness::kBad : Goodness::kPotentiallyUseful;
        ans.text = other_a[rng.below(3)];
      }
      ans.tokens = text::annotate(ans.text);
      th.answers.push_back(std::move(ans));
    }
    out.push_back(std::move(th));
  }
  return out;
}

std::string lexicon_dir() { return std::string(FACTCHECK_SOURCE_DIR) + "/resources/lexicons"; }

LexiconSet lexicons() { return LexiconSet::load(lexicon_dir()); }

VectorStore make_vectors(std::size_t dim, std::uint64_t seed) {
  std::set<std::string> vocab;
  for (const auto& d : make_debates()) {
    for (const auto& s : d.sentences) {
      for (auto& w : text::words(s.text)) vocab.insert(w);
    }
  }
  for (const auto& t : make_cqa()) {
    for (auto& w : text::words(t.question.text())) vocab.insert(w);
    for (const auto& a : t.answers) {
      for (auto& w : text::words(a.text)) vocab.insert(w);
    }
  }
  VectorStore store(dim);
  Rng rng(seed);
  std::vector<double> v(dim);
  for (const auto& w : vocab) {
    for (auto& x : v) x = rng.normal();
    store.add(w, v);
  }
  return store;
}

void write_vectors(const std::string& path, const VectorStore& v) {
  std::ofstream out(path);
  out << v.size() << ' ' << v.dimension() << '\n';
  for (const auto& w : v.words()) {
    out << w;
    for (double x : v.find(w)) out << ' ' << format_double(x);
    out << '\n';
  }
}

std::vector<SearchHit> FakeSearch::search(std::string_view engine, const Query& query) {
  ++calls;
  if (down) throw TransportError("search service unavailable");
  bool official = false;
  for (const auto& t : query.terms) {
    for (const char* w : {"fee", "riyals", "office", "law", "leave", "ministry", "portal"}) {
      if (t == w) official = true;
    }
  }
  std::vector<SearchHit> hits;
  const std::string tag = std::string(engine) + "-" + std::to_string(fnv1a(query.normalized()) % 1000);
  if (official) {
    hits.push_back({"https://portal.moi.gov.qa/visa/" + tag,
                    "The visa fee is 200 riyals at the immigration office according to the ministry.",
                    "The immigration office opens at 7 in the morning. The labour law gives 30 days of leave."});
    hits.push_back({"https://www.qatarliving.com/forum/" + tag, "Someone said the office fee is 200 riyals.", ""});
  } else {
    hits.push_back({"https://www.qatarliving.com/forum/" + tag, "lol no idea, ask someone else", ""});
  }
  return hits;
}

Fixture write_fixture(const std::string& root, std::uint64_t seed) {
  fs::create_directories(root);
  Fixture f;
  f.root = root;
  auto at = [&](const std::string& name) { return (fs::path(root) / name).string(); };

  DebateSpec ds;
  ds.seed = seed;
  ds.sentences = 80;
  save_debates(at("debates.jsonl"), make_debates(ds));
  DebateSpec ts;
  ts.debates = 1;
  ts.sentences = 30;
  ts.seed = seed + 100;
  auto transcript = make_debates(ts);
  transcript[0].id = "live";
  save_debates(at("transcript.jsonl"), transcript);
  f.transcript = at("transcript.jsonl");

  CqaSpec cs;
  cs.seed = seed + 1;
  cs.threads = 15;
  save_cqa(at("cqa.jsonl"), make_cqa(cs));
  write_vectors(at("vectors.txt"), make_vectors(8, seed + 2));
  {
    std::ofstream hq(at("hq.txt"));
    hq << "The visa fee is 200 riyals at the immigration office. Offices open at 7 in the morning.\n"
       << "The labour law gives 30 days of annual leave.\n";
  }

  const std::string common = "lexicons = " + lexicon_dir() + "\nvectors = vectors.txt\nseeds = 1\n";
  {
    std::ofstream c(at("checkworthy.cfg"));
    c << "# synthetic check-worthiness run\ntask = checkworthy\nmodel = ffnn\ndebates = debates.jsonl\n"
      << common << "ffnn.hidden = 16,8\nffnn.epochs = 20\nffnn.batch = 64\nbow_slots = 998\n"
      << "out = out/checkworthy\n";
  }
  {
    std::ofstream c(at("cqa.cfg"));
    c << "task = cqa_factcheck\nmodel = svm\ncqa = cqa.jsonl\nhq_posts = hq.txt\nevidence_cache = cache\n"
      << common
      << "bilstm = false\nsvm.c_grid = 1,8\nsvm.gamma_grid = 0.01,0.1\nsvm.folds = 2\n"
      << "out = out/cqa\n";
  }
  {
    std::ofstream c(at("question.cfg"));
    c << "task = question_class\nmodel = svm\ncqa = cqa.jsonl\nseeds = 1\nqc.folds = 3\n"
      << "out = out/question\n";
  }
  f.checkworthy_config = at("checkworthy.cfg");
  f.cqa_config = at("cqa.cfg");
  f.question_config = at("question.cfg");

  // fill the evidence cache so offline runs have web features
  const auto cfg = ExperimentConfig::load(f.cqa_config);
  const auto res = Resources::load(cfg);
  FakeSearch search;
  fetch_evidence(cfg, res, &search);
  return f;
}

}  // namespace fc::testing
