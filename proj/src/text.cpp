#include "factcheck/text.hpp"

#include <algorithm>
#include <cctype>
#include <string>
#include <unordered_map>
#include <unordered_set>

namespace fc::text {
namespace {

bool is_alnum_byte(unsigned char c) { return std::isalnum(c) || c >= 0x80; }

bool is_space(unsigned char c) { return std::isspace(c) != 0; }

const std::unordered_map<std::string, std::string>& closed_class() {
  static const auto* table = [] {
    auto* t = new std::unordered_map<std::string, std::string>;
    auto add = [t](std::initializer_list<const char*> ws, const char* tag) {
      for (const char* w : ws) t->emplace(w, tag);
    };
    add({"the", "a", "an", "this", "that", "these", "those", "every", "each", "some", "any", "no",
         "all", "both", "another", "either", "neither", "that's"},
        "DT");
    add({"i", "me", "you", "he", "him", "she", "her", "it", "we", "us", "they", "them", "myself",
         "yourself", "himself", "herself", "itself", "ourselves", "themselves", "yourselves",
         "it's", "i'm", "i've", "i'll", "i'd", "we're", "we've", "we'll", "they're", "they've",
         "you're", "you've", "he's", "she's", "mine", "yours", "ours", "theirs", "hers",
         "someone", "anyone", "everyone", "nobody", "something", "anything", "everything",
         "nothing"},
        "PRP");
    add({"my", "your", "his", "its", "our", "their"}, "PRP$");
    add({"of", "in", "on", "at", "by", "for", "with", "about", "against", "between", "into",
         "through", "during", "before", "after", "above", "below", "from", "over", "under",
         "since", "than", "because", "if", "while", "although", "though", "whether", "as",
         "without", "within", "upon", "toward", "towards", "across", "around", "among", "until",
         "per", "via", "unless", "whereas"},
        "IN");
    add({"and", "or", "but", "nor", "yet", "so", "plus"}, "CC");
    add({"can", "could", "will", "would", "shall", "should", "may", "might", "must", "won't",
         "can't", "cannot", "couldn't", "wouldn't", "shouldn't", "mustn't", "'ll"},
        "MD");
    add({"to"}, "TO");
    add({"there"}, "EX");
    add({"which", "whichever"}, "WDT");
    add({"what", "who", "whom", "whose", "whoever"}, "WP");
    add({"when", "where", "why", "how", "whenever", "wherever"}, "WRB");
    add({"yes", "hi", "hello", "thanks", "thank", "ok", "okay", "oh", "please", "wow", "hey",
         "bye", "lol"},
        "UH");
    add({"not", "n't", "very", "also", "just", "never", "always", "often", "already", "still",
         "even", "again", "too", "only", "now", "then", "here", "really", "almost", "quite",
         "ever", "soon", "rather", "perhaps", "maybe", "instead", "anyway", "else", "well",
         "much", "back", "away", "together", "today", "tomorrow", "yesterday"},
        "RB");
    add({"more", "less"}, "RBR");
    add({"most", "least"}, "RBS");
    add({"is", "'s"}, "VBZ");
    add({"are", "am", "'re", "'m"}, "VBP");
    add({"was", "were", "wasn't", "weren't", "had", "hadn't", "did", "didn't", "'d"}, "VBD");
    add({"be"}, "VB");
    add({"been"}, "VBN");
    add({"being"}, "VBG");
    add({"have", "haven't", "'ve", "do", "don't", "aren't"}, "VBP");
    add({"has", "hasn't", "does", "doesn't", "isn't"}, "VBZ");
    add({"said", "went", "made", "took", "came", "saw", "got", "gave", "told", "thought", "knew",
         "became", "left", "felt", "brought", "began", "kept", "held", "wrote", "stood", "heard",
         "meant", "met", "ran", "paid", "sat", "spoke", "led", "grew", "lost", "fell", "sent",
         "built", "understood", "drew", "broke", "spent", "rose", "drove", "bought", "wore",
         "chose", "sold", "caught", "fought", "taught", "won", "found", "forgot", "flew", "threw",
         "ate", "hid", "shot", "sought", "struck", "swore", "woke", "dealt"},
        "VBD");
    add({"say", "think", "know", "believe", "see", "get", "make", "go", "take", "come", "want",
         "look", "use", "find", "give", "tell", "try", "ask", "need", "feel", "become", "put",
         "mean", "keep", "let", "begin", "seem", "help", "show", "hear", "play", "move", "live",
         "pay", "confirm", "guarantee", "imagine", "realize", "discover", "learn", "agree",
         "support", "understand", "remember", "hope", "suppose", "bring", "stay", "visit"},
        "VB");
    add({"one", "two", "three", "four", "five", "six", "seven", "eight", "nine", "ten", "eleven",
         "twelve", "twenty", "thirty", "forty", "fifty", "hundred", "thousand", "million",
         "billion", "trillion"},
        "CD");
    return t;
  }();
  return *table;
}

bool ends_with(std::string_view s, std::string_view suffix) {
  return s.size() >= suffix.size() && s.substr(s.size() - suffix.size()) == suffix;
}

bool is_number(std::string_view tok) {
  bool digit = false;
  for (unsigned char c : tok) {
    if (std::isdigit(c)) {
      digit = true;
    } else if (c != '.' && c != ',' && c != '%' && c != '$' && c != '-') {
      // ordinals like 18th, 1950s
      if (!std::isalpha(c)) return false;
    }
  }
  if (!digit) return false;
  return std::isdigit(static_cast<unsigned char>(tok.front())) || tok.front() == '$';
}

std::string punct_tag(std::string_view tok) {
  if (tok == "." || tok == "!" || tok == "?") return ".";
  if (tok == ",") return ",";
  if (tok == ";" || tok == ":" || tok == "-" || tok == "--") return ":";
  if (tok == "$") return "$";
  if (tok == "(" || tok == "[" || tok == "{") return "(";
  if (tok == ")" || tok == "]" || tok == "}") return ")";
  if (tok == "\"" || tok == "'" || tok == "``" || tok == "''") return "''";
  return "SYM";
}

bool is_capitalised(std::string_view tok) {
  return !tok.empty() && std::isupper(static_cast<unsigned char>(tok.front()));
}

bool sentence_final(std::string_view tok) { return tok == "." || tok == "!" || tok == "?"; }

}  // namespace

std::string lower(std::string_view s) {
  std::string out(s);
  for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

std::size_t utf8_length(std::string_view s) {
  std::size_t n = 0;
  for (unsigned char c : s) {
    if ((c & 0xC0) != 0x80) ++n;
  }
  return n;
}

std::vector<std::string> tokenize(std::string_view s) {
  std::vector<std::string> out;
  std::size_t i = 0;
  while (i < s.size()) {
    while (i < s.size() && is_space(static_cast<unsigned char>(s[i]))) ++i;
    std::size_t j = i;
    while (j < s.size() && !is_space(static_cast<unsigned char>(s[j]))) ++j;
    if (j > i) {
      std::string_view chunk = s.substr(i, j - i);
      std::size_t b = 0;
      std::size_t e = chunk.size();
      while (b < e && !is_alnum_byte(static_cast<unsigned char>(chunk[b]))) ++b;
      while (e > b && !is_alnum_byte(static_cast<unsigned char>(chunk[e - 1]))) --e;
      if (b == e) {
        for (char c : chunk) out.emplace_back(1, c);
      } else {
        for (std::size_t k = 0; k < b; ++k) out.emplace_back(1, chunk[k]);
        out.emplace_back(chunk.substr(b, e - b));
        for (std::size_t k = e; k < chunk.size(); ++k) out.emplace_back(1, chunk[k]);
      }
    }
    i = j;
  }
  return out;
}

bool is_word(std::string_view token) {
  return std::any_of(token.begin(), token.end(),
                     [](char c) { return is_alnum_byte(static_cast<unsigned char>(c)); });
}

std::vector<std::string> words(std::string_view s) {
  std::vector<std::string> out;
  for (auto& t : tokenize(s)) {
    if (is_word(t)) out.push_back(lower(t));
  }
  return out;
}

std::vector<std::string> words(std::span<const Token> tokens) {
  std::vector<std::string> out;
  for (const auto& t : tokens) {
    if (is_word(t.surface)) out.push_back(lower(t.surface));
  }
  return out;
}

std::vector<std::string> split_sentences(std::string_view s) {
  std::vector<std::string> out;
  auto flush = [&](std::size_t b, std::size_t e) {
    while (b < e && is_space(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && is_space(static_cast<unsigned char>(s[e - 1]))) --e;
    if (e > b) out.emplace_back(s.substr(b, e - b));
  };
  std::size_t start = 0;
  std::size_t i = 0;
  while (i < s.size()) {
    const char c = s[i];
    if (c == '\n') {
      flush(start, i);
      start = ++i;
      continue;
    }
    if (c == '.' || c == '!' || c == '?') {
      std::size_t j = i;
      while (j < s.size() && (s[j] == '.' || s[j] == '!' || s[j] == '?')) ++j;
      if (j == s.size() || is_space(static_cast<unsigned char>(s[j]))) {
        flush(start, j);
        start = j;
      }
      i = j;
      continue;
    }
    ++i;
  }
  flush(start, s.size());
  return out;
}

std::vector<std::string> fallback_pos_tags(std::span<const std::string> tokens) {
  const auto& table = closed_class();
  std::vector<std::string> tags(tokens.size());
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    const std::string& tok = tokens[i];
    const std::string low = lower(tok);
    const std::string prev = i > 0 ? tags[i - 1] : std::string{};
    const std::string prev_low = i > 0 ? lower(tokens[i - 1]) : std::string{};
    const bool sentence_start = i == 0 || sentence_final(tokens[i - 1]);

    if (!is_word(tok)) {
      tags[i] = punct_tag(tok);
      continue;
    }
    if (is_number(tok)) {
      tags[i] = "CD";
      continue;
    }
    if (auto it = table.find(low); it != table.end()) {
      std::string tag = it->second;
      // base-form verbs: VB after modal/to, VBP after a subject pronoun
      if (tag == "VB" && prev != "MD" && prev != "TO") {
        tag = (prev == "PRP") ? "VBP" : "VB";
      }
      tags[i] = tag;
      continue;
    }
    if (is_capitalised(tok) && !sentence_start && low != "i") {
      tags[i] = "NNP";
      continue;
    }
    const bool after_aux = prev_low == "was" || prev_low == "were" || prev_low == "been" ||
                           prev_low == "be" || prev_low == "is" || prev_low == "are" ||
                           prev_low == "has" || prev_low == "have" || prev_low == "had";
    std::string tag;
    if (low.size() > 3 && ends_with(low, "ed")) {
      tag = after_aux ? "VBN" : "VBD";
    } else if (low.size() > 4 && ends_with(low, "ing")) {
      tag = "VBG";
    } else if (low.size() > 3 && ends_with(low, "ly")) {
      tag = "RB";
    } else if (ends_with(low, "ous") || ends_with(low, "ful") || ends_with(low, "ive") ||
               ends_with(low, "able") || ends_with(low, "ible") || ends_with(low, "less") ||
               ends_with(low, "ical") || ends_with(low, "ish") || ends_with(low, "ic") ||
               ends_with(low, "al")) {
      tag = "JJ";
    } else if (low.size() > 3 && ends_with(low, "s") && !ends_with(low, "ss") &&
               !ends_with(low, "us") && !ends_with(low, "is")) {
      tag = (prev_low == "he" || prev_low == "she" || prev_low == "it") ? "VBZ" : "NNS";
    } else if (prev == "MD" || prev == "TO") {
      tag = "VB";
    } else if (prev == "PRP" && prev_low != "it's" && prev_low != "me" && prev_low != "us" &&
               prev_low != "them" && prev_low != "him") {
      tag = "VBP";
    } else {
      tag = "NN";
    }
    tags[i] = tag;
  }
  return tags;
}

std::vector<Token> annotate(std::string_view s) {
  std::vector<Token> out;
  for (auto& t : tokenize(s)) out.push_back(Token{std::move(t), {}, {}});
  ensure_pos(out);
  return out;
}

void ensure_pos(std::vector<Token>& tokens) {
  const bool missing = std::any_of(tokens.begin(), tokens.end(),
                                   [](const Token& t) { return t.pos.empty(); });
  if (!missing) return;
  std::vector<std::string> surfaces;
  surfaces.reserve(tokens.size());
  for (const auto& t : tokens) surfaces.push_back(t.surface);
  const auto tags = fallback_pos_tags(surfaces);
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    if (tokens[i].pos.empty()) tokens[i].pos = tags[i];
  }
}

std::vector<EntitySpan> entity_spans(std::span<const Token> tokens) {
  std::vector<EntitySpan> spans;
  const bool tagged = std::any_of(tokens.begin(), tokens.end(),
                                  [](const Token& t) { return !t.ne.empty(); });
  if (tagged) {
    for (std::size_t i = 0; i < tokens.size(); ++i) {
      const std::string& tag = tokens[i].ne;
      if (tag.empty() || tag == "O") continue;
      const bool inside = tag.rfind("I-", 0) == 0;
      const std::string type =
          (tag.rfind("B-", 0) == 0 || inside) ? tag.substr(2) : tag;
      const bool bare = tag.rfind("B-", 0) != 0 && !inside;
      if (!spans.empty() && spans.back().end == i && spans.back().type == type &&
          (inside || bare)) {
        spans.back().end = i + 1;
      } else {
        spans.push_back({i, i + 1, type});
      }
    }
    return spans;
  }

  const auto& table = closed_class();
  auto candidate = [&](std::size_t i) {
    const std::string& s = tokens[i].surface;
    if (!is_capitalised(s) || !is_word(s) || s == "I") return false;
    return table.find(lower(s)) == table.end();
  };
  for (std::size_t i = 0; i < tokens.size(); ++i) {
    if (!candidate(i)) continue;
    const bool sentence_start = i == 0 || sentence_final(tokens[i - 1].surface);
    const bool next_cap = i + 1 < tokens.size() && candidate(i + 1);
    if (sentence_start && !next_cap) continue;
    if (!spans.empty() && spans.back().end == i) {
      spans.back().end = i + 1;
    } else {
      spans.push_back({i, i + 1, "ENTITY"});
    }
  }
  return spans;
}

std::string span_text(std::span<const Token> tokens, const EntitySpan& span) {
  std::string out;
  for (std::size_t i = span.begin; i < span.end && i < tokens.size(); ++i) {
    if (!out.empty()) out += ' ';
    out += tokens[i].surface;
  }
  return out;
}

}  // namespace fc::text
