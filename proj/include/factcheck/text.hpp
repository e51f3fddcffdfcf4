#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace fc {

/// One token with optional part-of-speech (Penn tagset) and named-entity tags.
/// An empty tag means "not annotated".
struct Token {
  std::string surface;
  std::string pos;
  std::string ne;

  bool operator==(const Token&) const = default;
};

namespace text {

std::string lower(std::string_view s);

/// Number of Unicode code points in a UTF-8 string.
std::size_t utf8_length(std::string_view s);

/// Whitespace split, then leading/trailing punctuation peeled off as separate
/// tokens. Word-internal apostrophes, hyphens, dots and digits stay attached,
/// so "didn't", "clean-energy" and "3.5" are single tokens.
std::vector<std::string> tokenize(std::string_view s);

/// True if the token contains at least one letter or digit.
bool is_word(std::string_view token);

/// Tokens that are words (punctuation dropped), lowercased.
std::vector<std::string> words(std::string_view s);
std::vector<std::string> words(std::span<const Token> tokens);

/// Splits on '.', '!' or '?' runs followed by whitespace, and on newlines.
std::vector<std::string> split_sentences(std::string_view s);

/// Heuristic Penn-style tagger used when no ingested tags are available.
/// Closed-class lists plus suffix rules; unknown words default to NN/NNP.
std::vector<std::string> fallback_pos_tags(std::span<const std::string> tokens);

/// Tokenizes and tags. Ingested tags always win over this.
std::vector<Token> annotate(std::string_view s);

/// Fills empty POS tags with the fallback tagger (in place).
void ensure_pos(std::vector<Token>& tokens);

/// A named-entity mention: token range [begin, end) and type label.
struct EntitySpan {
  std::size_t begin = 0;
  std::size_t end = 0;
  std::string type;
};

/// Entity spans from ingested NE tags (BIO "B-X"/"I-X" or bare "X" with
/// consecutive equal labels merged; "O" and "" are outside). If no token carries
/// an NE tag, falls back to capitalised-run detection with type "ENTITY".
std::vector<EntitySpan> entity_spans(std::span<const Token> tokens);

/// Surface text of an entity span joined by single spaces.
std::string span_text(std::span<const Token> tokens, const EntitySpan& span);

}  // namespace text
}  // namespace fc
