#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "rtw/rng.hpp"

namespace rtw::text {

enum class TokenKind { Russian, English, Surname, Number, Phone };

const char* to_string(TokenKind kind);

struct CorpusEntry {
  std::string token;  // UTF-8; empty for templates
  TokenKind kind = TokenKind::Russian;
  double weight = 1.0;
};

struct CorpusConfig {
  double word_weight = 1.0;
  double surname_weight = 1.0;
  bool number_template = true;
  double number_weight = 1.0;
  int number_min_digits = 1;
  int number_max_digits = 8;
  bool phone_template = true;
  double phone_weight = 1.0;

  void validate() const;
};

struct Corpus {
  std::vector<CorpusEntry> entries;
  bool blocklist_applied = false;
  std::size_t blocked = 0;   // entries removed by the blocklist
  std::size_t rejected = 0;  // lines with characters outside the alphabet
  int number_min_digits = 1;
  int number_max_digits = 8;
};

// Word/blocklist/surname files are UTF-8, one token per line; blank lines are
// skipped. An empty path means "no such file". Blocklist matching folds case.
Corpus build_corpus(const std::filesystem::path& words,
                    const std::filesystem::path& blocklist,
                    const std::filesystem::path& surnames,
                    const CorpusConfig& cfg);

struct Token {
  std::string text;
  TokenKind kind = TokenKind::Russian;
};

struct TextSample {
  std::vector<std::vector<Token>> lines;

  // Tokens joined by single spaces, lines by '\n'.
  std::string flattened() const;
  // Same, with characters outside the annotation alphabet removed (phone
  // numbers lose '+', '(' and ')').
  std::string annotation_text() const;
};

struct SampleLayout {
  int max_lines = 3;
  int words_min = 1;
  int words_max = 4;
  double punctuation_prob = 0.1;
};

inline constexpr std::string_view kPunctuation = ".,?!:;-";

std::string format_phone(Rng& rng);

TextSample sample_text(const Corpus& corpus, Rng& rng,
                       const SampleLayout& layout);

}  // namespace rtw::text
