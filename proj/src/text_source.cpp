#include "rtw/text_source.hpp"

#include <algorithm>
#include <fstream>
#include <set>

#include "rtw/error.hpp"
#include "rtw/unicode.hpp"

namespace rtw::text {

const char* to_string(TokenKind kind) {
  switch (kind) {
    case TokenKind::Russian: return "russian";
    case TokenKind::English: return "english";
    case TokenKind::Surname: return "surname";
    case TokenKind::Number: return "number-template";
    case TokenKind::Phone: return "phone-template";
  }
  return "?";
}

void CorpusConfig::validate() const {
  if (!(word_weight > 0.0) || !(surname_weight > 0.0) ||
      !(number_weight > 0.0) || !(phone_weight > 0.0)) {
    throw Error(Errc::BadConfig, "corpus weights must be > 0");
  }
  if (number_min_digits < 1 || number_max_digits < number_min_digits) {
    throw Error(Errc::BadConfig, "corpus number digit range is empty");
  }
}

namespace {

struct Line {
  std::size_t number;
  std::u32string text;
};

std::vector<Line> read_lines(const std::filesystem::path& path) {
  std::vector<Line> lines;
  if (path.empty()) return lines;
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw Error(Errc::IoFailure, "cannot open " + path.string());
  }
  std::string raw;
  std::size_t number = 0;
  while (std::getline(in, raw)) {
    ++number;
    if (number == 1 && raw.rfind("\xEF\xBB\xBF", 0) == 0) raw.erase(0, 3);
    auto decoded = utf8::decode(raw);
    if (!decoded) {
      throw Error(Errc::MalformedUtf8,
                  path.string() + " line " + std::to_string(number));
    }
    auto& s = *decoded;
    auto is_space = [](char32_t c) {
      return c == ' ' || c == '\t' || c == '\r' || c == 0xFEFF;
    };
    while (!s.empty() && is_space(s.back())) s.pop_back();
    std::size_t lead = 0;
    while (lead < s.size() && is_space(s[lead])) ++lead;
    s.erase(0, lead);
    if (s.empty()) continue;
    lines.push_back({number, std::move(s)});
  }
  return lines;
}

bool token_ok(const std::u32string& s) {
  return std::all_of(s.begin(), s.end(), [](char32_t c) {
    return c != ' ' && utf8::is_allowed(c);
  });
}

}  // namespace

Corpus build_corpus(const std::filesystem::path& words,
                    const std::filesystem::path& blocklist,
                    const std::filesystem::path& surnames,
                    const CorpusConfig& cfg) {
  cfg.validate();
  Corpus corpus;
  corpus.number_min_digits = cfg.number_min_digits;
  corpus.number_max_digits = cfg.number_max_digits;

  std::set<std::u32string> blocked;
  for (auto& line : read_lines(blocklist)) {
    blocked.insert(utf8::fold(line.text));
  }
  corpus.blocklist_applied = !blocklist.empty();

  std::set<std::u32string> seen;
  auto add = [&](const Line& line, TokenKind kind, double weight) {
    if (!token_ok(line.text)) {
      ++corpus.rejected;
      return;
    }
    if (blocked.count(utf8::fold(line.text))) {
      ++corpus.blocked;
      return;
    }
    if (!seen.insert(line.text).second) return;
    corpus.entries.push_back({utf8::encode(line.text), kind, weight});
  };
  for (const auto& line : read_lines(words)) {
    const bool cyrillic = std::any_of(line.text.begin(), line.text.end(),
                                      [](char32_t c) { return utf8::is_cyrillic(c); });
    add(line, cyrillic ? TokenKind::Russian : TokenKind::English, cfg.word_weight);
  }
  for (const auto& line : read_lines(surnames)) {
    add(line, TokenKind::Surname, cfg.surname_weight);
  }
  if (cfg.number_template) {
    corpus.entries.push_back({"", TokenKind::Number, cfg.number_weight});
  }
  if (cfg.phone_template) {
    corpus.entries.push_back({"", TokenKind::Phone, cfg.phone_weight});
  }
  if (corpus.entries.empty()) {
    throw Error(Errc::EmptyCorpus, "no usable tokens or templates");
  }
  return corpus;
}

std::string TextSample::flattened() const {
  std::string out;
  for (std::size_t l = 0; l < lines.size(); ++l) {
    if (l) out += '\n';
    for (std::size_t t = 0; t < lines[l].size(); ++t) {
      if (t) out += ' ';
      out += lines[l][t].text;
    }
  }
  return out;
}

std::string TextSample::annotation_text() const {
  const auto cps = utf8::decode(flattened()).value_or(std::u32string{});
  std::u32string kept;
  for (char32_t c : cps) {
    if (c == '\n' || utf8::is_allowed(c)) kept.push_back(c);
  }
  return utf8::encode(kept);
}

std::string format_phone(Rng& rng) {
  auto digits = [&rng](int n) {
    std::string s;
    for (int i = 0; i < n; ++i) {
      s.push_back(static_cast<char>('0' + rng.uniform_int(0, 9)));
    }
    return s;
  };
  std::string out = "+7 (";
  out += digits(3);
  out += ") ";
  out += digits(3);
  out += '-';
  out += digits(2);
  out += '-';
  out += digits(2);
  return out;
}

TextSample sample_text(const Corpus& corpus, Rng& rng,
                       const SampleLayout& layout) {
  if (corpus.entries.empty()) {
    throw Error(Errc::EmptyCorpus, "cannot sample from an empty corpus");
  }
  std::vector<double> cumulative;
  cumulative.reserve(corpus.entries.size());
  double total = 0.0;
  for (const auto& e : corpus.entries) {
    total += e.weight;
    cumulative.push_back(total);
  }
  TextSample sample;
  const auto n_lines = rng.uniform_int(1, std::max(1, layout.max_lines));
  for (std::int64_t l = 0; l < n_lines; ++l) {
    const auto n_words = rng.uniform_int(std::max(1, layout.words_min),
                                         std::max(layout.words_min, layout.words_max));
    std::vector<Token> line;
    for (std::int64_t w = 0; w < n_words; ++w) {
      const auto& entry = corpus.entries[rng.weighted_index(cumulative)];
      Token tok{entry.token, entry.kind};
      if (entry.kind == TokenKind::Number) {
        const auto len = rng.uniform_int(corpus.number_min_digits,
                                         corpus.number_max_digits);
        tok.text.clear();
        for (std::int64_t i = 0; i < len; ++i) {
          tok.text.push_back(static_cast<char>('0' + rng.uniform_int(0, 9)));
        }
      } else if (entry.kind == TokenKind::Phone) {
        tok.text = format_phone(rng);
      }
      if (layout.punctuation_prob > 0.0 && rng.bernoulli(layout.punctuation_prob)) {
        tok.text.push_back(kPunctuation[rng.uniform_int(0, kPunctuation.size() - 1)]);
      }
      line.push_back(std::move(tok));
    }
    sample.lines.push_back(std::move(line));
  }
  return sample;
}

}  // namespace rtw::text
