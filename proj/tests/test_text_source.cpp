#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <fstream>
#include <map>
#include <regex>

#include "rtw/error.hpp"
#include "rtw/text_source.hpp"
#include "rtw/unicode.hpp"
#include "support.hpp"

using namespace rtw;
using namespace rtw::text;

namespace {

std::filesystem::path write(const test::TempDir& dir, const std::string& name,
                            const std::string& body) {
  const auto p = dir / name;
  std::ofstream(p, std::ios::binary) << body;
  return p;
}

CorpusConfig words_only() {
  CorpusConfig c;
  c.number_template = false;
  c.phone_template = false;
  return c;
}

std::vector<std::string> tokens(const Corpus& c) {
  std::vector<std::string> out;
  for (const auto& e : c.entries)
    if (!e.token.empty()) out.push_back(e.token);
  return out;
}

const auto kCorpus = test::fixtures() / "corpus";

}  // namespace

TEST_CASE("blocklist subtraction") {
  test::TempDir dir("corpus");
  const auto words = write(dir, "w.txt", "дом\nкот\n");
  CHECK(tokens(build_corpus(words, write(dir, "b.txt", "кот\n"), {}, words_only())) ==
        std::vector<std::string>{"дом"});
  // Case-insensitive match.
  const auto c = build_corpus(words, write(dir, "B.txt", "КОТ\n"), {}, {});
  CHECK(tokens(c) == std::vector<std::string>{"дом"});
  CHECK(c.blocklist_applied);
  CHECK(c.blocked == 1);
  CHECK(c.entries.size() == 3);  // word + number + phone templates
}

TEST_CASE("empty corpus and malformed input") {
  test::TempDir dir("corpus");
  const auto empty = write(dir, "e.txt", "\n\n");
  try {
    build_corpus(empty, {}, {}, words_only());
  } catch (const Error& e) {
    CHECK(e.code() == Errc::EmptyCorpus);
  }
  const auto bad = write(dir, "bad.txt", "дом\nкот\n\xC0\xAF\n");
  try {
    build_corpus(bad, {}, {}, {});
    FAIL("expected MalformedUtf8");
  } catch (const Error& e) {
    CHECK(e.code() == Errc::MalformedUtf8);
    CHECK(std::string(e.what()).find("line 3") != std::string::npos);
  }
}

TEST_CASE("fixture corpus") {
  const auto c = build_corpus(kCorpus / "words.txt", kCorpus / "blocklist.txt",
                              kCorpus / "surnames.txt", {});
  const auto t = tokens(c);
  CHECK(std::count(t.begin(), t.end(), "кот") == 1);
  CHECK(std::count(t.begin(), t.end(), "плохоеслово") == 0);
  CHECK(c.blocked == 1);
  CHECK(c.rejected == 2);  // "e-mail@" and "цена 100"
  std::map<TokenKind, int> kinds;
  for (const auto& e : c.entries) ++kinds[e.kind];
  CHECK(kinds[TokenKind::Surname] == 5);
  CHECK(kinds[TokenKind::English] == 9);
  CHECK(kinds[TokenKind::Number] == 1);
  CHECK(kinds[TokenKind::Phone] == 1);
  for (const auto& e : c.entries) CHECK(e.weight > 0);
}

TEST_CASE("singleton sample") {
  test::TempDir dir("corpus");
  const auto c = build_corpus(write(dir, "w.txt", "дом\n"), {}, {}, words_only());
  Rng rng(0);
  const SampleLayout one{1, 1, 1, 0.0};
  for (int i = 0; i < 10; ++i) CHECK(sample_text(c, rng, one).flattened() == "дом");
}

TEST_CASE("phone format") {
  const std::regex re(R"(\+7 \(\d{3}\) \d{3}-\d{2}-\d{2})");
  Rng rng(2);
  for (int i = 0; i < 1000; ++i) REQUIRE(std::regex_match(format_phone(rng), re));
  TextSample s;
  s.lines = {{{"+7 (123) 456-78-90", TokenKind::Phone}, {"дом", TokenKind::Russian}}};
  CHECK(s.annotation_text() == "7 123 456-78-90 дом");
}

TEST_CASE("uniform sampling passes a chi-square test") {
  test::TempDir dir("corpus");
  std::string body;
  for (int i = 0; i < 10; ++i) body += "w" + std::string(1, char('a' + i)) + "\n";
  const auto c = build_corpus(write(dir, "w.txt", body), {}, {}, words_only());
  Rng rng(123);
  std::map<std::string, int> freq;
  const SampleLayout one{1, 1, 1, 0.0};
  const int n = 100000;
  for (int i = 0; i < n; ++i) ++freq[sample_text(c, rng, one).flattened()];
  REQUIRE(freq.size() == 10);
  double chi2 = 0;
  for (const auto& [tok, k] : freq) {
    CHECK(k / double(n) >= 0.09);
    CHECK(k / double(n) <= 0.11);
    chi2 += (k - n / 10.0) * (k - n / 10.0) / (n / 10.0);
  }
  CHECK(chi2 < 27.877);  // 0.999 quantile, 9 degrees of freedom
}

TEST_CASE("samples stay in the alphabet, avoid blocked words and are reproducible") {
  const auto c = build_corpus(kCorpus / "words.txt", kCorpus / "blocklist.txt",
                              kCorpus / "surnames.txt", {});
  const SampleLayout layout{3, 1, 4, 0.3};
  Rng rng(77), again(77);
  for (int i = 0; i < 100000; ++i) {
    const auto s = sample_text(c, rng, layout);
    REQUIRE(s.lines.size() >= 1);
    REQUIRE(s.lines.size() <= 3);
    for (const auto& line : s.lines) {
      REQUIRE(!line.empty());
      REQUIRE(line.size() <= 4);
      for (const auto& tok : line) {
        const auto cps = utf8::decode(tok.text);
        REQUIRE(cps);
        REQUIRE(utf8::fold(*cps) != utf8::fold(U"плохоеслово"));
        for (char32_t ch : *cps) {
          const bool phone_extra = tok.kind == TokenKind::Phone &&
                                   (ch == '+' || ch == '(' || ch == ')' || ch == ' ');
          REQUIRE((phone_extra || (utf8::is_allowed(ch) && ch != ' ')));
        }
        if (tok.kind == TokenKind::Number) {
          std::size_t digits = 0;
          for (char ch : tok.text) digits += ch >= '0' && ch <= '9';
          REQUIRE(digits >= 1);
          REQUIRE(digits <= 8);
        }
      }
    }
    const auto ann = utf8::decode(s.annotation_text());
    REQUIRE(ann);
    for (char32_t ch : *ann) REQUIRE((ch == '\n' || utf8::is_allowed(ch)));
    if (i < 1000) REQUIRE(sample_text(c, again, layout).flattened() == s.flattened());
  }
}
