#include <doctest.h>

#include <functional>

#include "kginfuse/corpus.hpp"
#include "kginfuse/rng.hpp"
#include "testutil.hpp"

using namespace kginfuse;

namespace {

Error::Code code_of(const std::function<void()>& fn) {
  try {
    fn();
  } catch (const Error& err) {
    return err.code();
  }
  FAIL("expected a kginfuse::Error");
  return Error::Code::IoError;
}

LabeledCorpus from_string(const std::string& data, CorpusFormat format) {
  std::istringstream in(data);
  return load_corpus(in, format, "<test>");
}

// Random text exercising quoting, echoes, urls, and mentions.
std::string random_tweet(Rng& rng) {
  static const std::vector<std::string> pieces = {
      "hello",      "WORLD",  "(((", ")))",   "https://x.co/ab", "@user1",
      "it's",       "fine,",  "\"q\"", "#tag", "a\nb",            "x,y",
      "www.site.org", "end.", "www.x.com(((their)))", "@who((("};
  std::string text;
  const std::size_t n = rng.bounded(8);
  for (std::size_t i = 0; i < n; ++i) {
    if (!text.empty()) text += " ";
    text += pieces[rng.bounded(pieces.size())];
  }
  return text;
}

}  // namespace

TEST_CASE("load_corpus reads TSV with header and preserves order") {
  const LabeledCorpus corpus = from_string(
      "text\tlabel\nfirst tweet\t0\nsecond tweet\t1\n\nthird\t0\n",
      CorpusFormat::Tsv);
  REQUIRE(corpus.size() == 3);
  CHECK(corpus.docs[0].text == "first tweet");
  CHECK(corpus.docs[1].label == 1);
  CHECK(corpus.docs[2].text == "third");
  CHECK(corpus.positives() == 1);
}

TEST_CASE("load_corpus tolerates extra columns and a BOM") {
  const LabeledCorpus corpus = from_string(
      "\xef\xbb\xbfid\ttext\tlabel\n17\thello\t1\n", CorpusFormat::Tsv);
  REQUIRE(corpus.size() == 1);
  CHECK(corpus.docs[0].text == "hello");
  CHECK(corpus.docs[0].label == 1);
}

TEST_CASE("load_corpus keeps empty-text rows") {
  const LabeledCorpus corpus =
      from_string("text\tlabel\n\t1\nx\t0\n", CorpusFormat::Tsv);
  REQUIRE(corpus.size() == 2);
  CHECK(corpus.docs[0].text.empty());
  CHECK(corpus.docs[0].label == 1);
}

TEST_CASE("a header-only file yields an empty corpus") {
  CHECK(from_string("text\tlabel\n", CorpusFormat::Tsv).size() == 0);
  CHECK(from_string("text,label\n", CorpusFormat::Csv).size() == 0);
}

TEST_CASE("load_corpus errors name the offending row or column") {
  try {
    from_string("text\tlabel\nok\t0\nbad\t2\n", CorpusFormat::Tsv);
    FAIL("expected BadLabel");
  } catch (const Error& err) {
    CHECK(err.code() == Error::Code::BadLabel);
    CHECK(std::string(err.what()).find("row 3") != std::string::npos);
  }
  CHECK(code_of([] { from_string("text\tlabel\na\t1\tz\n", CorpusFormat::Tsv); }) ==
        Error::Code::ParseError);
  CHECK(code_of([] { from_string("text\tscore\na\t1\n", CorpusFormat::Tsv); }) ==
        Error::Code::MissingColumn);
  CHECK(code_of([] { from_string("body,label\na,1\n", CorpusFormat::Csv); }) ==
        Error::Code::MissingColumn);
  CHECK(code_of([] { from_string("", CorpusFormat::Tsv); }) ==
        Error::Code::MissingColumn);
  CHECK(code_of([] { load_corpus("no-such-file.tsv", CorpusFormat::Tsv); }) ==
        Error::Code::IoError);
}

TEST_CASE("CSV quoting handles commas, quotes, and newlines") {
  const LabeledCorpus corpus = from_string(
      "text,label\n\"a, b\",1\n\"say \"\"hi\"\"\",0\n\"line1\nline2\",1\nplain,0\n",
      CorpusFormat::Csv);
  REQUIRE(corpus.size() == 4);
  CHECK(corpus.docs[0].text == "a, b");
  CHECK(corpus.docs[1].text == "say \"hi\"");
  CHECK(corpus.docs[2].text == "line1\nline2");
  CHECK(corpus.docs[3].text == "plain");
}

TEST_CASE("CRLF line endings parse the same as LF") {
  const LabeledCorpus tsv =
      from_string("text\tlabel\r\nhello\t1\r\n", CorpusFormat::Tsv);
  REQUIRE(tsv.size() == 1);
  CHECK(tsv.docs[0].text == "hello");
  const LabeledCorpus csv = from_string("text,label\r\nhello,1\r\n", CorpusFormat::Csv);
  REQUIRE(csv.size() == 1);
  CHECK(csv.docs[0].text == "hello");
}

TEST_CASE("TSV emit rejects text it cannot represent") {
  LabeledCorpus corpus;
  corpus.docs = {{"has\ttab", 0}};
  CHECK(code_of([&] { emit_corpus(corpus, CorpusFormat::Tsv); }) ==
        Error::Code::ParseError);
  // CSV handles the same corpus fine.
  CHECK(from_string(emit_corpus(corpus, CorpusFormat::Csv), CorpusFormat::Csv) ==
        corpus);
}

TEST_CASE("save/load round trip through files") {
  testutil::TempDir tmp;
  LabeledCorpus corpus;
  corpus.docs = {{"plain text", 0}, {"another, with comma", 1}, {"", 0}};
  save_corpus(corpus, tmp.file("c.csv"), CorpusFormat::Csv);
  CHECK(load_corpus(tmp.file("c.csv"), CorpusFormat::Csv) == corpus);
  LabeledCorpus tab_free;
  tab_free.docs = {{"plain text", 1}, {"more words", 0}};
  save_corpus(tab_free, tmp.file("c.tsv"), CorpusFormat::Tsv);
  CHECK(load_corpus(tmp.file("c.tsv"), CorpusFormat::Tsv) == tab_free);
}

TEST_CASE("preprocess applies the four steps in order") {
  CHECK(preprocess("HELLO World") == "hello world");
  CHECK(preprocess("see https://x.co/ab now") == "see <url> now");
  CHECK(preprocess("(((their))) specialty") == "(((their))) specialty");
  CHECK(preprocess("ping @Someone_22 ok") == "ping <user> ok");
  CHECK(preprocess("tabs\t\tand   spaces") == "tabs and spaces");
  CHECK(preprocess("WWW.Site.ORG rocks") == "<url> rocks");
  CHECK(preprocess("@handle") == "<user>");
}

TEST_CASE("preprocess steps are individually toggleable") {
  PreprocessConfig none{false, false, false, false};
  CHECK(preprocess("HELLO  @x https://a.b", none) == "HELLO  @x https://a.b");
  PreprocessConfig only_lower{true, false, false, false};
  CHECK(preprocess("HELLO  @X", only_lower) == "hello  @x");
  PreprocessConfig only_urls{false, true, false, false};
  CHECK(preprocess("HTTPS://A.B stays UP", only_urls) == "<url> stays UP");
}

TEST_CASE("preprocess is idempotent and never harms the echo") {
  Rng rng(4242);
  for (int i = 0; i < 500; ++i) {
    const std::string text = random_tweet(rng);
    const std::string once = preprocess(text);
    CHECK(preprocess(once) == once);

    std::size_t echoes_before = 0, echoes_after = 0;
    for (std::size_t p = 0; (p = text.find("(((", p)) != std::string::npos; ++p) {
      ++echoes_before;
    }
    for (std::size_t p = 0; (p = once.find("(((", p)) != std::string::npos; ++p) {
      ++echoes_after;
    }
    CHECK(echoes_after == echoes_before);
  }
}

TEST_CASE("corpus round trips through CSV for arbitrary texts") {
  Rng rng(777);
  for (int i = 0; i < 200; ++i) {
    LabeledCorpus corpus;
    const std::size_t n = rng.bounded(6);
    for (std::size_t d = 0; d < n; ++d) {
      corpus.docs.push_back({random_tweet(rng), static_cast<int>(rng.bounded(2))});
    }
    CHECK(from_string(emit_corpus(corpus, CorpusFormat::Csv), CorpusFormat::Csv) ==
          corpus);
  }
}
