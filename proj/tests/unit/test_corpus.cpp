#include <doctest.h>

#include <random>

#include "ars/corpus.hpp"
#include "ars/error.hpp"
#include "test_support.hpp"

using namespace ars;

TEST_SUITE("corpus") {
  TEST_CASE("tokenize strips edge punctuation and lowercases") {
    auto s = tokenize("Great shot!");
    REQUIRE(s);
    CHECK(s->tokens == std::vector<std::string>{"great", "shot"});
    CHECK(s->length() == 2);
    CHECK(s->raw_text == "Great shot!");

    auto t = tokenize("The LIGHT, the light.");
    REQUIRE(t);
    CHECK(t->tokens == std::vector<std::string>{"the", "light", "the", "light"});
    CHECK(t->length() == 4);
  }

  TEST_CASE("tokenize signals an empty sentence") {
    CHECK_FALSE(tokenize(""));
    CHECK_FALSE(tokenize("   "));
    CHECK_FALSE(tokenize("-- ... !!"));
  }

  TEST_CASE("tokenize keeps interior punctuation and UTF-8 letters") {
    auto s = tokenize("(b&w) child's café...");
    REQUIRE(s);
    CHECK(s->tokens == std::vector<std::string>{"b&w", "child's", "café"});
  }

  TEST_CASE("tokenize is idempotent on its own output") {
    std::mt19937 rng(7);
    const std::string alphabet = "aZ9 .,!?'-\t(b)";
    for (int iter = 0; iter < 500; ++iter) {
      std::string text;
      std::uniform_int_distribution<std::size_t> len(0, 40), pick(0, alphabet.size() - 1);
      for (std::size_t i = 0, n = len(rng); i < n; ++i) text.push_back(alphabet[pick(rng)]);
      auto first = tokenize_words(text);
      std::string joined;
      for (const auto& t : first) joined += t + " ";
      CHECK(tokenize_words(joined) == first);
      for (const auto& t : first) {
        CHECK_FALSE(t.empty());
        CHECK(t.find_first_of(" \t\n") == std::string::npos);
      }
    }
  }

  TEST_CASE("split_sentences") {
    CHECK(split_sentences("Nice. Very nice!") == std::vector<std::string>{"Nice", "Very nice"});
    CHECK(split_sentences("no terminator") == std::vector<std::string>{"no terminator"});
    CHECK(split_sentences("A? B. C!") == std::vector<std::string>{"A", "B", "C"});
    CHECK(split_sentences("...").empty());
  }

  TEST_CASE("load valid corpus") {
    test_support::TempDir dir("corpus");
    auto p = dir.write("c.jsonl",
                       R"({"image_id":"a","aesthetic_score":5.5,"comments":[{"comment_id":"a1","text":"Nice. Very nice!"}]})"
                       "\n"
                       R"({"image_id":"b","aesthetic_score":null,"comments":[{"comment_id":"b1","text":"..."},{"comment_id":"b2","text":"ok"}]})"
                       "\n");
    auto c = load_corpus(p);
    REQUIRE(c.size() == 2);
    CHECK(c.images()[0].aesthetic_score == 5.5);
    CHECK_FALSE(c.images()[1].aesthetic_score);
    CHECK(c.images()[1].comments.size() == 1);
    CHECK(c.ingest_stats().dropped_comments == 1);
    CHECK(c.sentence_count() == 3);
  }

  TEST_CASE("load errors name the line") {
    auto expect_input_error = [](const std::string& text, const std::string& needle) {
      try {
        parse_corpus(text);
        FAIL("expected an error");
      } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::input);
        CHECK(std::string(e.what()).find(needle) != std::string::npos);
      }
    };
    const std::string ok = R"({"image_id":"a","comments":[]})";
    expect_input_error(ok + "\n{not json\n", "line 2");
    expect_input_error(ok + "\n" + ok + "\n", "duplicate image_id");
    expect_input_error(R"({"image_id":"x","aesthetic_score":11.0,"comments":[]})", "outside [1,10]");
    expect_input_error(R"({"image_id":"","comments":[]})", "image_id");
    expect_input_error(R"({"image_id":"x","comments":[{"text":"a"}]})", "comment_id");
  }

  TEST_CASE("iterate_sentences") {
    CHECK(iterate_sentences(Corpus{}).empty());

    auto one = parse_corpus(R"({"image_id":"i","comments":[{"comment_id":"c","text":"a. b. c."}]})");
    auto refs = iterate_sentences(one);
    REQUIRE(refs.size() == 3);
    for (std::size_t k = 0; k < 3; ++k) CHECK(refs[k].sentence_index == k);
    CHECK(refs[2].sentence->tokens.front() == "c");

    auto grid = parse_corpus(
        R"({"image_id":"i1","comments":[{"comment_id":"c1","text":"x"},{"comment_id":"c2","text":"y"}]})"
        "\n"
        R"({"image_id":"i2","comments":[{"comment_id":"c1","text":"z"},{"comment_id":"c2","text":"w"}]})");
    auto r2 = iterate_sentences(grid);
    REQUIRE(r2.size() == 4);
    CHECK(*r2[0].image_id == "i1");
    CHECK(*r2[3].image_id == "i2");
    CHECK(*r2[3].comment_id == "c2");
  }

  TEST_CASE("save/load round trip on the toy corpus") {
    auto c = load_corpus(test_support::toy_dir() / "corpus.jsonl");
    CHECK(c.size() == 20);
    auto again = parse_corpus(serialize_corpus(c));
    CHECK(again == c);
    CHECK(serialize_corpus(again) == serialize_corpus(c));
  }

  TEST_CASE("Corpus constructor enforces invariants") {
    ImageRecord img{"x", {}, 0.5};
    CHECK_THROWS_AS(Corpus({img}), Error);
    ImageRecord a{"dup", {}, std::nullopt};
    CHECK_THROWS_AS(Corpus({a, a}), Error);
  }
}
