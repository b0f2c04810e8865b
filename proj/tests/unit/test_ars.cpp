#include <doctest.h>

#include <cmath>
#include <random>

#include "ars/ars.hpp"
#include "ars/error.hpp"
#include "ars/parallel.hpp"
#include "oracle/reference.hpp"
#include "test_support.hpp"

using namespace ars;

namespace {

struct Toy {
  Corpus corpus = load_corpus(test_support::toy_dir() / "corpus.jsonl");
  FrozenStats stats = compute_frozen_stats(corpus);
  Lexicons lex{load_wordlist(test_support::data_dir() / "aesthetic_words.txt", WordListKind::aesthetic).list,
               load_wordlist(test_support::data_dir() / "object_words.txt", WordListKind::object).list};
  TableSentimentProvider sentiment = TableSentimentProvider::load(test_support::toy_dir() / "sentiment.jsonl");
  ArsScorer scorer{stats, lex, sentiment};
};

const Toy& toy() {
  static const Toy t;
  return t;
}

LabelledSentence labelled(double total) {
  LabelledSentence l;
  l.image_id = "i";
  l.comment_id = "c";
  l.sentence = *tokenize("x");
  l.breakdown.total = total;
  return l;
}

std::vector<double> totals_of(const std::vector<LabelledSentence>& ls) {
  std::vector<double> out;
  for (const auto& l : ls) out.push_back(l.breakdown.total);
  return out;
}

struct CountingSentiment final : SentimentProvider {
  SentimentPair sentiment(const Sentence& t) const override {
    if (t.raw_text.find("fail") != std::string::npos) throw provider_error("scripted failure");
    return {0.5, 0.5};
  }
  std::string describe() const override { return "test"; }
};

}  // namespace

TEST_SUITE("ars") {
  TEST_CASE("compose_ars sums the five components") {
    auto b = compose_ars(2, 0.5, 1, 0.25, 1.5);
    CHECK(b.a == 2);
    CHECK(b.o == 1);
    CHECK(b.total == 5.25);
    CHECK(compose_ars(0, 0.0, 0, 0.0, 0.0).total == 0.0);
  }

  TEST_CASE("a sentence with nothing to score gets zero") {
    const auto& t = toy();
    WordList pos(WordListKind::positive, {}), neg(WordListKind::negative, {});
    LexiconSentimentProvider none(pos, neg);
    ArsScorer scorer(t.stats, t.lex, none);
    Sentence s = *tokenize("zzz");  // one token: the minimum corpus length
    REQUIRE(t.stats.length.min_len == 1);
    auto b = scorer.score(s, DocumentTerms{});
    CHECK(b == compose_ars(0, 0.0, 0, 0.0, 0.0));
  }

  TEST_CASE("every component matches the brute-force reference") {
    const auto& t = toy();
    auto rc = oracle::load_corpus((test_support::toy_dir() / "corpus.jsonl").string());
    auto ref = oracle::score_corpus(rc, oracle::load_list((test_support::data_dir() / "aesthetic_words.txt").string()),
                                    oracle::load_list((test_support::data_dir() / "object_words.txt").string()),
                                    oracle::load_sentiment((test_support::toy_dir() / "sentiment.jsonl").string()));
    auto result = label_corpus(t.corpus, t.scorer);
    REQUIRE(result.labels.size() == ref.size());
    for (std::size_t i = 0; i < ref.size(); ++i) {
      const auto& b = result.labels[i].breakdown;
      CHECK(result.labels[i].image_id == rc.sentences[i].image_id);
      CHECK(result.labels[i].sentence_index == rc.sentences[i].index);
      CHECK(static_cast<double>(b.a) == ref[i].a);
      CHECK(static_cast<double>(b.o) == ref[i].o);
      CHECK(std::fabs(b.l - ref[i].l) < 1e-9);
      CHECK(std::fabs(b.s - ref[i].s) < 1e-9);
      CHECK(std::fabs(b.tfidf - ref[i].tfidf) < 1e-9);
      CHECK(std::fabs(b.total - ref[i].total) < 1e-9);
    }
  }

  TEST_CASE("score by document id matches score against the document") {
    const auto& t = toy();
    const auto& img = t.corpus.images()[3];
    const auto& s = img.comments[0].sentences[0];
    CHECK(t.scorer.score(s, img.image_id, t.corpus) == t.scorer.score(s, document_terms(img)));
    CHECK_THROWS_AS(t.scorer.score(s, "missing", t.corpus), Error);
  }

  TEST_CASE("parallel labelling equals the serial reference") {
    const auto& t = toy();
    auto serial = label_corpus_serial(t.corpus, t.scorer);
    for (int threads : {1, 2, 3, 8}) {
      set_worker_cap(threads);
      auto par = label_corpus(t.corpus, t.scorer);
      CHECK(par.labels == serial.labels);
      CHECK(par.summary.mean == serial.summary.mean);
      CHECK(par.summary.histogram == serial.summary.histogram);
    }
    set_worker_cap(0);
  }

  TEST_CASE("strict and lenient labelling") {
    auto c = parse_corpus(
        R"({"image_id":"a","comments":[{"comment_id":"c","text":"good good one. this will fail. nice sky"}]})");
    auto stats = compute_frozen_stats(c);
    const auto& lex = toy().lex;
    CountingSentiment sentiment;
    ArsScorer scorer(stats, lex, sentiment);
    try {
      label_corpus(c, scorer);
      FAIL("expected provider error");
    } catch (const Error& e) {
      CHECK(e.kind() == ErrorKind::provider);
    }
    auto lenient = label_corpus(c, scorer, {true, 0.5});
    CHECK(lenient.skipped == 1);
    REQUIRE(lenient.labels.size() == 2);
    CHECK(lenient.labels[1].sentence_index == 2);
    CHECK(label_corpus_serial(c, scorer, {true, 0.5}).labels == lenient.labels);
  }

  TEST_CASE("partition examples") {
    std::vector<LabelledSentence> ls{labelled(1), labelled(2), labelled(3)};
    auto geq = partition_by_threshold(ls, 2.0, 1.0, 0.5, ThresholdRule::geq);
    CHECK(geq.threshold == 2.5);
    CHECK(totals_of(geq.members) == std::vector<double>{3});
    auto leq = partition_by_threshold(ls, 2.0, 1.0, 0.5, ThresholdRule::leq);
    CHECK(totals_of(leq.members) == std::vector<double>{1});
    auto edge = partition_by_threshold(ls, 2.0, 1.0, 0.0, ThresholdRule::geq);
    CHECK(totals_of(edge.members) == std::vector<double>{3, 2});
  }

  TEST_CASE("partition requires frozen ARS statistics") {
    std::vector<LabelledSentence> ls{labelled(1)};
    FrozenStats fs;
    CHECK_THROWS_AS(partition_by_threshold(ls, fs, 0.5, ThresholdRule::geq), Error);
    LabelSummary sum;
    sum.count = 1;
    sum.mean = 2.0;
    sum.scale = 1.0;
    freeze_ars(fs, sum);
    CHECK(partition_by_threshold(ls, fs, 0.5, ThresholdRule::leq).members.size() == 1);
  }

  TEST_CASE("partition is monotone in alpha") {
    std::mt19937 rng(21);
    std::normal_distribution<double> g(5, 2);
    std::vector<LabelledSentence> ls;
    for (int i = 0; i < 200; ++i) ls.push_back(labelled(g(rng)));
    for (auto rule : {ThresholdRule::geq, ThresholdRule::leq}) {
      std::size_t prev = ls.size() + 1;
      for (double alpha = 0; alpha <= 3.0; alpha += 0.25) {
        auto p = partition_by_threshold(ls, 5.0, 2.0, alpha, rule);
        CHECK(p.members.size() <= prev);
        prev = p.members.size();
        for (std::size_t k = 1; k < p.members.size(); ++k)
          CHECK(p.members[k - 1].breakdown.total >= p.members[k].breakdown.total);
      }
    }
  }

  TEST_CASE("threshold rule parsing") {
    CHECK(parse_threshold_rule("leq") == ThresholdRule::leq);
    CHECK(to_string(ThresholdRule::geq) == "geq");
    CHECK_THROWS_AS(parse_threshold_rule("gt"), Error);
  }

  TEST_CASE("histogram") {
    std::vector<double> v{0.1, 0.9, 1.5};
    auto h = ars_histogram(v, 1.0);
    CHECK(h == std::vector<HistogramBin>{{0.0, 2}, {1.0, 1}});
    std::vector<double> w{0.0, 1.0, -0.3, 2.5};
    CHECK(ars_histogram(w, 0.5) ==
          std::vector<HistogramBin>{{0.0, 2}, {0.5, 0}, {1.0, 1}, {1.5, 0}, {2.0, 0}, {2.5, 1}});
    CHECK(ars_histogram(std::vector<double>{}, 1.0).empty());
    CHECK_THROWS_AS(ars_histogram(v, 0.0), Error);
  }

  TEST_CASE("histogram conserves counts") {
    std::mt19937 rng(4);
    std::uniform_real_distribution<double> u(0, 20), wd(0.05, 3);
    for (int i = 0; i < 100; ++i) {
      std::vector<double> v(50);
      for (auto& x : v) x = u(rng);
      const double width = wd(rng);
      std::size_t n = 0;
      for (const auto& b : ars_histogram(v, width)) n += b.count;
      CHECK(n == v.size());
    }
  }

  TEST_CASE("labels round trip") {
    const auto& t = toy();
    auto labels = label_corpus(t.corpus, t.scorer).labels;
    auto text = labels_to_jsonl(labels);
    auto back = parse_labels(text);
    CHECK(back == labels);
    CHECK(labels_to_jsonl(back) == text);
    CHECK_THROWS_AS(parse_labels(R"({"image_id":"x"})"), Error);
  }
}
