// Serial reference vs OpenMP kernels on a synthetic corpus.
//
//   bench_kernels --benchmark_filter=Tfidf
//
// The second argument of the parallel cases is the worker count.

#include <benchmark/benchmark.h>

#include <map>
#include <random>
#include <string>
#include <vector>

#include "ars/ars.hpp"
#include "ars/parallel.hpp"
#include "ars/stats.hpp"

namespace {

ars::Corpus synthetic_corpus(std::size_t images) {
  std::mt19937 rng(1234);
  std::vector<std::string> vocab;
  for (int i = 0; i < 5000; ++i) vocab.push_back("w" + std::to_string(i));
  // Zipf-like draw: low indices are much more common.
  std::uniform_real_distribution<double> u(0, 1);
  auto word = [&] {
    const double x = u(rng);
    return vocab[static_cast<std::size_t>(x * x * x * static_cast<double>(vocab.size() - 1))];
  };
  std::vector<ars::ImageRecord> recs;
  for (std::size_t i = 0; i < images; ++i) {
    ars::ImageRecord r;
    r.image_id = "img" + std::to_string(i);
    for (int c = 0; c < 4; ++c) {
      ars::Comment cm;
      cm.comment_id = r.image_id + "-c" + std::to_string(c);
      for (int s = 0, ns = 1 + static_cast<int>(rng() % 3); s < ns; ++s) {
        std::string text;
        for (int w = 0, nw = 3 + static_cast<int>(rng() % 15); w < nw; ++w) text += word() + " ";
        cm.sentences.push_back(*ars::tokenize(text));
      }
      r.comments.push_back(std::move(cm));
    }
    recs.push_back(std::move(r));
  }
  return ars::Corpus(std::move(recs));
}

const ars::Corpus& corpus_of(std::size_t n) {
  static std::map<std::size_t, ars::Corpus> cache;
  auto it = cache.find(n);
  if (it == cache.end()) it = cache.emplace(n, synthetic_corpus(n)).first;
  return it->second;
}

struct WorkerScope {
  explicit WorkerScope(int n) { ars::set_worker_cap(n); }
  ~WorkerScope() { ars::set_worker_cap(0); }
};

void BM_DocumentIndexSerial(benchmark::State& st) {
  const auto& c = corpus_of(static_cast<std::size_t>(st.range(0)));
  for (auto _ : st) benchmark::DoNotOptimize(ars::build_document_index_serial(c));
}

void BM_DocumentIndexParallel(benchmark::State& st) {
  const auto& c = corpus_of(static_cast<std::size_t>(st.range(0)));
  WorkerScope w(static_cast<int>(st.range(1)));
  for (auto _ : st) benchmark::DoNotOptimize(ars::build_document_index(c));
}

void BM_TfidfSerial(benchmark::State& st) {
  const auto& c = corpus_of(static_cast<std::size_t>(st.range(0)));
  for (auto _ : st) benchmark::DoNotOptimize(ars::build_tfidf_serial(c));
}

void BM_TfidfParallel(benchmark::State& st) {
  const auto& c = corpus_of(static_cast<std::size_t>(st.range(0)));
  WorkerScope w(static_cast<int>(st.range(1)));
  for (auto _ : st) benchmark::DoNotOptimize(ars::build_tfidf(c));
}

struct LabelFixture {
  const ars::Corpus& corpus;
  ars::FrozenStats stats;
  ars::Lexicons lex;
  ars::LexiconSentimentProvider sentiment;
  ars::ArsScorer scorer;

  explicit LabelFixture(const ars::Corpus& c)
      : corpus(c),
        stats(ars::compute_frozen_stats(c)),
        lex{ars::WordList(ars::WordListKind::aesthetic, {"w1", "w2", "w3", "w10"}),
            ars::WordList(ars::WordListKind::object, {"w4", "w5", "w20"})},
        sentiment(ars::WordList(ars::WordListKind::positive, {"w6", "w7"}),
                  ars::WordList(ars::WordListKind::negative, {"w8"})),
        scorer(stats, lex, sentiment) {}
};

void BM_LabelSerial(benchmark::State& st) {
  LabelFixture f(corpus_of(static_cast<std::size_t>(st.range(0))));
  for (auto _ : st) benchmark::DoNotOptimize(ars::label_corpus_serial(f.corpus, f.scorer));
}

void BM_LabelParallel(benchmark::State& st) {
  LabelFixture f(corpus_of(static_cast<std::size_t>(st.range(0))));
  WorkerScope w(static_cast<int>(st.range(1)));
  for (auto _ : st) benchmark::DoNotOptimize(ars::label_corpus(f.corpus, f.scorer));
}

void sizes(benchmark::internal::Benchmark* b) {
  for (int n : {1000, 10000}) b->Arg(n);
}

void sizes_threads(benchmark::internal::Benchmark* b) {
  for (int n : {1000, 10000})
    for (int t : {1, 2, 4}) b->Args({n, t});
}

}  // namespace

BENCHMARK(BM_DocumentIndexSerial)->Apply(sizes)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_DocumentIndexParallel)->Apply(sizes_threads)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_TfidfSerial)->Apply(sizes)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_TfidfParallel)->Apply(sizes_threads)->Unit(benchmark::kMillisecond)->UseRealTime();
BENCHMARK(BM_LabelSerial)->Apply(sizes)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_LabelParallel)->Apply(sizes_threads)->Unit(benchmark::kMillisecond)->UseRealTime();

BENCHMARK_MAIN();
