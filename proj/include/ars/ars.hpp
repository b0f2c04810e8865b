#pragma once

#include <cstddef>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "ars/corpus.hpp"
#include "ars/lexicon.hpp"
#include "ars/providers.hpp"
#include "ars/stats.hpp"

namespace ars {

/// The five components and their unweighted sum.
struct ArsBreakdown {
  std::size_t a = 0;   // aesthetic-word hits
  double l = 0.0;      // length score
  std::size_t o = 0;   // object-word hits
  double s = 0.0;      // sentiment score
  double tfidf = 0.0;  // normalized tf-idf sum
  double total = 0.0;

  friend bool operator==(const ArsBreakdown&, const ArsBreakdown&) = default;
};

/// total = a + l + o + s + tfidf, summed in that order.
ArsBreakdown compose_ars(std::size_t a, double l, std::size_t o, double s, double tfidf);

struct Lexicons {
  WordList aesthetic;
  WordList object;
};

/// Scores sentences against frozen statistics. Holds references; the stats,
/// lexicons and provider must outlive the scorer. Thread-safe when the
/// provider is.
class ArsScorer {
 public:
  ArsScorer(const FrozenStats& stats, const Lexicons& lexicons, const SentimentProvider& sentiment);

  /// tf-idf against the given document.
  ArsBreakdown score(const Sentence& t, const DocumentTerms& doc) const;
  /// tf-idf against the document of `doc_id` in `corpus`.
  ArsBreakdown score(const Sentence& t, std::string_view doc_id, const Corpus& corpus) const;
  /// tf-idf with the sentence as its own document (text outside any corpus).
  ArsBreakdown score_standalone(const Sentence& t) const;

  const FrozenStats& stats() const noexcept { return stats_; }

 private:
  ArsBreakdown score_with(const Sentence& t, double tfidf) const;

  const FrozenStats& stats_;
  const Lexicons& lexicons_;
  const SentimentProvider& sentiment_;
};

struct LabelledSentence {
  std::string image_id;
  std::string comment_id;
  std::size_t sentence_index = 0;
  Sentence sentence;
  ArsBreakdown breakdown;

  friend bool operator==(const LabelledSentence&, const LabelledSentence&) = default;
};

struct HistogramBin {
  double start = 0.0;
  std::size_t count = 0;

  friend bool operator==(const HistogramBin&, const HistogramBin&) = default;
};

/// Left-closed bins [k*w, (k+1)*w) from 0 up to the last non-empty bin.
/// Negative values fall into bin 0.
std::vector<HistogramBin> ars_histogram(std::span<const double> totals, double bin_width);

struct LabelSummary {
  std::size_t count = 0;
  double mean = 0.0;
  double scale = 0.0;  // std or variance per the stats scale mode
  double min = 0.0;
  double max = 0.0;
  std::vector<HistogramBin> histogram;
};

LabelSummary summarize(std::span<const LabelledSentence> labels, ScaleMode mode, double bin_width);

struct LabelOptions {
  bool lenient = false;  // skip sentences whose provider fails instead of aborting
  double bin_width = 0.5;
};

struct LabelResult {
  std::vector<LabelledSentence> labels;
  std::size_t skipped = 0;
  LabelSummary summary;
};

/// One label per sentence in document order; OpenMP over sentences.
LabelResult label_corpus(const Corpus& corpus, const ArsScorer& scorer,
                         const LabelOptions& options = {});
/// Reference implementation, single thread.
LabelResult label_corpus_serial(const Corpus& corpus, const ArsScorer& scorer,
                                const LabelOptions& options = {});

/// Writes the training ARS mean and scale into the stats.
void freeze_ars(FrozenStats& stats, const LabelSummary& summary);

enum class ThresholdRule { leq, geq };
std::string_view to_string(ThresholdRule r);
ThresholdRule parse_threshold_rule(std::string_view s);

struct ThresholdPartition {
  ThresholdRule rule = ThresholdRule::geq;
  double alpha = 0.0;
  double threshold = 0.0;  // m - alpha*sigma (leq) or m + alpha*sigma (geq)
  std::vector<LabelledSentence> members;  // ARS descending, document order on ties
};

ThresholdPartition partition_by_threshold(std::span<const LabelledSentence> labels, double ars_mean,
                                          double ars_scale, double alpha, ThresholdRule rule);
/// Uses the frozen training mean and scale; input error if they are unset.
ThresholdPartition partition_by_threshold(std::span<const LabelledSentence> labels,
                                          const FrozenStats& stats, double alpha,
                                          ThresholdRule rule);

/// Labels JSONL: {"image_id","comment_id","sentence_index","text","a","l","o","s","tfidf","ars"}.
std::string labels_to_jsonl(std::span<const LabelledSentence> labels);
std::vector<LabelledSentence> parse_labels(std::string_view jsonl);
std::vector<LabelledSentence> load_labels(const std::filesystem::path& path);

}  // namespace ars
