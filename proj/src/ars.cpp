#include "ars/ars.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <numeric>
#include <optional>

#include "ars/error.hpp"
#include "ars/io.hpp"
#include "ars/parallel.hpp"

namespace ars {

ArsBreakdown compose_ars(std::size_t a, double l, std::size_t o, double s, double tfidf) {
  ArsBreakdown b{a, l, o, s, tfidf, 0.0};
  b.total = static_cast<double>(a) + l + static_cast<double>(o) + s + tfidf;
  return b;
}

ArsScorer::ArsScorer(const FrozenStats& stats, const Lexicons& lexicons,
                     const SentimentProvider& sentiment)
    : stats_(stats), lexicons_(lexicons), sentiment_(sentiment) {}

ArsBreakdown ArsScorer::score_with(const Sentence& t, double tfidf) const {
  return compose_ars(aesthetic_count(t, lexicons_.aesthetic), length_score(t, stats_.length),
                     object_count(t, lexicons_.object), sentiment_score(sentiment_.sentiment(t)),
                     tfidf);
}

ArsBreakdown ArsScorer::score(const Sentence& t, const DocumentTerms& doc) const {
  return score_with(t, tfidf_score(t, doc, stats_.tfidf));
}

ArsBreakdown ArsScorer::score(const Sentence& t, std::string_view doc_id,
                              const Corpus& corpus) const {
  return score_with(t, tfidf_score(t, doc_id, stats_.tfidf, corpus));
}

ArsBreakdown ArsScorer::score_standalone(const Sentence& t) const {
  return score_with(t, tfidf_score_standalone(t, stats_.tfidf));
}

std::vector<HistogramBin> ars_histogram(std::span<const double> totals, double bin_width) {
  if (!(bin_width > 0.0) || !std::isfinite(bin_width)) {
    throw domain_error("histogram bin width must be positive");
  }
  std::vector<std::size_t> counts;
  for (double v : totals) {
    std::size_t k = 0;
    if (v > 0.0) {
      k = static_cast<std::size_t>(std::floor(v / bin_width));
      // Keep bin membership consistent with the reported k*w starts.
      while (k > 0 && static_cast<double>(k) * bin_width > v) --k;
      while (static_cast<double>(k + 1) * bin_width <= v) ++k;
    }
    if (counts.size() <= k) counts.resize(k + 1, 0);
    ++counts[k];
  }
  std::vector<HistogramBin> out;
  out.reserve(counts.size());
  for (std::size_t k = 0; k < counts.size(); ++k) {
    out.push_back({static_cast<double>(k) * bin_width, counts[k]});
  }
  return out;
}

LabelSummary summarize(std::span<const LabelledSentence> labels, ScaleMode mode, double bin_width) {
  LabelSummary s;
  s.count = labels.size();
  if (labels.empty()) return s;
  std::vector<double> totals;
  totals.reserve(labels.size());
  for (const auto& l : labels) totals.push_back(l.breakdown.total);
  s.histogram = ars_histogram(totals, bin_width);
  auto [mn, mx] = std::minmax_element(totals.begin(), totals.end());
  s.min = *mn;
  s.max = *mx;
  auto m = population_moments(totals, mode);
  s.mean = m.mean;
  s.scale = m.scale;
  return s;
}

namespace {

std::string where(const SentenceRef& r) {
  return "image " + *r.image_id + ", comment " + *r.comment_id + ", sentence " +
         std::to_string(r.sentence_index);
}

struct Outcome {
  std::optional<ArsBreakdown> value;
  std::optional<Error> error;
};

Outcome score_one(const SentenceRef& r, const ArsScorer& scorer, const DocumentIndex& index) {
  try {
    return {scorer.score(*r.sentence, index[r.image_index]), std::nullopt};
  } catch (const Error& e) {
    return {std::nullopt, Error(e.kind(), where(r) + ": " + e.what())};
  }
}

LabelResult assemble(const std::vector<SentenceRef>& refs, std::vector<Outcome>& outcomes,
                     const ArsScorer& scorer, const LabelOptions& options) {
  LabelResult result;
  result.labels.reserve(refs.size());
  for (std::size_t i = 0; i < refs.size(); ++i) {
    auto& o = outcomes[i];
    if (o.error) {
      if (options.lenient && o.error->kind() == ErrorKind::provider) {
        ++result.skipped;
        continue;
      }
      throw *o.error;
    }
    const auto& r = refs[i];
    result.labels.push_back({*r.image_id, *r.comment_id, r.sentence_index, *r.sentence, *o.value});
  }
  result.summary = summarize(result.labels, scorer.stats().config.scale, options.bin_width);
  return result;
}

}  // namespace

LabelResult label_corpus(const Corpus& corpus, const ArsScorer& scorer, const LabelOptions& options) {
  const auto refs = iterate_sentences(corpus);
  const auto index = build_document_index(corpus);
  std::vector<Outcome> outcomes(refs.size());
  const auto n = static_cast<std::ptrdiff_t>(refs.size());
#pragma omp parallel for schedule(dynamic, 64) num_threads(worker_count())
  for (std::ptrdiff_t i = 0; i < n; ++i) outcomes[i] = score_one(refs[i], scorer, index);
  return assemble(refs, outcomes, scorer, options);
}

LabelResult label_corpus_serial(const Corpus& corpus, const ArsScorer& scorer,
                                const LabelOptions& options) {
  const auto refs = iterate_sentences(corpus);
  const auto index = build_document_index_serial(corpus);
  std::vector<Outcome> outcomes;
  outcomes.reserve(refs.size());
  for (const auto& r : refs) {
    outcomes.push_back(score_one(r, scorer, index));
    // Strict mode stops at the first failure.
    if (outcomes.back().error && !options.lenient) break;
  }
  outcomes.resize(refs.size());
  return assemble(refs, outcomes, scorer, options);
}

void freeze_ars(FrozenStats& stats, const LabelSummary& summary) {
  if (summary.count == 0) throw degenerate_error("cannot freeze ARS statistics of zero labels");
  stats.ars_mean = summary.mean;
  stats.ars_scale = summary.scale;
}

std::string_view to_string(ThresholdRule r) { return r == ThresholdRule::leq ? "leq" : "geq"; }

ThresholdRule parse_threshold_rule(std::string_view s) {
  if (s == "leq") return ThresholdRule::leq;
  if (s == "geq") return ThresholdRule::geq;
  throw input_error("unknown threshold rule '" + std::string(s) + "' (leq|geq)");
}

ThresholdPartition partition_by_threshold(std::span<const LabelledSentence> labels, double ars_mean,
                                          double ars_scale, double alpha, ThresholdRule rule) {
  ThresholdPartition p;
  p.rule = rule;
  p.alpha = alpha;
  p.threshold = rule == ThresholdRule::leq ? ars_mean - alpha * ars_scale
                                           : ars_mean + alpha * ars_scale;
  std::vector<std::size_t> idx;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    const double v = labels[i].breakdown.total;
    if (rule == ThresholdRule::leq ? v <= p.threshold : v >= p.threshold) idx.push_back(i);
  }
  std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
    return labels[a].breakdown.total > labels[b].breakdown.total;
  });
  p.members.reserve(idx.size());
  for (auto i : idx) p.members.push_back(labels[i]);
  return p;
}

ThresholdPartition partition_by_threshold(std::span<const LabelledSentence> labels,
                                          const FrozenStats& stats, double alpha,
                                          ThresholdRule rule) {
  if (!stats.ars_mean || !stats.ars_scale) {
    throw input_error("stats have no frozen ars_mean/ars_scale; run label with --freeze-ars");
  }
  return partition_by_threshold(labels, *stats.ars_mean, *stats.ars_scale, alpha, rule);
}

std::string labels_to_jsonl(std::span<const LabelledSentence> labels) {
  std::string out;
  for (const auto& l : labels) {
    nlohmann::ordered_json row;
    row["image_id"] = l.image_id;
    row["comment_id"] = l.comment_id;
    row["sentence_index"] = l.sentence_index;
    row["text"] = l.sentence.raw_text;
    row["a"] = l.breakdown.a;
    row["l"] = l.breakdown.l;
    row["o"] = l.breakdown.o;
    row["s"] = l.breakdown.s;
    row["tfidf"] = l.breakdown.tfidf;
    row["ars"] = l.breakdown.total;
    out += row.dump();
    out += '\n';
  }
  return out;
}

std::vector<LabelledSentence> parse_labels(std::string_view jsonl) {
  std::vector<LabelledSentence> out;
  io::for_each_line(jsonl, [&](std::size_t line_no, std::string_view line) {
    const std::string at = "labels line " + std::to_string(line_no) + ": ";
    try {
      auto j = nlohmann::json::parse(line);
      LabelledSentence l;
      l.image_id = j.at("image_id").get<std::string>();
      l.comment_id = j.at("comment_id").get<std::string>();
      l.sentence_index = j.at("sentence_index").get<std::size_t>();
      auto s = tokenize(j.at("text").get<std::string>());
      if (!s) throw input_error(at + "text has no tokens");
      l.sentence = std::move(*s);
      l.breakdown.a = j.at("a").get<std::size_t>();
      l.breakdown.l = j.at("l").get<double>();
      l.breakdown.o = j.at("o").get<std::size_t>();
      l.breakdown.s = j.at("s").get<double>();
      l.breakdown.tfidf = j.at("tfidf").get<double>();
      l.breakdown.total = j.at("ars").get<double>();
      out.push_back(std::move(l));
    } catch (const nlohmann::json::exception& e) {
      throw input_error(at + e.what());
    }
  });
  return out;
}

std::vector<LabelledSentence> load_labels(const std::filesystem::path& path) {
  return parse_labels(io::read_file(path));
}

}  // namespace ars
