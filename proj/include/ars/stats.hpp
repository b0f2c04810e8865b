#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "ars/corpus.hpp"

namespace ars {

/// How the sigmoid scale is derived from a sample: its standard deviation
/// (default) or its variance.
enum class ScaleMode { stddev, variance };

enum class LogBase { e, ten, two };

/// Which population the tau statistics are taken over: one value per distinct
/// (term, document) pair (default) or one per token occurrence.
enum class TauPopulation { pairs, occurrences };

struct StatsConfig {
  ScaleMode scale = ScaleMode::stddev;
  LogBase log_base = LogBase::e;
  TauPopulation tau_population = TauPopulation::pairs;

  friend bool operator==(const StatsConfig&, const StatsConfig&) = default;
};

std::string_view to_string(ScaleMode m);
std::string_view to_string(LogBase b);
std::string_view to_string(TauPopulation p);
ScaleMode parse_scale_mode(std::string_view s);
LogBase parse_log_base(std::string_view s);
TauPopulation parse_tau_population(std::string_view s);

/// beta(x, m, sigma) = 1 / (1 + exp(-(x - m) / sigma)). sigma must be > 0.
double sigmoid(double x, double m, double sigma);

/// Mean and scale of a sample under the given mode (population moments).
struct Moments {
  double mean = 0.0;
  double scale = 0.0;
};
Moments population_moments(std::span<const double> values, ScaleMode mode);

struct LengthStats {
  double mean = 0.0;
  double scale = 1.0;
  std::size_t min_len = 0;
  std::size_t max_len = 0;

  friend bool operator==(const LengthStats&, const LengthStats&) = default;
};

/// Throws degenerate error when fewer than two distinct lengths exist.
LengthStats length_stats_from(std::span<const std::size_t> lengths, ScaleMode mode);
LengthStats compute_length_stats(const Corpus& corpus, ScaleMode mode = ScaleMode::stddev);

/// L(t): sigmoid of |t| rescaled so |t|_min -> 0 and |t|_max -> 1. Lengths
/// outside [min, max] are clamped first.
double length_score(std::size_t length, const LengthStats& ls);
inline double length_score(const Sentence& t, const LengthStats& ls) {
  return length_score(t.length(), ls);
}

/// Term counts of one document (all comments of one image, concatenated).
struct DocumentTerms {
  std::unordered_map<std::string, std::size_t> counts;  // n_tm
  std::size_t total = 0;                                // N_tm
};

DocumentTerms document_terms(const ImageRecord& image);

/// Per-image term counts, aligned with corpus.images().
class DocumentIndex {
 public:
  DocumentIndex() = default;
  explicit DocumentIndex(std::vector<DocumentTerms> docs) : docs_(std::move(docs)) {}

  const DocumentTerms& operator[](std::size_t i) const { return docs_.at(i); }
  std::size_t size() const noexcept { return docs_.size(); }
  const std::vector<DocumentTerms>& docs() const noexcept { return docs_; }

 private:
  std::vector<DocumentTerms> docs_;
};

/// Parallel over images.
DocumentIndex build_document_index(const Corpus& corpus);
DocumentIndex build_document_index_serial(const Corpus& corpus);

struct TfIdfModel {
  std::size_t doc_count = 0;                     // N
  std::map<std::string, std::size_t> doc_freq;   // I_tm
  double tau_mean = 0.0;
  double tau_scale = 1.0;
  double tau_min = 0.0;
  double tau_max = 0.0;
  LogBase log_base = LogBase::e;

  /// log((1 + N) / (1 + I_tm)) + 1; terms absent from the model use I_tm = 0.
  double idf(std::string_view term) const;
  double idf_for(std::size_t term_doc_freq) const;

  /// tau = n_tm / N_tm * idf(term).
  double tau(std::string_view term, std::size_t n_tm, std::size_t n_total) const;

  friend bool operator==(const TfIdfModel&, const TfIdfModel&) = default;
};

/// Parallel over documents; the tau statistics are computed over the sorted
/// value multiset so the result does not depend on document order.
TfIdfModel build_tfidf(const Corpus& corpus, const StatsConfig& config = {});
TfIdfModel build_tfidf(const Corpus& corpus, const DocumentIndex& index,
                       const StatsConfig& config = {});
TfIdfModel build_tfidf_serial(const Corpus& corpus, const StatsConfig& config = {});

/// tau_n: sigmoid-normalized tau clamped to [tau_min, tau_max].
double tfidf_norm(double tau, const TfIdfModel& model);

/// T_fidf(t) against the document the sentence belongs to. Tokens absent
/// from the document contribute 0.
double tfidf_score(const Sentence& t, const DocumentTerms& doc, const TfIdfModel& model);
double tfidf_score(const Sentence& t, std::string_view doc_id, const TfIdfModel& model,
                   const Corpus& corpus);

/// T_fidf(t) with the sentence taken as its own document (n_tm and N_tm from
/// the sentence, I_tm and N from the model). Used for text outside the corpus.
double tfidf_score_standalone(const Sentence& t, const TfIdfModel& model);

struct FrozenStats {
  StatsConfig config;
  LengthStats length;
  TfIdfModel tfidf;
  std::optional<double> ars_mean;
  std::optional<double> ars_scale;
  std::string corpus_hash;

  friend bool operator==(const FrozenStats&, const FrozenStats&) = default;
};

/// sha256 of the corpus' canonical serialization.
std::string corpus_hash(const Corpus& corpus);

/// Length and tf-idf statistics; throws degenerate error if either sigmoid
/// normalization would be undefined.
FrozenStats compute_frozen_stats(const Corpus& corpus, const StatsConfig& config = {});

std::string stats_to_json(const FrozenStats& stats);
FrozenStats stats_from_json(std::string_view json_text);
void save_stats(const FrozenStats& stats, const std::filesystem::path& path);
FrozenStats load_stats(const std::filesystem::path& path);

/// Throws input error unless the hash matches or `force` is set.
void check_corpus_hash(const FrozenStats& stats, const Corpus& corpus, bool force);

}  // namespace ars
