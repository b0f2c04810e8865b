#include "ars/stats.hpp"

#include <json.hpp>
#include <omp.h>

#include <algorithm>
#include <cmath>
#include <limits>

#include "ars/error.hpp"
#include "ars/io.hpp"
#include "ars/parallel.hpp"

namespace ars {

std::string_view to_string(ScaleMode m) { return m == ScaleMode::stddev ? "stddev" : "variance"; }

std::string_view to_string(LogBase b) {
  switch (b) {
    case LogBase::e: return "e";
    case LogBase::ten: return "10";
    case LogBase::two: return "2";
  }
  return "e";
}

std::string_view to_string(TauPopulation p) {
  return p == TauPopulation::pairs ? "pairs" : "occurrences";
}

ScaleMode parse_scale_mode(std::string_view s) {
  if (s == "stddev") return ScaleMode::stddev;
  if (s == "variance") return ScaleMode::variance;
  throw input_error("unknown scale mode '" + std::string(s) + "' (stddev|variance)");
}

LogBase parse_log_base(std::string_view s) {
  if (s == "e") return LogBase::e;
  if (s == "10") return LogBase::ten;
  if (s == "2") return LogBase::two;
  throw input_error("unknown log base '" + std::string(s) + "' (e|10|2)");
}

TauPopulation parse_tau_population(std::string_view s) {
  if (s == "pairs") return TauPopulation::pairs;
  if (s == "occurrences") return TauPopulation::occurrences;
  throw input_error("unknown tau population '" + std::string(s) + "' (pairs|occurrences)");
}

double sigmoid(double x, double m, double sigma) {
  if (!(sigma > 0.0) || !std::isfinite(sigma)) {
    throw domain_error("sigmoid scale must be positive and finite");
  }
  return 1.0 / (1.0 + std::exp(-((x - m) / sigma)));
}

Moments population_moments(std::span<const double> values, ScaleMode mode) {
  if (values.empty()) throw degenerate_error("moments of an empty sample");
  const double n = static_cast<double>(values.size());
  Moments out;
  out.mean = compensated_sum(values) / n;
  std::vector<double> sq(values.size());
  std::transform(values.begin(), values.end(), sq.begin(), [&](double v) {
    double d = v - out.mean;
    return d * d;
  });
  double var = compensated_sum(sq) / n;
  out.scale = mode == ScaleMode::stddev ? std::sqrt(var) : var;
  return out;
}

LengthStats length_stats_from(std::span<const std::size_t> lengths, ScaleMode mode) {
  if (lengths.size() < 2) throw degenerate_error("length statistics need at least 2 sentences");
  auto [mn, mx] = std::minmax_element(lengths.begin(), lengths.end());
  if (*mn == *mx) {
    throw degenerate_error("all sentences have length " + std::to_string(*mn) +
                           "; length scale is zero");
  }
  // Integer moments keep the result independent of sentence order.
  unsigned __int128 sum = 0;
  unsigned __int128 sum_sq = 0;
  for (auto len : lengths) {
    sum += len;
    sum_sq += static_cast<unsigned __int128>(len) * len;
  }
  const auto n = static_cast<unsigned __int128>(lengths.size());
  const long double nd = static_cast<long double>(lengths.size());
  unsigned __int128 spread = n * sum_sq - sum * sum;  // n^2 * variance
  LengthStats ls;
  ls.mean = static_cast<double>(static_cast<long double>(sum) / nd);
  const double var = static_cast<double>(static_cast<long double>(spread) / (nd * nd));
  ls.scale = mode == ScaleMode::stddev ? std::sqrt(var) : var;
  ls.min_len = *mn;
  ls.max_len = *mx;
  return ls;
}

LengthStats compute_length_stats(const Corpus& corpus, ScaleMode mode) {
  std::vector<std::size_t> lengths;
  lengths.reserve(corpus.sentence_count());
  for (const auto& img : corpus.images())
    for (const auto& c : img.comments)
      for (const auto& s : c.sentences) lengths.push_back(s.length());
  return length_stats_from(lengths, mode);
}

double length_score(std::size_t length, const LengthStats& ls) {
  const double x = static_cast<double>(std::clamp(length, ls.min_len, ls.max_len));
  const double lo = sigmoid(static_cast<double>(ls.min_len), ls.mean, ls.scale);
  const double hi = sigmoid(static_cast<double>(ls.max_len), ls.mean, ls.scale);
  if (!(hi > lo)) throw degenerate_error("length range is empty");
  return (sigmoid(x, ls.mean, ls.scale) - lo) / (hi - lo);
}

DocumentTerms document_terms(const ImageRecord& image) {
  DocumentTerms d;
  for (const auto& c : image.comments) {
    for (const auto& s : c.sentences) {
      for (const auto& tok : s.tokens) ++d.counts[tok];
      d.total += s.length();
    }
  }
  return d;
}

DocumentIndex build_document_index(const Corpus& corpus) {
  const auto& images = corpus.images();
  std::vector<DocumentTerms> docs(images.size());
  const auto n = static_cast<std::ptrdiff_t>(images.size());
#pragma omp parallel for schedule(dynamic, 16) num_threads(worker_count())
  for (std::ptrdiff_t i = 0; i < n; ++i) docs[i] = document_terms(images[i]);
  return DocumentIndex(std::move(docs));
}

DocumentIndex build_document_index_serial(const Corpus& corpus) {
  std::vector<DocumentTerms> docs;
  docs.reserve(corpus.size());
  for (const auto& img : corpus.images()) docs.push_back(document_terms(img));
  return DocumentIndex(std::move(docs));
}

namespace {

double log_in(LogBase base, double x) {
  switch (base) {
    case LogBase::e: return std::log(x);
    case LogBase::ten: return std::log10(x);
    case LogBase::two: return std::log2(x);
  }
  return std::log(x);
}

void push_tau_values(const DocumentTerms& doc, const TfIdfModel& model, TauPopulation pop,
                     std::vector<double>& out) {
  for (const auto& [term, n] : doc.counts) {
    double tau = model.tau(term, n, doc.total);
    if (pop == TauPopulation::pairs) {
      out.push_back(tau);
    } else {
      out.insert(out.end(), n, tau);
    }
  }
}

void finish_tau_stats(TfIdfModel& model, std::vector<double>& values, const StatsConfig& config) {
  if (values.empty()) throw degenerate_error("corpus contains no terms");
  std::sort(values.begin(), values.end());
  auto m = population_moments(values, config.scale);
  model.tau_mean = m.mean;
  model.tau_scale = m.scale;
  model.tau_min = values.front();
  model.tau_max = values.back();
}

}  // namespace

double TfIdfModel::idf_for(std::size_t term_doc_freq) const {
  return log_in(log_base, (1.0 + static_cast<double>(doc_count)) /
                              (1.0 + static_cast<double>(term_doc_freq))) +
         1.0;
}

double TfIdfModel::idf(std::string_view term) const {
  auto it = doc_freq.find(std::string(term));
  return idf_for(it == doc_freq.end() ? 0 : it->second);
}

double TfIdfModel::tau(std::string_view term, std::size_t n_tm, std::size_t n_total) const {
  if (n_total == 0 || n_tm == 0) return 0.0;
  return static_cast<double>(n_tm) / static_cast<double>(n_total) * idf(term);
}

TfIdfModel build_tfidf(const Corpus& corpus, const DocumentIndex& index, const StatsConfig& config) {
  if (corpus.empty()) throw input_error("cannot build tf-idf on an empty corpus");
  TfIdfModel model;
  model.doc_count = corpus.size();
  model.log_base = config.log_base;

  const auto& docs = index.docs();
  const auto n = static_cast<std::ptrdiff_t>(docs.size());
  const int threads = worker_count();

  // Document frequencies: per-thread partial maps, merged in thread order.
  // Counts are integers so the merge order does not affect the result.
  std::vector<std::unordered_map<std::string, std::size_t>> partial(threads);
#pragma omp parallel num_threads(threads)
  {
    auto& local = partial[omp_get_thread_num()];
#pragma omp for schedule(dynamic, 16)
    for (std::ptrdiff_t i = 0; i < n; ++i)
      for (const auto& [term, cnt] : docs[i].counts) ++local[term];
  }
  for (auto& p : partial)
    for (auto& [term, df] : p) model.doc_freq[term] += df;

  std::vector<std::vector<double>> per_doc(docs.size());
#pragma omp parallel for schedule(dynamic, 16) num_threads(threads)
  for (std::ptrdiff_t i = 0; i < n; ++i)
    push_tau_values(docs[i], model, config.tau_population, per_doc[i]);

  std::vector<double> values;
  for (auto& v : per_doc) values.insert(values.end(), v.begin(), v.end());
  finish_tau_stats(model, values, config);
  return model;
}

TfIdfModel build_tfidf(const Corpus& corpus, const StatsConfig& config) {
  if (corpus.empty()) throw input_error("cannot build tf-idf on an empty corpus");
  return build_tfidf(corpus, build_document_index(corpus), config);
}

TfIdfModel build_tfidf_serial(const Corpus& corpus, const StatsConfig& config) {
  if (corpus.empty()) throw input_error("cannot build tf-idf on an empty corpus");
  TfIdfModel model;
  model.doc_count = corpus.size();
  model.log_base = config.log_base;
  auto index = build_document_index_serial(corpus);
  for (const auto& d : index.docs())
    for (const auto& [term, cnt] : d.counts) ++model.doc_freq[term];
  std::vector<double> values;
  for (const auto& d : index.docs()) push_tau_values(d, model, config.tau_population, values);
  finish_tau_stats(model, values, config);
  return model;
}

double tfidf_norm(double tau, const TfIdfModel& model) {
  if (!(model.tau_max > model.tau_min)) {
    throw degenerate_error("tau_min == tau_max; tf-idf normalization undefined");
  }
  const double x = std::clamp(tau, model.tau_min, model.tau_max);
  const double lo = sigmoid(model.tau_min, model.tau_mean, model.tau_scale);
  const double hi = sigmoid(model.tau_max, model.tau_mean, model.tau_scale);
  return (sigmoid(x, model.tau_mean, model.tau_scale) - lo) / (hi - lo);
}

double tfidf_score(const Sentence& t, const DocumentTerms& doc, const TfIdfModel& model) {
  double sum = 0.0;
  for (const auto& tok : t.tokens) {
    auto it = doc.counts.find(tok);
    const double tau = it == doc.counts.end() ? 0.0 : model.tau(tok, it->second, doc.total);
    sum += tfidf_norm(tau, model);
  }
  return sum;
}

double tfidf_score(const Sentence& t, std::string_view doc_id, const TfIdfModel& model,
                   const Corpus& corpus) {
  auto idx = corpus.find(doc_id);
  if (!idx) throw input_error("unknown document id '" + std::string(doc_id) + "'");
  return tfidf_score(t, document_terms(corpus.images()[*idx]), model);
}

double tfidf_score_standalone(const Sentence& t, const TfIdfModel& model) {
  DocumentTerms self;
  for (const auto& tok : t.tokens) ++self.counts[tok];
  self.total = t.length();
  return tfidf_score(t, self, model);
}

std::string corpus_hash(const Corpus& corpus) { return io::sha256_hex(serialize_corpus(corpus)); }

FrozenStats compute_frozen_stats(const Corpus& corpus, const StatsConfig& config) {
  if (corpus.empty()) throw input_error("cannot compute statistics of an empty corpus");
  FrozenStats fs;
  fs.config = config;
  fs.length = compute_length_stats(corpus, config.scale);
  fs.tfidf = build_tfidf(corpus, config);
  if (!(fs.tfidf.tau_max > fs.tfidf.tau_min) || !(fs.tfidf.tau_scale > 0.0)) {
    throw degenerate_error("all tf-idf values are equal; normalization undefined");
  }
  fs.corpus_hash = corpus_hash(corpus);
  return fs;
}

namespace {

constexpr std::string_view kStatsFormat = "ars-frozen-stats/1";

template <typename T>
T field(const nlohmann::json& j, const char* key) {
  auto it = j.find(key);
  if (it == j.end()) throw input_error(std::string("stats: missing field '") + key + "'");
  try {
    return it->get<T>();
  } catch (const nlohmann::json::exception&) {
    throw input_error(std::string("stats: bad type for '") + key + "'");
  }
}

std::optional<double> optional_number(const nlohmann::json& j, const char* key) {
  auto it = j.find(key);
  if (it == j.end() || it->is_null()) return std::nullopt;
  if (!it->is_number()) throw input_error(std::string("stats: '") + key + "' must be a number");
  return it->get<double>();
}

}  // namespace

FrozenStats stats_from_json_unchecked(std::string_view text);

std::string stats_to_json(const FrozenStats& s) {
  using nlohmann::json;
  json j;
  j["format"] = kStatsFormat;
  j["corpus_hash"] = s.corpus_hash;
  j["config"] = {{"scale", to_string(s.config.scale)},
                 {"log_base", to_string(s.config.log_base)},
                 {"tau_population", to_string(s.config.tau_population)}};
  j["length"] = {{"mean", s.length.mean},
                 {"scale", s.length.scale},
                 {"min_len", s.length.min_len},
                 {"max_len", s.length.max_len}};
  json df = json::object();
  for (const auto& [term, count] : s.tfidf.doc_freq) df[term] = count;
  j["tfidf"] = {{"doc_count", s.tfidf.doc_count}, {"tau_mean", s.tfidf.tau_mean},
                {"tau_scale", s.tfidf.tau_scale}, {"tau_min", s.tfidf.tau_min},
                {"tau_max", s.tfidf.tau_max},     {"doc_freq", std::move(df)}};
  j["ars_mean"] = s.ars_mean ? json(*s.ars_mean) : json(nullptr);
  j["ars_scale"] = s.ars_scale ? json(*s.ars_scale) : json(nullptr);
  return j.dump(2) + "\n";
}

FrozenStats stats_from_json_unchecked(std::string_view text) {
  using nlohmann::json;
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    throw input_error(std::string("stats: malformed JSON: ") + e.what());
  }
  if (!j.is_object() || field<std::string>(j, "format") != kStatsFormat) {
    throw input_error("stats: unsupported format");
  }
  FrozenStats s;
  s.corpus_hash = field<std::string>(j, "corpus_hash");
  const auto& cfg = j.at("config");
  s.config.scale = parse_scale_mode(field<std::string>(cfg, "scale"));
  s.config.log_base = parse_log_base(field<std::string>(cfg, "log_base"));
  s.config.tau_population = parse_tau_population(field<std::string>(cfg, "tau_population"));
  const auto& len = j.at("length");
  s.length.mean = field<double>(len, "mean");
  s.length.scale = field<double>(len, "scale");
  s.length.min_len = field<std::size_t>(len, "min_len");
  s.length.max_len = field<std::size_t>(len, "max_len");
  if (s.length.min_len > s.length.max_len || !(s.length.scale > 0.0)) {
    throw input_error("stats: invalid length statistics");
  }
  const auto& tf = j.at("tfidf");
  s.tfidf.doc_count = field<std::size_t>(tf, "doc_count");
  s.tfidf.tau_mean = field<double>(tf, "tau_mean");
  s.tfidf.tau_scale = field<double>(tf, "tau_scale");
  s.tfidf.tau_min = field<double>(tf, "tau_min");
  s.tfidf.tau_max = field<double>(tf, "tau_max");
  s.tfidf.log_base = s.config.log_base;
  for (const auto& [term, count] : tf.at("doc_freq").items()) {
    auto c = count.get<std::size_t>();
    if (c < 1 || c > s.tfidf.doc_count) {
      throw input_error("stats: doc_freq of '" + term + "' outside [1, doc_count]");
    }
    s.tfidf.doc_freq.emplace(term, c);
  }
  if (!(s.tfidf.tau_min <= s.tfidf.tau_mean && s.tfidf.tau_mean <= s.tfidf.tau_max)) {
    throw input_error("stats: tau_mean outside [tau_min, tau_max]");
  }
  s.ars_mean = optional_number(j, "ars_mean");
  s.ars_scale = optional_number(j, "ars_scale");
  return s;
}

FrozenStats stats_from_json(std::string_view text) {
  try {
    return stats_from_json_unchecked(text);
  } catch (const nlohmann::json::exception& e) {
    throw input_error(std::string("stats: ") + e.what());
  }
}

void save_stats(const FrozenStats& stats, const std::filesystem::path& path) {
  io::write_file(path, stats_to_json(stats));
}

FrozenStats load_stats(const std::filesystem::path& path) {
  return stats_from_json(io::read_file(path));
}

void check_corpus_hash(const FrozenStats& stats, const Corpus& corpus, bool force) {
  if (force) return;
  auto h = corpus_hash(corpus);
  if (h != stats.corpus_hash) {
    throw input_error("stats were computed on a different corpus (hash " + stats.corpus_hash +
                      ", corpus " + h + "); pass --force to override");
  }
}

}  // namespace ars
