#include "ars/providers.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdlib>

#include "ars/error.hpp"
#include "ars/io.hpp"
#include "ars/process_provider.hpp"

#ifndef ARS_DATA_DIR
#define ARS_DATA_DIR "data"
#endif

namespace ars {

void validate(const SentimentPair& p) {
  auto ok = [](double v) { return v >= 0.0 && v <= 1.0; };
  if (!ok(p.positive) || !ok(p.negative)) {
    throw input_error("sentiment components must lie in [0,1]");
  }
}

double sentiment_score(const SentimentPair& pair) { return (pair.positive + pair.negative) / 2.0; }

void validate(const Embedding& e) {
  if (e.values.empty()) throw input_error("embedding has no components");
  bool nonzero = false;
  for (double v : e.values) {
    if (!std::isfinite(v)) throw input_error("embedding has a non-finite component");
    nonzero = nonzero || v != 0.0;
  }
  if (!nonzero) throw input_error("embedding is the zero vector");
}

double cosine(const Embedding& a, const Embedding& b) {
  if (a.dim() != b.dim()) {
    throw domain_error("cosine of vectors with dims " + std::to_string(a.dim()) + " and " +
                       std::to_string(b.dim()));
  }
  double dot = 0.0;
  double na = 0.0;
  double nb = 0.0;
  for (std::size_t i = 0; i < a.dim(); ++i) {
    dot += a.values[i] * b.values[i];
    na += a.values[i] * a.values[i];
    nb += b.values[i] * b.values[i];
  }
  if (na == 0.0 || nb == 0.0) throw domain_error("cosine of a zero vector");
  double c = dot / (std::sqrt(na) * std::sqrt(nb));
  return std::clamp(c, -1.0, 1.0);
}

namespace {

nlohmann::json parse_row(std::string_view line, std::size_t line_no, const std::string& origin) {
  try {
    auto j = nlohmann::json::parse(line);
    if (!j.is_object()) throw input_error(origin + ": line " + std::to_string(line_no) + ": expected an object");
    if (!j.contains("text") || !j["text"].is_string()) {
      throw input_error(origin + ": line " + std::to_string(line_no) + ": missing string 'text'");
    }
    return j;
  } catch (const nlohmann::json::parse_error& e) {
    throw input_error(origin + ": line " + std::to_string(line_no) + ": " + e.what());
  }
}

double number_field(const nlohmann::json& j, const char* key, std::size_t line_no,
                    const std::string& origin) {
  auto it = j.find(key);
  if (it == j.end() || !it->is_number()) {
    throw input_error(origin + ": line " + std::to_string(line_no) + ": '" + key +
                      "' must be a number");
  }
  return it->get<double>();
}

std::uint64_t fnv1a(std::string_view s) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

}  // namespace

TableSentimentProvider::TableSentimentProvider(std::unordered_map<std::string, SentimentPair> table,
                                               std::string origin)
    : table_(std::move(table)), origin_(std::move(origin)) {
  for (const auto& [k, v] : table_) validate(v);
}

TableSentimentProvider TableSentimentProvider::parse(std::string_view jsonl, std::string origin) {
  std::unordered_map<std::string, SentimentPair> table;
  io::for_each_line(jsonl, [&](std::size_t line_no, std::string_view line) {
    auto j = parse_row(line, line_no, origin);
    SentimentPair p{number_field(j, "positive", line_no, origin),
                    number_field(j, "negative", line_no, origin)};
    try {
      validate(p);
    } catch (const Error& e) {
      throw input_error(origin + ": line " + std::to_string(line_no) + ": " + e.what());
    }
    if (!table.emplace(j["text"].get<std::string>(), p).second) {
      throw input_error(origin + ": line " + std::to_string(line_no) + ": duplicate text key");
    }
  });
  return TableSentimentProvider(std::move(table), std::move(origin));
}

TableSentimentProvider TableSentimentProvider::load(const std::filesystem::path& path) {
  return parse(io::read_file(path), path.string());
}

SentimentPair TableSentimentProvider::sentiment(const Sentence& t) const {
  auto it = table_.find(t.raw_text);
  if (it == table_.end()) {
    throw provider_error("sentiment table " + origin_ + " has no entry for \"" + t.raw_text + "\"");
  }
  return it->second;
}

LexiconSentimentProvider::LexiconSentimentProvider(WordList positive, WordList negative)
    : positive_(std::move(positive)), negative_(std::move(negative)) {}

LexiconSentimentProvider LexiconSentimentProvider::load(const std::filesystem::path& positive,
                                                        const std::filesystem::path& negative) {
  return LexiconSentimentProvider(load_wordlist(positive, WordListKind::positive).list,
                                  load_wordlist(negative, WordListKind::negative).list);
}

SentimentPair LexiconSentimentProvider::sentiment(const Sentence& t) const {
  const double p = static_cast<double>(count_matches(t, positive_));
  const double n = static_cast<double>(count_matches(t, negative_));
  if (p == 0.0 && n == 0.0) return {0.0, 0.0};
  const double denom = p + n + 1.0;
  return {p / denom, n / denom};
}

TableEmbeddingProvider::TableEmbeddingProvider(std::unordered_map<std::string, Embedding> table,
                                               std::string origin)
    : table_(std::move(table)), origin_(std::move(origin)) {
  for (const auto& [k, v] : table_) {
    validate(v);
    if (dim_ == 0) dim_ = v.dim();
    if (v.dim() != dim_) throw input_error(origin_ + ": mixed embedding dimensions");
  }
}

TableEmbeddingProvider TableEmbeddingProvider::parse(std::string_view jsonl, std::string origin) {
  std::unordered_map<std::string, Embedding> table;
  std::size_t dim = 0;
  io::for_each_line(jsonl, [&](std::size_t line_no, std::string_view line) {
    auto j = parse_row(line, line_no, origin);
    const std::string where = origin + ": line " + std::to_string(line_no) + ": ";
    auto it = j.find("vector");
    if (it == j.end() || !it->is_array()) throw input_error(where + "'vector' must be an array");
    Embedding e;
    for (const auto& v : *it) {
      if (!v.is_number()) throw input_error(where + "vector entries must be numbers");
      e.values.push_back(v.get<double>());
    }
    try {
      validate(e);
    } catch (const Error& err) {
      throw input_error(where + err.what());
    }
    if (dim == 0) dim = e.dim();
    if (e.dim() != dim) {
      throw input_error(where + "dimension " + std::to_string(e.dim()) + " differs from " +
                        std::to_string(dim));
    }
    if (!table.emplace(j["text"].get<std::string>(), std::move(e)).second) {
      throw input_error(where + "duplicate text key");
    }
  });
  return TableEmbeddingProvider(std::move(table), std::move(origin));
}

TableEmbeddingProvider TableEmbeddingProvider::load(const std::filesystem::path& path) {
  return parse(io::read_file(path), path.string());
}

Embedding TableEmbeddingProvider::embed(std::string_view raw_text) const {
  auto it = table_.find(std::string(raw_text));
  if (it == table_.end()) {
    throw provider_error("embedding table " + origin_ + " has no entry for \"" +
                         std::string(raw_text) + "\"");
  }
  return it->second;
}

HashedEmbeddingProvider::HashedEmbeddingProvider(std::size_t dim) : dim_(dim) {
  if (dim_ == 0) throw domain_error("embedding dimension must be positive");
}

Embedding HashedEmbeddingProvider::embed(std::string_view raw_text) const {
  auto tokens = tokenize_words(raw_text);
  if (tokens.empty()) {
    throw provider_error("cannot embed text without tokens: \"" + std::string(raw_text) + "\"");
  }
  Embedding e;
  e.values.assign(dim_, 0.0);
  for (const auto& t : tokens) e.values[fnv1a(t) % dim_] += 1.0;
  double norm = 0.0;
  for (double v : e.values) norm += v * v;
  norm = std::sqrt(norm);
  for (double& v : e.values) v /= norm;
  return e;
}

std::filesystem::path default_data_dir() {
  if (const char* env = std::getenv("ARS_ENGINE_DATA"); env && *env) return env;
  return ARS_DATA_DIR;
}

namespace {

std::pair<std::string_view, std::string_view> split_spec(std::string_view spec) {
  auto colon = spec.find(':');
  if (colon == std::string_view::npos) return {spec, {}};
  return {spec.substr(0, colon), spec.substr(colon + 1)};
}

}  // namespace

std::shared_ptr<SentimentProvider> make_sentiment_provider(std::string_view spec) {
  auto [kind, arg] = split_spec(spec);
  if (kind == "lexicon") {
    if (arg.empty()) {
      auto dir = default_data_dir();
      return std::make_shared<LexiconSentimentProvider>(LexiconSentimentProvider::load(
          dir / "sentiment_positive.txt", dir / "sentiment_negative.txt"));
    }
    auto comma = arg.find(',');
    if (comma == std::string_view::npos) {
      throw input_error("lexicon backend expects lexicon:POS_PATH,NEG_PATH");
    }
    return std::make_shared<LexiconSentimentProvider>(LexiconSentimentProvider::load(
        std::string(arg.substr(0, comma)), std::string(arg.substr(comma + 1))));
  }
  if (kind == "file" && !arg.empty()) {
    return std::make_shared<TableSentimentProvider>(TableSentimentProvider::load(std::string(arg)));
  }
  if (kind == "process" && !arg.empty()) {
    return std::make_shared<ProcessProvider>(std::string(arg));
  }
  throw input_error("unknown sentiment backend '" + std::string(spec) + "'");
}

std::shared_ptr<EmbeddingProvider> make_embedding_provider(std::string_view spec) {
  auto [kind, arg] = split_spec(spec);
  if (kind == "hash") {
    if (arg.empty()) return std::make_shared<HashedEmbeddingProvider>();
    std::size_t dim = 0;
    try {
      dim = std::stoul(std::string(arg));
    } catch (...) {
      throw input_error("hash backend expects hash:DIM");
    }
    return std::make_shared<HashedEmbeddingProvider>(dim);
  }
  if (kind == "file" && !arg.empty()) {
    return std::make_shared<TableEmbeddingProvider>(TableEmbeddingProvider::load(std::string(arg)));
  }
  if (kind == "process" && !arg.empty()) {
    return std::make_shared<ProcessProvider>(std::string(arg));
  }
  throw input_error("unknown embedding backend '" + std::string(spec) + "'");
}

}  // namespace ars
