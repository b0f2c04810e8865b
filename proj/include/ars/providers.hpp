#pragma once

#include <cstddef>
#include <filesystem>
#include <memory>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "ars/corpus.hpp"
#include "ars/lexicon.hpp"

namespace ars {

struct SentimentPair {
  double positive = 0.0;
  double negative = 0.0;

  friend bool operator==(const SentimentPair&, const SentimentPair&) = default;
};

/// Throws input error unless both components lie in [0, 1].
void validate(const SentimentPair& pair);

/// S(t) = (P_s + N_s) / 2.
double sentiment_score(const SentimentPair& pair);

struct Embedding {
  std::vector<double> values;

  std::size_t dim() const noexcept { return values.size(); }
  friend bool operator==(const Embedding&, const Embedding&) = default;
};

/// Throws input error when the vector is empty, all zero or non-finite.
void validate(const Embedding& e);

/// dot(a, b) / (|a| |b|). Throws domain error on dimension mismatch or a
/// zero vector.
double cosine(const Embedding& a, const Embedding& b);

class SentimentProvider {
 public:
  virtual ~SentimentProvider() = default;
  /// Keyed by the raw text; lexicon backends use the tokens.
  virtual SentimentPair sentiment(const Sentence& t) const = 0;
  virtual std::string describe() const = 0;
};

class EmbeddingProvider {
 public:
  virtual ~EmbeddingProvider() = default;
  virtual Embedding embed(std::string_view raw_text) const = 0;
  virtual std::string describe() const = 0;
};

/// JSONL {"text": str, "positive": num, "negative": num}. Misses throw.
class TableSentimentProvider final : public SentimentProvider {
 public:
  explicit TableSentimentProvider(std::unordered_map<std::string, SentimentPair> table,
                                  std::string origin = "<memory>");
  static TableSentimentProvider parse(std::string_view jsonl, std::string origin = "<memory>");
  static TableSentimentProvider load(const std::filesystem::path& path);

  SentimentPair sentiment(const Sentence& t) const override;
  std::string describe() const override { return "file:" + origin_; }
  std::size_t size() const noexcept { return table_.size(); }

 private:
  std::unordered_map<std::string, SentimentPair> table_;
  std::string origin_;
};

/// Counts positive and negative word hits p and n and returns
/// (p / (p + n + 1), n / (p + n + 1)). A self-contained stand-in for a real
/// sentiment model, not a reproduction of one.
class LexiconSentimentProvider final : public SentimentProvider {
 public:
  LexiconSentimentProvider(WordList positive, WordList negative);
  static LexiconSentimentProvider load(const std::filesystem::path& positive,
                                       const std::filesystem::path& negative);

  SentimentPair sentiment(const Sentence& t) const override;
  std::string describe() const override { return "lexicon"; }

 private:
  WordList positive_;
  WordList negative_;
};

/// JSONL {"text": str, "vector": [num, ...]}; one dimension per table.
class TableEmbeddingProvider final : public EmbeddingProvider {
 public:
  explicit TableEmbeddingProvider(std::unordered_map<std::string, Embedding> table,
                                  std::string origin = "<memory>");
  static TableEmbeddingProvider parse(std::string_view jsonl, std::string origin = "<memory>");
  static TableEmbeddingProvider load(const std::filesystem::path& path);

  Embedding embed(std::string_view raw_text) const override;
  std::string describe() const override { return "file:" + origin_; }
  std::size_t dim() const noexcept { return dim_; }

 private:
  std::unordered_map<std::string, Embedding> table_;
  std::string origin_;
  std::size_t dim_ = 0;
};

/// L2-normalized bag of tokens hashed (FNV-1a) into `dim` buckets.
class HashedEmbeddingProvider final : public EmbeddingProvider {
 public:
  explicit HashedEmbeddingProvider(std::size_t dim = 256);

  Embedding embed(std::string_view raw_text) const override;
  std::string describe() const override { return "hash:" + std::to_string(dim_); }
  std::size_t dim() const noexcept { return dim_; }

 private:
  std::size_t dim_;
};

/// Directory holding the bundled word lists; ARS_ENGINE_DATA overrides the
/// build-time default.
std::filesystem::path default_data_dir();

/// Backend specs accepted on the command line:
///   sentiment: lexicon | lexicon:POS_PATH,NEG_PATH | file:PATH | process:CMD
///   embedding: hash | hash:DIM | file:PATH | process:CMD
std::shared_ptr<SentimentProvider> make_sentiment_provider(std::string_view spec);
std::shared_ptr<EmbeddingProvider> make_embedding_provider(std::string_view spec);

}  // namespace ars
