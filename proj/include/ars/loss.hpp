#pragma once

#include <cstddef>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "ars/ars.hpp"

namespace ars {

/// (image_id, comment_id, sentence_index): identifies a training sentence.
struct SentenceKey {
  std::string image_id;
  std::string comment_id;
  std::size_t sentence_index = 0;

  friend bool operator==(const SentenceKey&, const SentenceKey&) = default;
  friend auto operator<=>(const SentenceKey&, const SentenceKey&) = default;
};

struct SentenceLossInput {
  double weight = 1.0;                 // ARS of the target sentence
  std::vector<double> token_log_probs; // log p(y_i = y_i* | theta), all <= 0
};

struct BatchLoss {
  double total = 0.0;
  std::vector<double> per_sentence;
  std::size_t sentence_count = 0;
};

/// -sum_k weight_k * sum_i log_prob[k][i], no normalization. Throws input
/// error on an empty batch or sentence, a positive log-prob, or a NaN.
BatchLoss weighted_ce(std::span<const SentenceLossInput> batch);

/// Plain cross-entropy, weights ignored.
BatchLoss cross_entropy(std::span<const SentenceLossInput> batch);

struct LogProbRow {
  SentenceKey key;
  std::vector<double> log_probs;
};

/// JSONL {"image_id","comment_id","sentence_index","log_probs":[..]}.
std::vector<LogProbRow> parse_logprobs(std::string_view jsonl);
std::vector<LogProbRow> load_logprobs(const std::filesystem::path& path);

/// Joins rows to labels by key; weight = label ARS. Order follows `rows`.
/// Throws input error naming the first row without a label.
std::vector<SentenceLossInput> attach_weights(std::span<const LabelledSentence> labels,
                                              std::span<const LogProbRow> rows);

/// JSONL {"key":{"image_id","comment_id","sentence_index"},"weight":..}.
std::string weights_to_jsonl(std::span<const LogProbRow> rows,
                             std::span<const SentenceLossInput> inputs);

}  // namespace ars
