#include "ars/loss.hpp"

#include <json.hpp>

#include <cmath>
#include <map>

#include "ars/error.hpp"
#include "ars/io.hpp"
#include "ars/parallel.hpp"

namespace ars {

namespace {

void check_batch(std::span<const SentenceLossInput> batch) {
  if (batch.empty()) throw input_error("loss batch is empty");
  for (std::size_t k = 0; k < batch.size(); ++k) {
    const auto& in = batch[k];
    if (std::isnan(in.weight)) throw input_error("sentence " + std::to_string(k) + ": NaN weight");
    if (in.token_log_probs.empty()) {
      throw input_error("sentence " + std::to_string(k) + ": no token log-probs");
    }
    for (double lp : in.token_log_probs) {
      if (std::isnan(lp)) throw input_error("sentence " + std::to_string(k) + ": NaN log-prob");
      if (lp > 0.0) throw input_error("sentence " + std::to_string(k) + ": positive log-prob");
    }
  }
}

BatchLoss reduce(std::span<const SentenceLossInput> batch, bool use_weights) {
  check_batch(batch);
  BatchLoss out;
  out.sentence_count = batch.size();
  out.per_sentence.reserve(batch.size());
  for (const auto& in : batch) {
    const double nll = -compensated_sum(in.token_log_probs);
    // A zero weight contributes exactly zero, even against infinite NLL.
    double v = 0.0;
    if (!use_weights) {
      v = nll;
    } else if (in.weight != 0.0) {
      v = in.weight * nll;
    }
    out.per_sentence.push_back(v);
  }
  out.total = compensated_sum(out.per_sentence);
  return out;
}

}  // namespace

BatchLoss weighted_ce(std::span<const SentenceLossInput> batch) { return reduce(batch, true); }

BatchLoss cross_entropy(std::span<const SentenceLossInput> batch) { return reduce(batch, false); }

std::vector<LogProbRow> parse_logprobs(std::string_view jsonl) {
  std::vector<LogProbRow> rows;
  io::for_each_line(jsonl, [&](std::size_t line_no, std::string_view line) {
    const std::string at = "logprobs line " + std::to_string(line_no) + ": ";
    try {
      auto j = nlohmann::json::parse(line);
      LogProbRow r;
      r.key.image_id = j.at("image_id").get<std::string>();
      r.key.comment_id = j.at("comment_id").get<std::string>();
      r.key.sentence_index = j.at("sentence_index").get<std::size_t>();
      for (const auto& v : j.at("log_probs")) {
        if (!v.is_number()) throw input_error(at + "log_probs must be numbers");
        r.log_probs.push_back(v.get<double>());
      }
      rows.push_back(std::move(r));
    } catch (const nlohmann::json::exception& e) {
      throw input_error(at + e.what());
    }
  });
  return rows;
}

std::vector<LogProbRow> load_logprobs(const std::filesystem::path& path) {
  return parse_logprobs(io::read_file(path));
}

std::vector<SentenceLossInput> attach_weights(std::span<const LabelledSentence> labels,
                                              std::span<const LogProbRow> rows) {
  std::map<SentenceKey, double> weight;
  for (const auto& l : labels) {
    SentenceKey k{l.image_id, l.comment_id, l.sentence_index};
    if (!weight.emplace(std::move(k), l.breakdown.total).second) {
      throw input_error("duplicate label for image " + l.image_id + ", comment " + l.comment_id +
                        ", sentence " + std::to_string(l.sentence_index));
    }
  }
  std::vector<SentenceLossInput> out;
  out.reserve(rows.size());
  for (const auto& r : rows) {
    auto it = weight.find(r.key);
    if (it == weight.end()) {
      throw input_error("no label for image " + r.key.image_id + ", comment " + r.key.comment_id +
                        ", sentence " + std::to_string(r.key.sentence_index));
    }
    out.push_back({it->second, r.log_probs});
  }
  return out;
}

std::string weights_to_jsonl(std::span<const LogProbRow> rows,
                             std::span<const SentenceLossInput> inputs) {
  std::string out;
  for (std::size_t i = 0; i < rows.size() && i < inputs.size(); ++i) {
    nlohmann::ordered_json key;
    key["image_id"] = rows[i].key.image_id;
    key["comment_id"] = rows[i].key.comment_id;
    key["sentence_index"] = rows[i].key.sentence_index;
    nlohmann::ordered_json row;
    row["key"] = std::move(key);
    row["weight"] = inputs[i].weight;
    out += row.dump();
    out += '\n';
  }
  return out;
}

}  // namespace ars
