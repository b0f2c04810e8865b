#pragma once

#include <chrono>
#include <condition_variable>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <vector>

#include "ars/providers.hpp"

namespace ars {

/// Line-delimited JSON over a child's stdin/stdout.
///
///   child -> {"proto":1,"dim":int|null}            once, on start
///   engine -> {"op":"sentiment","text":str}
///   child -> {"positive":num,"negative":num}
///   engine -> {"op":"embed","text":str}
///   child -> {"vector":[num,...]}
///
/// One request is in flight per child. With several workers, callers block
/// until one is free. Timeouts, early exits and non-conforming replies throw
/// provider errors.
class ProcessProvider final : public SentimentProvider, public EmbeddingProvider {
 public:
  struct Options {
    std::size_t workers = 1;
    std::chrono::milliseconds timeout{10000};
  };

  /// `command` runs through /bin/sh -c.
  explicit ProcessProvider(std::string command);
  ProcessProvider(std::string command, Options options);
  ~ProcessProvider() override;

  ProcessProvider(const ProcessProvider&) = delete;
  ProcessProvider& operator=(const ProcessProvider&) = delete;

  SentimentPair sentiment(const Sentence& t) const override;
  Embedding embed(std::string_view raw_text) const override;
  std::string describe() const override { return "process:" + command_; }

  /// Dimension announced in the handshake, or fixed by the first vector.
  std::optional<std::size_t> dim() const;

 private:
  struct Worker;

  std::string request(const std::string& line) const;

  std::string command_;
  Options options_;
  std::vector<std::unique_ptr<Worker>> workers_;
  mutable std::mutex mu_;
  mutable std::condition_variable free_cv_;
  mutable std::vector<Worker*> free_;
  mutable std::optional<std::size_t> dim_;
};

}  // namespace ars
