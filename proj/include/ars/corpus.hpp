#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace ars {

/// One cleaned sentence. `tokens` are lowercase, non-empty, whitespace-free.
struct Sentence {
  std::string raw_text;
  std::vector<std::string> tokens;

  std::size_t length() const noexcept { return tokens.size(); }

  friend bool operator==(const Sentence&, const Sentence&) = default;
};

struct Comment {
  std::string comment_id;
  std::vector<Sentence> sentences;

  friend bool operator==(const Comment&, const Comment&) = default;
};

struct ImageRecord {
  std::string image_id;
  std::vector<Comment> comments;
  std::optional<double> aesthetic_score;  // [1, 10] when present

  friend bool operator==(const ImageRecord&, const ImageRecord&) = default;
};

struct IngestStats {
  std::size_t images = 0;
  std::size_t comments = 0;
  std::size_t sentences = 0;
  std::size_t dropped_comments = 0;   // no sentence survived cleaning
  std::size_t dropped_fragments = 0;  // sentence fragments with no tokens
};

class Corpus {
 public:
  Corpus() = default;

  /// Validates ids and score ranges; throws ars::Error(input) on violation.
  explicit Corpus(std::vector<ImageRecord> images, IngestStats stats = {});

  const std::vector<ImageRecord>& images() const noexcept { return images_; }
  const IngestStats& ingest_stats() const noexcept { return stats_; }
  bool empty() const noexcept { return images_.empty(); }
  std::size_t size() const noexcept { return images_.size(); }

  /// Index of an image, or nullopt when the id is unknown.
  std::optional<std::size_t> find(std::string_view image_id) const;

  std::size_t sentence_count() const noexcept;

  friend bool operator==(const Corpus& a, const Corpus& b) { return a.images_ == b.images_; }

 private:
  std::vector<ImageRecord> images_;
  std::unordered_map<std::string, std::size_t> index_;
  IngestStats stats_;
};

/// Position of a sentence inside a corpus plus a pointer to it. Valid while
/// the corpus is alive.
struct SentenceRef {
  std::size_t image_index = 0;
  const std::string* image_id = nullptr;
  const std::string* comment_id = nullptr;
  std::size_t sentence_index = 0;  // within the comment
  const Sentence* sentence = nullptr;
};

/// Canonical tokenizer: lowercase, whitespace split, strip leading and
/// trailing non-alphanumeric characters per token, drop empties. Returns
/// nullopt when no token survives. Bytes >= 0x80 count as word characters so
/// UTF-8 letters are kept intact; only ASCII is lowercased.
std::optional<Sentence> tokenize(std::string_view raw_text);

/// Same rule as tokenize(), tokens only.
std::vector<std::string> tokenize_words(std::string_view text);

/// Splits on '.', '!' and '?'. Fragments are whitespace-trimmed; empty ones
/// are discarded.
std::vector<std::string> split_sentences(std::string_view comment_text);

/// Parses JSONL: one image per line,
/// {"image_id": str, "aesthetic_score": number|null,
///  "comments": [{"comment_id": str, "text": str}]}.
/// Errors name the 1-based line number.
Corpus parse_corpus(std::string_view jsonl);
Corpus load_corpus(const std::filesystem::path& path);

/// Inverse of parse_corpus: each comment's text is its sentences joined with
/// ". " and a final ".".
std::string serialize_corpus(const Corpus& corpus);
void save_corpus(const Corpus& corpus, const std::filesystem::path& path);

/// All sentences in document order (image, comment, sentence).
std::vector<SentenceRef> iterate_sentences(const Corpus& corpus);

/// Tokens joined by single spaces; the form used for exact text matching.
std::string canonical_text(const Sentence& s);

}  // namespace ars
