#pragma once

#include <cstddef>
#include <filesystem>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

#include "ars/corpus.hpp"

namespace ars {

enum class WordListKind { aesthetic, object, positive, negative };

std::string_view to_string(WordListKind kind);

/// Published list sizes; a mismatch only produces a warning.
inline constexpr std::size_t kAestheticListSize = 1022;
inline constexpr std::size_t kObjectListSize = 2146;

class WordList {
 public:
  WordList() = default;
  WordList(WordListKind kind, std::unordered_set<std::string> words)
      : kind_(kind), words_(std::move(words)) {}

  WordListKind kind() const noexcept { return kind_; }
  std::size_t size() const noexcept { return words_.size(); }
  bool contains(std::string_view token) const { return words_.count(std::string(token)) != 0; }
  const std::unordered_set<std::string>& words() const noexcept { return words_; }

 private:
  WordListKind kind_ = WordListKind::aesthetic;
  std::unordered_set<std::string> words_;
};

struct WordListLoad {
  WordList list;
  std::size_t duplicates = 0;
  std::size_t dropped = 0;  // entries that normalized to nothing or to several tokens
  std::vector<std::string> warnings;
};

/// One entry per line, '#' lines ignored. Each entry goes through the
/// canonical tokenizer and must yield exactly one token.
WordListLoad parse_wordlist(std::string_view text, WordListKind kind);
WordListLoad load_wordlist(const std::filesystem::path& path, WordListKind kind);

/// Number of token occurrences in the list. Repeats count repeatedly.
std::size_t count_matches(const Sentence& t, const WordList& list);

/// A(t). Throws domain error if `aw` is not an aesthetic list.
std::size_t aesthetic_count(const Sentence& t, const WordList& aw);

/// O(t). Throws domain error if `ow` is not an object list.
std::size_t object_count(const Sentence& t, const WordList& ow);

}  // namespace ars
