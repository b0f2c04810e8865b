#include "ars/lexicon.hpp"

#include "ars/error.hpp"
#include "ars/io.hpp"

namespace ars {

std::string_view to_string(WordListKind kind) {
  switch (kind) {
    case WordListKind::aesthetic: return "aesthetic";
    case WordListKind::object: return "object";
    case WordListKind::positive: return "positive";
    case WordListKind::negative: return "negative";
  }
  return "unknown";
}

WordListLoad parse_wordlist(std::string_view text, WordListKind kind) {
  WordListLoad out;
  std::unordered_set<std::string> words;
  io::for_each_line(text, [&](std::size_t line_no, std::string_view line) {
    auto first = line.find_first_not_of(" \t");
    if (line[first] == '#') return;
    auto tokens = tokenize_words(line);
    if (tokens.size() != 1) {
      ++out.dropped;
      out.warnings.push_back("line " + std::to_string(line_no) + ": entry '" +
                             std::string(line) + "' normalizes to " +
                             std::to_string(tokens.size()) + " tokens, dropped");
      return;
    }
    if (!words.insert(std::move(tokens.front())).second) ++out.duplicates;
  });

  std::size_t expected = kind == WordListKind::aesthetic ? kAestheticListSize
                         : kind == WordListKind::object  ? kObjectListSize
                                                         : 0;
  if (words.empty()) {
    out.warnings.push_back(std::string(to_string(kind)) + " word list is empty");
  } else if (expected != 0 && words.size() != expected) {
    out.warnings.push_back(std::string(to_string(kind)) + " word list has " +
                           std::to_string(words.size()) + " entries, expected " +
                           std::to_string(expected));
  }
  out.list = WordList(kind, std::move(words));
  return out;
}

WordListLoad load_wordlist(const std::filesystem::path& path, WordListKind kind) {
  return parse_wordlist(io::read_file(path), kind);
}

std::size_t count_matches(const Sentence& t, const WordList& list) {
  std::size_t n = 0;
  for (const auto& tok : t.tokens) n += list.contains(tok) ? 1 : 0;
  return n;
}

std::size_t aesthetic_count(const Sentence& t, const WordList& aw) {
  if (aw.kind() != WordListKind::aesthetic) throw domain_error("aesthetic_count needs an aesthetic list");
  return count_matches(t, aw);
}

std::size_t object_count(const Sentence& t, const WordList& ow) {
  if (ow.kind() != WordListKind::object) throw domain_error("object_count needs an object list");
  return count_matches(t, ow);
}

}  // namespace ars
