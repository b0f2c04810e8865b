#include "ars/corpus.hpp"

#include <json.hpp>

#include <cmath>

#include "ars/error.hpp"
#include "ars/io.hpp"

namespace ars {

namespace {

bool is_word_byte(unsigned char c) {
  return (c >= '0' && c <= '9') || (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') ||
         c >= 0x80;
}

bool is_space(unsigned char c) {
  return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\f' || c == '\v';
}

std::string_view trim(std::string_view s) {
  std::size_t b = 0;
  std::size_t e = s.size();
  while (b < e && is_space(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && is_space(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

std::string line_prefix(std::size_t line_no) { return "line " + std::to_string(line_no) + ": "; }

}  // namespace

std::vector<std::string> tokenize_words(std::string_view text) {
  std::vector<std::string> tokens;
  std::size_t i = 0;
  while (i < text.size()) {
    while (i < text.size() && is_space(static_cast<unsigned char>(text[i]))) ++i;
    std::size_t start = i;
    while (i < text.size() && !is_space(static_cast<unsigned char>(text[i]))) ++i;
    std::string_view word = text.substr(start, i - start);
    std::size_t b = 0;
    std::size_t e = word.size();
    while (b < e && !is_word_byte(static_cast<unsigned char>(word[b]))) ++b;
    while (e > b && !is_word_byte(static_cast<unsigned char>(word[e - 1]))) --e;
    if (b == e) continue;
    std::string tok(word.substr(b, e - b));
    for (char& c : tok) {
      if (c >= 'A' && c <= 'Z') c = static_cast<char>(c - 'A' + 'a');
    }
    tokens.push_back(std::move(tok));
  }
  return tokens;
}

std::optional<Sentence> tokenize(std::string_view raw_text) {
  auto tokens = tokenize_words(raw_text);
  if (tokens.empty()) return std::nullopt;
  return Sentence{std::string(raw_text), std::move(tokens)};
}

std::vector<std::string> split_sentences(std::string_view comment_text) {
  std::vector<std::string> out;
  std::size_t start = 0;
  for (std::size_t i = 0; i <= comment_text.size(); ++i) {
    if (i == comment_text.size() || comment_text[i] == '.' || comment_text[i] == '!' ||
        comment_text[i] == '?') {
      auto frag = trim(comment_text.substr(start, i - start));
      if (!frag.empty()) out.emplace_back(frag);
      start = i + 1;
    }
  }
  return out;
}

std::string canonical_text(const Sentence& s) {
  std::string out;
  for (const auto& t : s.tokens) {
    if (!out.empty()) out.push_back(' ');
    out += t;
  }
  return out;
}

Corpus::Corpus(std::vector<ImageRecord> images, IngestStats stats)
    : images_(std::move(images)), stats_(stats) {
  index_.reserve(images_.size());
  for (std::size_t i = 0; i < images_.size(); ++i) {
    const auto& img = images_[i];
    if (img.image_id.empty()) throw input_error("empty image_id");
    if (img.aesthetic_score &&
        (!std::isfinite(*img.aesthetic_score) || *img.aesthetic_score < 1.0 ||
         *img.aesthetic_score > 10.0)) {
      throw input_error("aesthetic_score out of range [1,10] for image " + img.image_id);
    }
    for (const auto& c : img.comments) {
      if (c.sentences.empty()) throw input_error("comment without sentences in " + img.image_id);
      for (const auto& s : c.sentences) {
        if (s.tokens.empty()) throw input_error("empty sentence in " + img.image_id);
      }
    }
    if (!index_.emplace(img.image_id, i).second) {
      throw input_error("duplicate image_id: " + img.image_id);
    }
  }
}

std::optional<std::size_t> Corpus::find(std::string_view image_id) const {
  auto it = index_.find(std::string(image_id));
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

std::size_t Corpus::sentence_count() const noexcept {
  std::size_t n = 0;
  for (const auto& img : images_)
    for (const auto& c : img.comments) n += c.sentences.size();
  return n;
}

Corpus parse_corpus(std::string_view jsonl) {
  using nlohmann::json;
  std::vector<ImageRecord> images;
  std::unordered_map<std::string, std::size_t> seen;
  IngestStats stats;

  io::for_each_line(jsonl, [&](std::size_t line_no, std::string_view line) {
    json row;
    try {
      row = json::parse(line);
    } catch (const json::parse_error& e) {
      throw input_error(line_prefix(line_no) + "malformed JSON: " + e.what());
    }
    if (!row.is_object()) throw input_error(line_prefix(line_no) + "expected a JSON object");

    auto id_it = row.find("image_id");
    if (id_it == row.end() || !id_it->is_string() || id_it->get<std::string>().empty()) {
      throw input_error(line_prefix(line_no) + "image_id must be a nonempty string");
    }
    ImageRecord img;
    img.image_id = id_it->get<std::string>();
    if (!seen.emplace(img.image_id, line_no).second) {
      throw input_error(line_prefix(line_no) + "duplicate image_id '" + img.image_id +
                        "' (first on line " + std::to_string(seen[img.image_id]) + ")");
    }

    if (auto sc = row.find("aesthetic_score"); sc != row.end() && !sc->is_null()) {
      if (!sc->is_number()) {
        throw input_error(line_prefix(line_no) + "aesthetic_score must be a number or null");
      }
      double v = sc->get<double>();
      if (!(v >= 1.0 && v <= 10.0)) {
        throw input_error(line_prefix(line_no) + "aesthetic_score " + sc->dump() +
                          " outside [1,10]");
      }
      img.aesthetic_score = v;
    }

    auto cm = row.find("comments");
    if (cm == row.end() || !cm->is_array()) {
      throw input_error(line_prefix(line_no) + "comments must be an array");
    }
    for (const auto& c : *cm) {
      if (!c.is_object() || !c.contains("comment_id") || !c["comment_id"].is_string() ||
          !c.contains("text") || !c["text"].is_string()) {
        throw input_error(line_prefix(line_no) +
                          "each comment needs string comment_id and text");
      }
      Comment comment;
      comment.comment_id = c["comment_id"].get<std::string>();
      for (const auto& frag : split_sentences(c["text"].get<std::string>())) {
        if (auto s = tokenize(frag)) {
          comment.sentences.push_back(std::move(*s));
        } else {
          ++stats.dropped_fragments;
        }
      }
      if (comment.sentences.empty()) {
        ++stats.dropped_comments;
        continue;
      }
      stats.sentences += comment.sentences.size();
      ++stats.comments;
      img.comments.push_back(std::move(comment));
    }
    images.push_back(std::move(img));
  });

  stats.images = images.size();
  return Corpus(std::move(images), stats);
}

Corpus load_corpus(const std::filesystem::path& path) { return parse_corpus(io::read_file(path)); }

std::string serialize_corpus(const Corpus& corpus) {
  using nlohmann::json;
  std::string out;
  for (const auto& img : corpus.images()) {
    json row;
    row["image_id"] = img.image_id;
    row["aesthetic_score"] = img.aesthetic_score ? json(*img.aesthetic_score) : json(nullptr);
    json comments = json::array();
    for (const auto& c : img.comments) {
      std::string text;
      for (const auto& s : c.sentences) {
        if (!text.empty()) text += ' ';
        text += s.raw_text;
        text += '.';
      }
      comments.push_back({{"comment_id", c.comment_id}, {"text", text}});
    }
    row["comments"] = std::move(comments);
    out += row.dump();
    out += '\n';
  }
  return out;
}

void save_corpus(const Corpus& corpus, const std::filesystem::path& path) {
  io::write_file(path, serialize_corpus(corpus));
}

std::vector<SentenceRef> iterate_sentences(const Corpus& corpus) {
  std::vector<SentenceRef> refs;
  refs.reserve(corpus.sentence_count());
  const auto& images = corpus.images();
  for (std::size_t i = 0; i < images.size(); ++i) {
    for (const auto& c : images[i].comments) {
      for (std::size_t k = 0; k < c.sentences.size(); ++k) {
        refs.push_back({i, &images[i].image_id, &c.comment_id, k, &c.sentences[k]});
      }
    }
  }
  return refs;
}

}  // namespace ars
