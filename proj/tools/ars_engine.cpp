// ars_engine: batch front-end for aesthetic relevance scoring, caption
// selection and weighted-loss computation.

#include <CLI11.hpp>
#include <json.hpp>

#include <charconv>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <map>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "ars/ars.hpp"
#include "ars/corpus.hpp"
#include "ars/dacs.hpp"
#include "ars/error.hpp"
#include "ars/io.hpp"
#include "ars/lexicon.hpp"
#include "ars/loss.hpp"
#include "ars/providers.hpp"
#include "ars/stats.hpp"

namespace fs = std::filesystem;
using nlohmann::ordered_json;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitInput = 2;
constexpr int kExitProvider = 3;
constexpr int kExitDegenerate = 4;

constexpr const char* kSchemas = R"(File formats (all UTF-8, JSONL = one JSON object per line):
  corpus      {"image_id": str, "aesthetic_score": num|null, "comments": [{"comment_id": str, "text": str}]}
  stats       JSON object written by `stats` (format "ars-frozen-stats/1")
  labels      {"image_id","comment_id","sentence_index","text","a","l","o","s","tfidf","ars"}
  candidates  {"text": str, "confidence": num[, "ars": num]}
  selection   {"text": str, "ars": num, "group_size": int, "rank": int}
  logprobs    {"image_id","comment_id","sentence_index","log_probs": [num, ...]}
  weights     {"key": {"image_id","comment_id","sentence_index"}, "weight": num}
  sentiment   {"text": str, "positive": num, "negative": num}     (--sentiment file:PATH)
  embeddings  {"text": str, "vector": [num, ...]}                   (--embed file:PATH)
  scores      {"text": str, "score": num}                           (--scorer file:PATH)
  word lists  one entry per line, '#' starts a comment line
Backends: --sentiment lexicon|lexicon:POS,NEG|file:PATH|process:CMD
          --embed hash|hash:DIM|file:PATH|process:CMD
Process protocol: child prints {"proto":1,"dim":int|null}, then answers
  {"op":"sentiment","text":..} with {"positive":..,"negative":..} and
  {"op":"embed","text":..} with {"vector":[..]}, one line each.
Every output gets a <out>.manifest.json with input hashes and the config.
ARS_ENGINE_THREADS caps the worker threads.
Exit codes: 0 ok, 2 input/schema error, 3 provider error, 4 degenerate statistics.)";

std::string number(double v) {
  char buf[64];
  auto r = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, r.ptr);
}

class Manifest {
 public:
  explicit Manifest(std::string subcommand) { j_["subcommand"] = std::move(subcommand); }

  void input(const std::string& path) {
    j_["inputs"][path] = ars::io::sha256_hex(ars::io::read_file(path));
  }
  template <typename T>
  void config(const std::string& key, const T& value) {
    j_["config"][key] = value;
  }
  void report(const std::string& key, ordered_json value) { j_["report"][key] = std::move(value); }

  /// Writes `content` to `path` and records it.
  void output(const std::string& path, const std::string& content) {
    ars::io::write_file(path, content);
    j_["outputs"][path] = ars::io::sha256_hex(content);
  }

  void write(const std::string& out_path) const {
    ars::io::write_file(out_path + ".manifest.json", j_.dump(2) + "\n");
  }

 private:
  ordered_json j_ = ordered_json::object();
};

void print_warnings(const std::vector<std::string>& warnings) {
  for (const auto& w : warnings) std::cerr << "warning: " << w << "\n";
}

ars::Lexicons load_lexicons(const std::string& aw, const std::string& ow, Manifest& m) {
  auto a = ars::load_wordlist(aw, ars::WordListKind::aesthetic);
  auto o = ars::load_wordlist(ow, ars::WordListKind::object);
  print_warnings(a.warnings);
  print_warnings(o.warnings);
  m.input(aw);
  m.input(ow);
  m.report("aesthetic_words", a.list.size());
  m.report("object_words", o.list.size());
  return {std::move(a.list), std::move(o.list)};
}

// Backend specs that name a file get that file hashed into the manifest.
void record_backend(const std::string& spec, Manifest& m) {
  if (spec.rfind("file:", 0) == 0) m.input(spec.substr(5));
}

ordered_json summary_json(const ars::LabelSummary& s) {
  ordered_json j;
  j["count"] = s.count;
  j["mean"] = s.mean;
  j["scale"] = s.scale;
  j["min"] = s.min;
  j["max"] = s.max;
  ordered_json bins = ordered_json::array();
  for (const auto& b : s.histogram) bins.push_back({b.start, b.count});
  j["histogram"] = std::move(bins);
  return j;
}

struct Args {
  std::string corpus, out, stats, aw, ow, labels, candidates, logprobs, weights;
  std::string sentiment = "lexicon";
  std::string embed = "hash";
  std::string scorer = "ars";
  std::string blacklist;
  std::string floor = "auto";
  std::string scale = "stddev";
  std::string log_base = "e";
  std::string tau_population = "pairs";
  std::string rule;
  std::string grouping = "leader";
  double threshold = ars::dacs::kDefaultSimilarityThreshold;
  double alpha = 0.0;
  double bin_width = 0.5;
  std::size_t max_outputs = 0;
  bool lenient = false;
  bool freeze_ars = false;
  bool force = false;
};

int cmd_ingest(const Args& a) {
  Manifest m("ingest");
  m.input(a.corpus);
  auto corpus = ars::load_corpus(a.corpus);
  const auto& st = corpus.ingest_stats();
  ordered_json counters = {{"images", st.images},
                           {"comments", st.comments},
                           {"sentences", st.sentences},
                           {"dropped_comments", st.dropped_comments},
                           {"dropped_fragments", st.dropped_fragments}};
  m.output(a.out, ars::serialize_corpus(corpus));
  m.report("ingest", counters);
  m.write(a.out);
  std::cout << counters.dump() << "\n";
  return kExitOk;
}

int cmd_stats(const Args& a) {
  Manifest m("stats");
  m.input(a.corpus);
  ars::StatsConfig cfg{ars::parse_scale_mode(a.scale), ars::parse_log_base(a.log_base),
                       ars::parse_tau_population(a.tau_population)};
  m.config("scale", a.scale);
  m.config("log_base", a.log_base);
  m.config("tau_population", a.tau_population);
  auto corpus = ars::load_corpus(a.corpus);
  auto stats = ars::compute_frozen_stats(corpus, cfg);
  m.output(a.out, ars::stats_to_json(stats));
  m.write(a.out);
  return kExitOk;
}

int cmd_label(const Args& a) {
  Manifest m("label");
  m.input(a.corpus);
  m.input(a.stats);
  record_backend(a.sentiment, m);
  m.config("sentiment", a.sentiment);
  m.config("lenient", a.lenient);
  m.config("freeze_ars", a.freeze_ars);
  m.config("force", a.force);
  m.config("bin_width", a.bin_width);

  auto corpus = ars::load_corpus(a.corpus);
  auto stats = ars::load_stats(a.stats);
  ars::check_corpus_hash(stats, corpus, a.force);
  auto lex = load_lexicons(a.aw, a.ow, m);
  auto sentiment = ars::make_sentiment_provider(a.sentiment);
  ars::ArsScorer scorer(stats, lex, *sentiment);

  auto result = ars::label_corpus(corpus, scorer, {a.lenient, a.bin_width});
  auto summary = summary_json(result.summary);
  summary["skipped"] = result.skipped;
  m.output(a.out, ars::labels_to_jsonl(result.labels));
  if (a.freeze_ars) {
    ars::freeze_ars(stats, result.summary);
    m.output(a.stats, ars::stats_to_json(stats));
  }
  m.report("summary", summary);
  m.write(a.out);
  std::cout << summary.dump() << "\n";
  return kExitOk;
}

int cmd_partition(const Args& a) {
  Manifest m("partition");
  m.input(a.labels);
  m.input(a.stats);
  m.config("alpha", a.alpha);
  m.config("rule", a.rule);
  auto labels = ars::load_labels(a.labels);
  auto stats = ars::load_stats(a.stats);
  auto part = ars::partition_by_threshold(labels, stats, a.alpha, ars::parse_threshold_rule(a.rule));
  m.output(a.out, ars::labels_to_jsonl(part.members));
  m.report("threshold", part.threshold);
  m.report("members", part.members.size());
  m.write(a.out);
  return kExitOk;
}

class FileScorer {
 public:
  explicit FileScorer(const std::string& path) {
    ars::io::for_each_line(ars::io::read_file(path), [&](std::size_t line_no, std::string_view line) {
      const std::string at = path + ": line " + std::to_string(line_no) + ": ";
      nlohmann::json j;
      try {
        j = nlohmann::json::parse(line);
      } catch (const nlohmann::json::parse_error& e) {
        throw ars::input_error(at + e.what());
      }
      if (!j.is_object() || !j.contains("text") || !j["text"].is_string() ||
          !j.contains("score") || !j["score"].is_number()) {
        throw ars::input_error(at + "need string 'text' and numeric 'score'");
      }
      if (!scores_.emplace(j["text"].get<std::string>(), j["score"].get<double>()).second) {
        throw ars::input_error(at + "duplicate text key");
      }
    });
  }

  double operator()(const ars::dacs::Candidate& c) const {
    auto it = scores_.find(c.text);
    if (it == scores_.end()) throw ars::provider_error("no relevance score for \"" + c.text + "\"");
    return it->second;
  }

 private:
  std::unordered_map<std::string, double> scores_;
};

int cmd_select(const Args& a) {
  Manifest m("select");
  m.input(a.candidates);
  m.input(a.stats);
  record_backend(a.sentiment, m);
  record_backend(a.embed, m);
  m.config("threshold", a.threshold);
  m.config("floor", a.floor);
  m.config("embed", a.embed);
  m.config("sentiment", a.sentiment);
  m.config("scorer", a.scorer);
  m.config("grouping", a.grouping);
  m.config("max_outputs", a.max_outputs);

  auto stats = ars::load_stats(a.stats);
  ars::dacs::DacsConfig cfg;
  cfg.similarity_threshold = a.threshold;
  cfg.grouping = ars::dacs::parse_grouping(a.grouping);
  if (a.floor == "auto") {
    cfg.ars_floor = ars::dacs::default_config(stats).ars_floor;
  } else {
    try {
      cfg.ars_floor = std::stod(a.floor);
    } catch (...) {
      throw ars::input_error("--floor must be 'auto' or a number");
    }
  }
  m.report("ars_floor", cfg.ars_floor);
  if (!a.blacklist.empty()) {
    m.input(a.blacklist);
    cfg.blacklist = ars::dacs::Blacklist::load(a.blacklist);
  }
  if (a.max_outputs > 0) cfg.max_outputs = a.max_outputs;

  auto cands = ars::dacs::load_candidates(a.candidates);
  auto lex = load_lexicons(a.aw, a.ow, m);
  auto sentiment = ars::make_sentiment_provider(a.sentiment);
  auto embedder = ars::make_embedding_provider(a.embed);
  ars::ArsScorer scorer(stats, lex, *sentiment);
  ars::dacs::CandidateScorer ars_fn = [&](const ars::dacs::Candidate& c) {
    if (c.preset_ars) return *c.preset_ars;
    return scorer.score_standalone(*ars::tokenize(c.text)).total;
  };

  std::vector<ars::dacs::Selection> picked;
  if (a.scorer == "ars") {
    picked = ars::dacs::select(std::move(cands), cfg, *embedder, ars_fn);
  } else if (a.scorer.rfind("file:", 0) == 0) {
    const auto path = a.scorer.substr(5);
    m.input(path);
    FileScorer fs(path);
    picked = ars::dacs::select_with_scorer(std::move(cands), cfg, *embedder, ars_fn, std::cref(fs));
  } else {
    throw ars::input_error("--scorer must be 'ars' or 'file:PATH'");
  }
  m.output(a.out, ars::dacs::selections_to_jsonl(picked));
  m.report("selected", picked.size());
  m.write(a.out);
  return kExitOk;
}

int cmd_loss(const Args& a) {
  Manifest m("loss");
  m.input(a.labels);
  m.input(a.logprobs);
  auto labels = ars::load_labels(a.labels);
  auto rows = ars::load_logprobs(a.logprobs);
  auto inputs = ars::attach_weights(labels, rows);
  auto loss = ars::weighted_ce(inputs);
  ordered_json j;
  j["total"] = loss.total;
  j["sentence_count"] = loss.sentence_count;
  j["per_sentence"] = loss.per_sentence;
  m.output(a.out, j.dump(2) + "\n");
  if (!a.weights.empty()) m.output(a.weights, ars::weights_to_jsonl(rows, inputs));
  m.report("total", loss.total);
  m.write(a.out);
  std::cout << number(loss.total) << "\n";
  return kExitOk;
}

int cmd_report(const Args& a) {
  Manifest m("report");
  m.input(a.labels);
  m.config("bin_width", a.bin_width);
  auto labels = ars::load_labels(a.labels);
  std::vector<double> totals;
  totals.reserve(labels.size());
  for (const auto& l : labels) totals.push_back(l.breakdown.total);
  std::string csv = "bin_start,count\n";
  for (const auto& b : ars::ars_histogram(totals, a.bin_width)) {
    csv += number(b.start) + "," + std::to_string(b.count) + "\n";
  }
  m.output(a.out, csv);
  m.write(a.out);
  return kExitOk;
}

int exit_code(ars::ErrorKind kind) {
  switch (kind) {
    case ars::ErrorKind::provider: return kExitProvider;
    case ars::ErrorKind::degenerate: return kExitDegenerate;
    default: return kExitInput;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Aesthetic relevance scoring engine"};
  app.footer(kSchemas);
  app.require_subcommand(1);

  Args a;
  const auto data = ars::default_data_dir();
  a.aw = (data / "aesthetic_words.txt").string();
  a.ow = (data / "object_words.txt").string();

  auto* ingest = app.add_subcommand("ingest", "Load, clean and re-emit a corpus");
  ingest->add_option("--corpus", a.corpus, "Corpus JSONL")->required();
  ingest->add_option("--out", a.out, "Normalized corpus JSONL")->required();

  auto* stats = app.add_subcommand("stats", "Freeze length and tf-idf statistics");
  stats->add_option("--corpus", a.corpus, "Corpus JSONL")->required();
  stats->add_option("--out", a.out, "Stats JSON")->required();
  stats->add_option("--scale", a.scale, "stddev|variance")->check(CLI::IsMember({"stddev", "variance"}));
  stats->add_option("--log-base", a.log_base, "e|10|2")->check(CLI::IsMember({"e", "10", "2"}));
  stats->add_option("--tau-population", a.tau_population, "pairs|occurrences")
      ->check(CLI::IsMember({"pairs", "occurrences"}));

  auto* label = app.add_subcommand("label", "Score every corpus sentence");
  label->add_option("--corpus", a.corpus, "Corpus JSONL")->required();
  label->add_option("--stats", a.stats, "Stats JSON")->required();
  label->add_option("--aw", a.aw, "Aesthetic word list")->capture_default_str();
  label->add_option("--ow", a.ow, "Object word list")->capture_default_str();
  label->add_option("--sentiment", a.sentiment, "Sentiment backend")->capture_default_str();
  label->add_option("--out", a.out, "Labels JSONL")->required();
  label->add_option("--bin-width", a.bin_width, "Summary histogram bin width")->capture_default_str();
  label->add_flag("--lenient", a.lenient, "Skip sentences whose provider fails");
  label->add_flag("--freeze-ars", a.freeze_ars, "Write ARS mean/scale back into the stats file");
  label->add_flag("--force", a.force, "Accept stats computed on another corpus");

  auto* partition = app.add_subcommand("partition", "Filter labels by m +/- alpha*sigma");
  partition->add_option("--labels", a.labels, "Labels JSONL")->required();
  partition->add_option("--stats", a.stats, "Stats JSON with frozen ARS")->required();
  partition->add_option("--alpha", a.alpha, "Multiplier of the ARS scale")->required();
  partition->add_option("--rule", a.rule, "leq|geq")->required()->check(CLI::IsMember({"leq", "geq"}));
  partition->add_option("--out", a.out, "Member labels JSONL")->required();

  auto* select = app.add_subcommand("select", "Pick diverse, high-ARS captions");
  select->add_option("--candidates", a.candidates, "Candidates JSONL")->required();
  select->add_option("--stats", a.stats, "Stats JSON")->required();
  select->add_option("--threshold", a.threshold, "Cosine similarity threshold")->capture_default_str();
  select->add_option("--floor", a.floor, "auto|REAL minimum group mean ARS")->capture_default_str();
  select->add_option("--embed", a.embed, "Embedding backend")->capture_default_str();
  select->add_option("--sentiment", a.sentiment, "Sentiment backend")->capture_default_str();
  select->add_option("--scorer", a.scorer, "ars|file:PATH")->capture_default_str();
  select->add_option("--blacklist", a.blacklist, "Bad-caption list");
  select->add_option("--grouping", a.grouping, "leader|components")
      ->check(CLI::IsMember({"leader", "components"}));
  select->add_option("--max-outputs", a.max_outputs, "Keep at most this many (0 = all)");
  select->add_option("--aw", a.aw, "Aesthetic word list")->capture_default_str();
  select->add_option("--ow", a.ow, "Object word list")->capture_default_str();
  select->add_option("--out", a.out, "Selection JSONL")->required();

  auto* loss = app.add_subcommand("loss", "ARS-weighted cross-entropy");
  loss->add_option("--labels", a.labels, "Labels JSONL")->required();
  loss->add_option("--logprobs", a.logprobs, "Log-prob JSONL")->required();
  loss->add_option("--out", a.out, "Loss JSON")->required();
  loss->add_option("--weights", a.weights, "Also write per-sentence weights JSONL");

  auto* report = app.add_subcommand("report", "ARS histogram as CSV");
  report->add_option("--labels", a.labels, "Labels JSONL")->required();
  report->add_option("--bin-width", a.bin_width, "Bin width")->capture_default_str();
  report->add_option("--out", a.out, "CSV path")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? kExitOk : kExitInput;
  }

  try {
    if (*ingest) return cmd_ingest(a);
    if (*stats) return cmd_stats(a);
    if (*label) return cmd_label(a);
    if (*partition) return cmd_partition(a);
    if (*select) return cmd_select(a);
    if (*loss) return cmd_loss(a);
    if (*report) return cmd_report(a);
  } catch (const ars::Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return exit_code(e.kind());
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return kExitInput;
}
