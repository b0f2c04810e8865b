#include "ars/dacs.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <numeric>

#include "ars/error.hpp"
#include "ars/io.hpp"
#include "ars/parallel.hpp"

namespace ars::dacs {

std::string_view to_string(Grouping g) { return g == Grouping::leader ? "leader" : "components"; }

Grouping parse_grouping(std::string_view s) {
  if (s == "leader") return Grouping::leader;
  if (s == "components") return Grouping::components;
  throw input_error("unknown grouping '" + std::string(s) + "' (leader|components)");
}

Blacklist::Blacklist(std::span<const std::string> entries) {
  for (const auto& e : entries) {
    auto tokens = tokenize_words(e);
    if (tokens.empty()) continue;
    std::string canon;
    for (const auto& t : tokens) {
      if (!canon.empty()) canon.push_back(' ');
      canon += t;
    }
    entries_.insert(std::move(canon));
  }
}

Blacklist Blacklist::load(const std::filesystem::path& path) {
  std::vector<std::string> lines;
  io::for_each_line(io::read_file(path), [&](std::size_t, std::string_view line) {
    if (line.find_first_not_of(" \t") != std::string_view::npos &&
        line[line.find_first_not_of(" \t")] == '#') {
      return;
    }
    lines.emplace_back(line);
  });
  return Blacklist(lines);
}

bool Blacklist::contains(std::string_view text) const {
  if (entries_.empty()) return false;
  auto s = tokenize(text);
  return s && entries_.count(canonical_text(*s)) != 0;
}

DacsConfig default_config(const FrozenStats& stats) {
  if (!stats.ars_mean) {
    throw input_error("stats have no frozen ars_mean; run label with --freeze-ars or pass a floor");
  }
  DacsConfig c;
  c.ars_floor = *stats.ars_mean;
  return c;
}

void validate(const DacsConfig& config) {
  if (!(config.similarity_threshold > 0.0 && config.similarity_threshold <= 1.0)) {
    throw input_error("similarity threshold must lie in (0, 1]");
  }
  if (!std::isfinite(config.ars_floor)) throw input_error("ARS floor must be finite");
}

std::vector<Candidate> parse_candidates(std::string_view jsonl) {
  std::vector<Candidate> out;
  io::for_each_line(jsonl, [&](std::size_t line_no, std::string_view line) {
    const std::string at = "candidates line " + std::to_string(line_no) + ": ";
    nlohmann::json j;
    try {
      j = nlohmann::json::parse(line);
    } catch (const nlohmann::json::parse_error& e) {
      throw input_error(at + e.what());
    }
    if (!j.is_object() || !j.contains("text") || !j["text"].is_string() ||
        !j.contains("confidence") || !j["confidence"].is_number()) {
      throw input_error(at + "need string 'text' and numeric 'confidence'");
    }
    Candidate c;
    c.text = j["text"].get<std::string>();
    if (tokenize_words(c.text).empty()) throw input_error(at + "text has no tokens");
    c.confidence = j["confidence"].get<double>();
    if (!std::isfinite(c.confidence)) throw input_error(at + "confidence must be finite");
    if (auto a = j.find("ars"); a != j.end() && !a->is_null()) {
      if (!a->is_number()) throw input_error(at + "'ars' must be a number");
      c.preset_ars = a->get<double>();
    }
    c.input_index = out.size();
    out.push_back(std::move(c));
  });
  return out;
}

std::vector<Candidate> load_candidates(const std::filesystem::path& path) {
  return parse_candidates(io::read_file(path));
}

std::vector<Candidate> filter_bad(std::vector<Candidate> cands, const Blacklist& blacklist) {
  if (blacklist.size() == 0) return cands;
  std::erase_if(cands, [&](const Candidate& c) { return blacklist.contains(c.text); });
  return cands;
}

std::vector<std::size_t> confidence_order(std::span<const Candidate> cands) {
  std::vector<std::size_t> order(cands.size());
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (cands[a].confidence != cands[b].confidence) return cands[a].confidence > cands[b].confidence;
    return cands[a].input_index < cands[b].input_index;
  });
  return order;
}

namespace {

std::vector<std::vector<std::size_t>> leader_groups(std::span<const Candidate> cands,
                                                    const std::vector<std::size_t>& order,
                                                    double threshold) {
  std::vector<std::vector<std::size_t>> groups;
  for (auto i : order) {
    bool placed = false;
    for (auto& g : groups) {
      if (cosine(cands[g.front()].embedding, cands[i].embedding) > threshold) {
        g.push_back(i);
        placed = true;
        break;
      }
    }
    if (!placed) groups.push_back({i});
  }
  return groups;
}

std::size_t find_root(std::vector<std::size_t>& parent, std::size_t x) {
  while (parent[x] != x) {
    parent[x] = parent[parent[x]];
    x = parent[x];
  }
  return x;
}

std::vector<std::vector<std::size_t>> component_groups(std::span<const Candidate> cands,
                                                       const std::vector<std::size_t>& order,
                                                       double threshold) {
  const std::size_t n = cands.size();
  std::vector<std::size_t> parent(n);
  std::iota(parent.begin(), parent.end(), 0);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      if (cosine(cands[i].embedding, cands[j].embedding) > threshold) {
        auto a = find_root(parent, i);
        auto b = find_root(parent, j);
        if (a != b) parent[b] = a;
      }
    }
  }
  std::vector<std::vector<std::size_t>> groups;
  std::vector<std::size_t> slot(n, n);
  for (auto i : order) {
    auto r = find_root(parent, i);
    if (slot[r] == n) {
      slot[r] = groups.size();
      groups.emplace_back();
    }
    groups[slot[r]].push_back(i);
  }
  return groups;
}

// True when a should be preferred over b among equal scores.
bool tie_before(const Candidate& a, const Candidate& b) {
  if (a.confidence != b.confidence) return a.confidence > b.confidence;
  return a.input_index < b.input_index;
}

}  // namespace

std::vector<std::vector<std::size_t>> group_indices(std::span<const Candidate> cands,
                                                    double threshold, Grouping grouping) {
  const auto order = confidence_order(cands);
  return grouping == Grouping::leader ? leader_groups(cands, order, threshold)
                                      : component_groups(cands, order, threshold);
}

namespace {

std::vector<CandidateGroup> build_groups(std::span<const Candidate> cands,
                                         const std::vector<std::vector<std::size_t>>& idx) {
  std::vector<CandidateGroup> groups;
  groups.reserve(idx.size());
  for (const auto& members : idx) {
    CandidateGroup g;
    double sum = 0.0;
    for (auto i : members) {
      g.members.push_back(cands[i]);
      sum += cands[i].ars;
    }
    g.mean_ars = sum / static_cast<double>(members.size());
    for (std::size_t k = 1; k < g.members.size(); ++k) {
      const auto& best = g.members[g.representative];
      const auto& c = g.members[k];
      if (c.ars > best.ars || (c.ars == best.ars && tie_before(c, best))) g.representative = k;
    }
    groups.push_back(std::move(g));
  }
  return groups;
}

}  // namespace

std::vector<CandidateGroup> group_candidates(std::vector<Candidate> cands, double threshold,
                                             const EmbeddingProvider& embedder, Grouping grouping) {
  if (!(threshold > 0.0 && threshold <= 1.0)) throw input_error("threshold must lie in (0, 1]");
  for (auto& c : cands) c.embedding = embedder.embed(c.text);
  return build_groups(cands, group_indices(cands, threshold, grouping));
}

void prepare_candidates(std::vector<Candidate>& cands, const EmbeddingProvider& embedder,
                        const CandidateScorer& ars) {
  std::vector<std::optional<Error>> errors(cands.size());
  const auto n = static_cast<std::ptrdiff_t>(cands.size());
#pragma omp parallel for schedule(dynamic, 4) num_threads(worker_count())
  for (std::ptrdiff_t i = 0; i < n; ++i) {
    try {
      cands[i].embedding = embedder.embed(cands[i].text);
      cands[i].ars = ars(cands[i]);
    } catch (const Error& e) {
      errors[i] = e;
    } catch (const std::exception& e) {
      errors[i] = Error(ErrorKind::provider, e.what());
    }
  }
  for (auto& e : errors)
    if (e) throw *e;
}

void prepare_candidates_serial(std::vector<Candidate>& cands, const EmbeddingProvider& embedder,
                               const CandidateScorer& ars) {
  for (auto& c : cands) {
    c.embedding = embedder.embed(c.text);
    c.ars = ars(c);
  }
}

std::vector<Selection> select_prepared(std::span<const Candidate> cands, const DacsConfig& config,
                                       const CandidateScorer* relevance) {
  validate(config);
  auto groups = build_groups(cands, group_indices(cands, config.similarity_threshold, config.grouping));

  std::vector<Selection> out;
  for (auto& g : groups) {
    // Discarded only when strictly below the floor.
    if (g.mean_ars < config.ars_floor) continue;
    Selection s;
    s.group_size = g.members.size();
    if (relevance == nullptr) {
      s.candidate = g.rep();
      s.score = s.candidate.ars;
    } else {
      std::size_t best = 0;
      double best_score = (*relevance)(g.members[0]);
      for (std::size_t k = 1; k < g.members.size(); ++k) {
        double v = (*relevance)(g.members[k]);
        if (v > best_score || (v == best_score && tie_before(g.members[k], g.members[best]))) {
          best = k;
          best_score = v;
        }
      }
      s.candidate = g.members[best];
      s.score = best_score;
    }
    out.push_back(std::move(s));
  }

  std::stable_sort(out.begin(), out.end(), [](const Selection& a, const Selection& b) {
    if (a.score != b.score) return a.score > b.score;
    return tie_before(a.candidate, b.candidate);
  });
  if (config.max_outputs && out.size() > *config.max_outputs) out.resize(*config.max_outputs);
  for (std::size_t i = 0; i < out.size(); ++i) out[i].rank = i + 1;
  return out;
}

std::vector<Selection> select(std::vector<Candidate> cands, const DacsConfig& config,
                              const EmbeddingProvider& embedder, const CandidateScorer& ars) {
  validate(config);
  cands = filter_bad(std::move(cands), config.blacklist);
  prepare_candidates(cands, embedder, ars);
  return select_prepared(cands, config);
}

std::vector<Selection> select_with_scorer(std::vector<Candidate> cands, const DacsConfig& config,
                                          const EmbeddingProvider& embedder,
                                          const CandidateScorer& ars,
                                          const CandidateScorer& relevance) {
  validate(config);
  cands = filter_bad(std::move(cands), config.blacklist);
  prepare_candidates(cands, embedder, ars);
  return select_prepared(cands, config, &relevance);
}

std::string selections_to_jsonl(std::span<const Selection> selections) {
  std::string out;
  for (const auto& s : selections) {
    nlohmann::ordered_json row;
    row["text"] = s.candidate.text;
    row["ars"] = s.candidate.ars;
    row["group_size"] = s.group_size;
    row["rank"] = s.rank;
    out += row.dump();
    out += '\n';
  }
  return out;
}

}  // namespace ars::dacs
