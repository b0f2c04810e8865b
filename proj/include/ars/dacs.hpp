#pragma once

#include <cstddef>
#include <filesystem>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

#include "ars/providers.hpp"
#include "ars/stats.hpp"

namespace ars::dacs {

inline constexpr double kDefaultSimilarityThreshold = 0.7;
/// Beam width the selector is designed around.
inline constexpr std::size_t kDefaultCandidateCount = 256;

struct Candidate {
  std::string text;
  double confidence = 0.0;  // generator rank score, higher is better
  Embedding embedding;      // filled by the pipeline
  double ars = 0.0;         // filled by the pipeline
  std::optional<double> preset_ars;  // supplied with the candidate (external predictor)
  std::size_t input_index = 0;
};

struct CandidateGroup {
  std::vector<Candidate> members;  // confidence order; members.front() is the leader
  double mean_ars = 0.0;
  std::size_t representative = 0;  // index into members

  const Candidate& rep() const { return members.at(representative); }
};

enum class Grouping {
  leader,      // join the first group whose leader is similar enough
  components,  // connected components of the "cosine > threshold" graph
};

std::string_view to_string(Grouping g);
Grouping parse_grouping(std::string_view s);

/// Exact canonical-text matches (tokens joined by single spaces).
class Blacklist {
 public:
  Blacklist() = default;
  explicit Blacklist(std::span<const std::string> entries);
  static Blacklist load(const std::filesystem::path& path);

  bool contains(std::string_view text) const;
  std::size_t size() const noexcept { return entries_.size(); }

 private:
  std::unordered_set<std::string> entries_;
};

struct DacsConfig {
  double similarity_threshold = kDefaultSimilarityThreshold;
  double ars_floor = 0.0;
  Blacklist blacklist;
  std::optional<std::size_t> max_outputs;
  Grouping grouping = Grouping::leader;
};

/// Defaults with the floor set to the frozen training ARS mean.
DacsConfig default_config(const FrozenStats& stats);

/// Throws input error unless threshold is in (0, 1] and the floor is finite.
void validate(const DacsConfig& config);

/// Reads JSONL {"text": str, "confidence": num[, "ars": num]}. Text that
/// yields no tokens is an input error.
std::vector<Candidate> parse_candidates(std::string_view jsonl);
std::vector<Candidate> load_candidates(const std::filesystem::path& path);

/// Drops blacklisted candidates, order preserved.
std::vector<Candidate> filter_bad(std::vector<Candidate> cands, const Blacklist& blacklist);

/// Candidate indices in processing order: confidence descending, input
/// index ascending on ties.
std::vector<std::size_t> confidence_order(std::span<const Candidate> cands);

/// Groups by the already-filled embeddings. Each inner vector lists member
/// positions (into `cands`) in confidence order; groups are ordered by their
/// first member.
std::vector<std::vector<std::size_t>> group_indices(std::span<const Candidate> cands,
                                                    double threshold, Grouping grouping);

/// Embeds every candidate, then groups. mean_ars and representative use
/// whatever `ars` the candidates carry.
std::vector<CandidateGroup> group_candidates(std::vector<Candidate> cands, double threshold,
                                             const EmbeddingProvider& embedder,
                                             Grouping grouping = Grouping::leader);

using CandidateScorer = std::function<double(const Candidate&)>;

/// Fills embedding and ars for every candidate; OpenMP over candidates.
void prepare_candidates(std::vector<Candidate>& cands, const EmbeddingProvider& embedder,
                        const CandidateScorer& ars);
void prepare_candidates_serial(std::vector<Candidate>& cands, const EmbeddingProvider& embedder,
                               const CandidateScorer& ars);

struct Selection {
  Candidate candidate;
  double score = 0.0;  // value the representative was chosen by
  std::size_t group_size = 0;
  std::size_t rank = 0;  // 1-based
};

/// filter -> embed -> score -> group -> drop groups with mean ARS below the
/// floor -> one highest-ARS representative per group, ordered by ARS
/// descending (confidence, then input index, on ties), truncated.
std::vector<Selection> select(std::vector<Candidate> cands, const DacsConfig& config,
                              const EmbeddingProvider& embedder, const CandidateScorer& ars);

/// As select(), but representatives (and output order) come from `relevance`.
/// Groups are still filtered by mean ARS.
std::vector<Selection> select_with_scorer(std::vector<Candidate> cands, const DacsConfig& config,
                                          const EmbeddingProvider& embedder,
                                          const CandidateScorer& ars,
                                          const CandidateScorer& relevance);

/// Selection on candidates whose embedding and ars are already filled.
std::vector<Selection> select_prepared(std::span<const Candidate> cands, const DacsConfig& config,
                                       const CandidateScorer* relevance = nullptr);

/// Output JSONL {"text","ars","group_size","rank"}.
std::string selections_to_jsonl(std::span<const Selection> selections);

}  // namespace ars::dacs
