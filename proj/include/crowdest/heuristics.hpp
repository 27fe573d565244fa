#pragma once

// Streaker-bias correction. Both heuristics cap how much any single worker
// contributes before an estimator is evaluated: workers above a quota q (the
// mean contribution of the top-t workers) lose their excess, but never more
// than a fraction r of what they gave.

#include "crowdest/stream.hpp"

#include <cstdint>
#include <string_view>
#include <vector>

namespace crowdest {

enum class HeuristicKind { cluster, f1 };

[[nodiscard]] std::string_view to_string(HeuristicKind kind);

struct HeuristicConfig {
  std::size_t t = 10;
  double r = 0.40;
  HeuristicKind kind = HeuristicKind::f1;
  std::uint64_t seed = 0;
  /// Independent resamples averaged by series evaluation. 1 = single resample.
  std::size_t repetitions = 1;

  /// Throws DomainError unless t >= 1, 0 <= r < 1 and repetitions >= 1.
  void validate() const;
};

/// Removal count for a worker holding `count` eligible answers under quota q:
/// min(ceil(max(count - q, 0)), floor(r * count)).
[[nodiscard]] std::size_t removal_count(std::size_t count, double quota, double r);

/// Mean of the t largest values (all values when fewer than t).
[[nodiscard]] double top_t_quota(std::vector<std::size_t> counts, std::size_t t);

/// Multistage cluster heuristic: subsample each over-quota worker's answers
/// without replacement. The result is a subsequence of the input.
[[nodiscard]] AnswerStream cluster_truncate(const AnswerStream& stream, const HeuristicConfig& cfg);

/// f1-heuristic: like cluster_truncate, but counts and removes only answers
/// that occur exactly once in the whole stream.
[[nodiscard]] AnswerStream f1_truncate(const AnswerStream& stream, const HeuristicConfig& cfg);

/// Dispatches on cfg.kind.
[[nodiscard]] AnswerStream apply_heuristic(const AnswerStream& stream, const HeuristicConfig& cfg);

/// cfg.repetitions independent applications with sub-seeds derived from cfg.seed.
/// With repetitions = 1 the single element equals apply_heuristic(stream, cfg).
[[nodiscard]] std::vector<AnswerStream> heuristic_resamples(const AnswerStream& stream,
                                                            const HeuristicConfig& cfg);

}  // namespace crowdest
