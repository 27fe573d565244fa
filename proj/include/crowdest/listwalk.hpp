#pragma once

// List-walking detection: several workers emitting the same answer sequence
// from the same per-worker offset. A shared window is flagged when the chance
// that w or more of the W eligible workers produce it, under a smoothed
// mix of the observed positional frequencies and a maximally skewed
// self-similar prior, falls below a threshold.

#include "crowdest/stream.hpp"

#include "json.hpp"

#include <span>
#include <string>
#include <vector>

namespace crowdest {

struct ListWalkConfig {
  std::size_t s_min = 5;   // shortest window tested
  double beta = 0.5;       // weight on observed frequencies vs. the prior
  double h = 0.2;          // self-similar skew of the prior
  double threshold = 0.01;

  /// Throws DomainError unless s_min >= 2, beta in [0,1], h and threshold in (0,1).
  void validate() const;
};

struct DetectedWindow {
  std::size_t offset = 0;              // 0-based per-worker answer position
  std::size_t length = 0;
  std::vector<std::string> sequence;   // the shared answers
  std::vector<std::string> workers;    // sorted worker ids, size w
  std::size_t cohort = 0;              // W: workers with >= offset + length answers
  double sequence_probability = 0.0;   // smoothed probability of the sequence
  double probability = 0.0;            // P(w or more of W share it)
};

struct AffectedPoint {
  std::size_t hits = 0;
  std::size_t affected = 0;

  friend bool operator==(const AffectedPoint&, const AffectedPoint&) = default;
};

struct ListWalkReport {
  std::vector<DetectedWindow> windows;
  std::size_t affected_hits = 0;  // distinct records covered by any window
  std::size_t total_hits = 0;
  /// Hit indices of the covered records, ascending.
  std::vector<std::size_t> affected_indices;
  std::vector<AffectedPoint> affected_series;
};

/// prod_i [beta * r_i / W + (1 - beta)(1 - h)] from the per-position match counts.
[[nodiscard]] double smoothed_sequence_probability(std::span<const std::size_t> matches,
                                                   std::size_t cohort, double beta, double h);

/// Same as above, counting for each position i how many cohort workers gave
/// sequence[i] as their (offset + i)-th answer. Every cohort member must have
/// at least offset + sequence.size() answers.
[[nodiscard]] double target_probability(std::span<const std::string> sequence, std::size_t offset,
                                        std::span<const WorkerSequence> cohort, double beta, double h);

/// P(X >= w) for X ~ Binomial(W, p), summed over the upper tail in log space.
[[nodiscard]] double binomial_tail(std::size_t w, std::size_t big_w, double p);

/// Tests every (offset, length >= s_min) window; see ListWalkReport.
/// Windows nested inside another window of the same worker set are dropped.
/// Output is ordered by (offset, length, first worker).
[[nodiscard]] ListWalkReport scan(const AnswerStream& stream, const ListWalkConfig& cfg);

/// scan() on prefixes step, 2*step, ... and n; returns affected_hits per prefix.
[[nodiscard]] std::vector<AffectedPoint> affected_series(const AnswerStream& stream,
                                                         const ListWalkConfig& cfg, std::size_t step);

[[nodiscard]] nlohmann::json to_json(const ListWalkReport& report, const ListWalkConfig& cfg);

}  // namespace crowdest
