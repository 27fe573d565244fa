#pragma once

// Ground-truth answer-stream generator: workers drawing from a known item
// distribution (optionally without replacement), skewed worker activity, and
// optional list walkers copying a fixed item order.

#include "crowdest/stream.hpp"

#include "json.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace crowdest {

enum class DistributionKind { uniform, zipf, self_similar, geometric, explicit_weights };

struct ItemDistribution {
  DistributionKind kind = DistributionKind::uniform;
  std::size_t items = 0;  // N
  /// Zipf exponent s (p_i ~ i^-s) or self-similar / geometric skew h.
  double param = 1.0;
  std::vector<double> explicit_weights;

  static ItemDistribution uniform(std::size_t items);
  static ItemDistribution zipf(std::size_t items, double exponent);
  /// Gray et al. self-similar 80/20 law: a fraction 1-h of the mass falls on
  /// the first h*N items, recursively. p_i = (i/N)^theta - ((i-1)/N)^theta,
  /// theta = log(1-h) / log(h).
  static ItemDistribution self_similar(std::size_t items, double h);
  /// p_i ~ (1-h) h^(i-1): every draw without replacement picks the most
  /// likely remaining item with probability ~1-h.
  static ItemDistribution geometric(std::size_t items, double h);
  static ItemDistribution from_weights(std::vector<double> weights);

  /// Normalized probabilities p_1..p_N (all strictly positive).
  /// Throws DomainError for invalid parameters.
  [[nodiscard]] std::vector<double> weights() const;
};

/// Answer label for 0-based item index i: "item_" + zero-padded (i+1).
[[nodiscard]] std::string item_label(std::size_t index, std::size_t items);

enum class CountModel { fixed, power_law, explicit_counts };
enum class Interleaving { round_robin, random };

struct WorkerModel {
  std::size_t num_workers = 1;
  CountModel count_model = CountModel::fixed;
  std::size_t answers_each = 10;          // fixed model
  double streaker_exponent = 1.5;         // power-law model: P(k) ~ k^-exponent
  std::size_t min_answers = 1;            // power-law support [min, max]
  std::size_t max_answers = 100;
  std::vector<std::size_t> counts;        // explicit model, one per worker
  bool without_replacement = true;
  Interleaving interleaving = Interleaving::random;
};

struct ListWalkerSpec {
  std::size_t count = 0;
  /// Item indices in walking order; empty means index ("alphabetical") order.
  std::vector<std::size_t> list_order;
  /// Start position in the list for each walker; a single value applies to all.
  std::vector<std::size_t> start_offsets = {0};
  std::size_t answers_each = 10;
};

struct GroundTruth {
  std::size_t items = 0;
  std::vector<double> weights;
  std::vector<bool> is_list_walk;  // per record

  [[nodiscard]] std::vector<std::size_t> list_walk_indices() const;
};

struct SimulationOutput {
  AnswerStream stream;
  GroundTruth truth;
};

/// Sampling workers are named "w<k>", list walkers "lw<k>". Throws DomainError
/// for inconsistent configurations, e.g. more without-replacement draws than items.
[[nodiscard]] SimulationOutput simulate(const ItemDistribution& dist, const WorkerModel& workers,
                                        const std::optional<ListWalkerSpec>& lists, std::uint64_t seed);

/// {"N": ..., "weights": [...], "list_walk_indices": [...]}
[[nodiscard]] nlohmann::json truth_to_json(const GroundTruth& truth);

struct StreakerStudyRow {
  std::size_t num_workers = 0;
  double mean_error = 0.0;      // mean signed Chao92 error; +inf if any run diverged
  std::size_t flagged_runs = 0; // runs whose coverage had to be clamped
  std::size_t runs = 0;
};

struct StreakerStudyConfig {
  std::size_t hits = 200;          // fixed total n, split evenly across workers
  std::size_t repetitions = 20;
  bool without_replacement = true;
};

/// For each worker count, mean Chao92 error when the same n answers come from
/// that many equally active workers.
[[nodiscard]] std::vector<StreakerStudyRow> streaker_impact_study(
    const ItemDistribution& dist, const std::vector<std::size_t>& worker_counts,
    const StreakerStudyConfig& config, std::uint64_t seed);

}  // namespace crowdest
