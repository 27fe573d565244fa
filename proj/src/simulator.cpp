#include "crowdest/simulator.hpp"

#include "crowdest/error.hpp"
#include "crowdest/estimators.hpp"
#include "crowdest/random.hpp"

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

namespace crowdest {

namespace {

constexpr std::uint64_t kInterleaveStream = 0x1f2e3d4c5b6a7988ULL;
constexpr std::uint64_t kCountStream = 0x0badc0ffee0ddf00ULL;

std::vector<double> normalize(std::vector<double> w) {
  // Compensated sum so the normalized weights add to 1 within a few ulps.
  long double total = 0.0L;
  for (double x : w) total += x;
  for (double& x : w) x = static_cast<double>(static_cast<long double>(x) / total);
  return w;
}

std::vector<std::size_t> draw_counts(const WorkerModel& model, Rng& rng) {
  std::vector<std::size_t> counts;
  switch (model.count_model) {
    case CountModel::fixed:
      counts.assign(model.num_workers, model.answers_each);
      break;
    case CountModel::explicit_counts:
      if (model.counts.size() != model.num_workers) {
        throw DomainError("explicit worker counts must list one value per worker");
      }
      counts = model.counts;
      break;
    case CountModel::power_law: {
      if (model.min_answers < 1 || model.max_answers < model.min_answers) {
        throw DomainError("power-law answer counts need 1 <= min <= max");
      }
      std::vector<double> pmf;
      for (std::size_t k = model.min_answers; k <= model.max_answers; ++k) {
        pmf.push_back(std::pow(static_cast<double>(k), -model.streaker_exponent));
      }
      const double total = std::accumulate(pmf.begin(), pmf.end(), 0.0);
      for (std::size_t w = 0; w < model.num_workers; ++w) {
        counts.push_back(model.min_answers + rng.weighted(pmf, total));
      }
      break;
    }
  }
  for (std::size_t c : counts) {
    if (c < 1) throw DomainError("every worker must give at least one answer");
  }
  return counts;
}

std::vector<std::size_t> sample_items(const std::vector<double>& weights, std::size_t draws,
                                      bool without_replacement, Rng& rng) {
  std::vector<std::size_t> out;
  out.reserve(draws);
  if (!without_replacement) {
    std::vector<double> cumulative(weights.size());
    std::partial_sum(weights.begin(), weights.end(), cumulative.begin());
    for (std::size_t k = 0; k < draws; ++k) {
      const double target = rng.uniform() * cumulative.back();
      auto it = std::upper_bound(cumulative.begin(), cumulative.end(), target);
      if (it == cumulative.end()) --it;
      out.push_back(static_cast<std::size_t>(it - cumulative.begin()));
    }
    return out;
  }
  // Successive draws renormalize over the items not yet taken.
  std::vector<double> remaining = weights;
  for (std::size_t k = 0; k < draws; ++k) {
    const double total = std::accumulate(remaining.begin(), remaining.end(), 0.0);
    const std::size_t pick = rng.weighted(remaining, total);
    out.push_back(pick);
    remaining[pick] = 0.0;
  }
  return out;
}

}  // namespace

ItemDistribution ItemDistribution::uniform(std::size_t items) {
  return {DistributionKind::uniform, items, 0.0, {}};
}

ItemDistribution ItemDistribution::zipf(std::size_t items, double exponent) {
  return {DistributionKind::zipf, items, exponent, {}};
}

ItemDistribution ItemDistribution::self_similar(std::size_t items, double h) {
  return {DistributionKind::self_similar, items, h, {}};
}

ItemDistribution ItemDistribution::geometric(std::size_t items, double h) {
  return {DistributionKind::geometric, items, h, {}};
}

ItemDistribution ItemDistribution::from_weights(std::vector<double> weights) {
  const std::size_t n = weights.size();
  return {DistributionKind::explicit_weights, n, 0.0, std::move(weights)};
}

std::vector<double> ItemDistribution::weights() const {
  if (items == 0) throw DomainError("item distribution needs at least one item");
  std::vector<double> w(items);
  switch (kind) {
    case DistributionKind::uniform:
      std::fill(w.begin(), w.end(), 1.0);
      break;
    case DistributionKind::zipf:
      if (!(param >= 0.0)) throw DomainError("zipf exponent must be >= 0");
      for (std::size_t i = 0; i < items; ++i) w[i] = std::pow(static_cast<double>(i + 1), -param);
      break;
    case DistributionKind::self_similar: {
      if (!(param > 0.0 && param < 1.0)) throw DomainError("self-similar h must lie in (0, 1)");
      const double theta = std::log(1.0 - param) / std::log(param);
      const double n = static_cast<double>(items);
      for (std::size_t i = 0; i < items; ++i) {
        w[i] = std::pow(static_cast<double>(i + 1) / n, theta) - std::pow(static_cast<double>(i) / n, theta);
      }
      break;
    }
    case DistributionKind::geometric: {
      if (!(param > 0.0 && param < 1.0)) throw DomainError("geometric h must lie in (0, 1)");
      const double log_h = std::log(param);
      for (std::size_t i = 0; i < items; ++i) {
        // Deep-tail weights would underflow; keep them strictly positive.
        w[i] = std::max((1.0 - param) * std::exp(static_cast<double>(i) * log_h),
                        std::numeric_limits<double>::min());
      }
      break;
    }
    case DistributionKind::explicit_weights:
      if (explicit_weights.size() != items) throw DomainError("explicit weights must list N values");
      for (std::size_t i = 0; i < items; ++i) {
        if (!(explicit_weights[i] > 0.0) || !std::isfinite(explicit_weights[i])) {
          throw DomainError("explicit weights must be positive and finite");
        }
      }
      w = explicit_weights;
      break;
  }
  return normalize(std::move(w));
}

std::string item_label(std::size_t index, std::size_t items) {
  const std::size_t width = std::to_string(std::max<std::size_t>(items, 1)).size();
  return fmt::format("item_{:0{}}", index + 1, width);
}

std::vector<std::size_t> GroundTruth::list_walk_indices() const {
  std::vector<std::size_t> out;
  for (std::size_t i = 0; i < is_list_walk.size(); ++i) {
    if (is_list_walk[i]) out.push_back(i);
  }
  return out;
}

SimulationOutput simulate(const ItemDistribution& dist, const WorkerModel& workers,
                          const std::optional<ListWalkerSpec>& lists, std::uint64_t seed) {
  if (workers.num_workers < 1 && !(lists && lists->count > 0)) {
    throw DomainError("simulation needs at least one worker");
  }
  const std::vector<double> weights = dist.weights();
  const std::size_t items = weights.size();

  Rng count_rng(derive_seed(seed, kCountStream));
  const std::vector<std::size_t> counts = draw_counts(workers, count_rng);

  struct Source {
    std::string id;
    std::vector<std::size_t> items;
    bool list_walker = false;
  };
  std::vector<Source> sources;
  for (std::size_t w = 0; w < counts.size(); ++w) {
    if (workers.without_replacement && counts[w] > items) {
      throw DomainError(fmt::format("worker w{} requests {} draws without replacement from {} items", w,
                                    counts[w], items));
    }
    Rng rng(derive_seed(seed, w));
    sources.push_back({fmt::format("w{}", w), sample_items(weights, counts[w], workers.without_replacement, rng), false});
  }

  if (lists && lists->count > 0) {
    std::vector<std::size_t> order = lists->list_order;
    if (order.empty()) {
      order.resize(items);
      std::iota(order.begin(), order.end(), 0);
    }
    for (std::size_t idx : order) {
      if (idx >= items) throw DomainError("list order names an item outside the distribution");
    }
    if (lists->start_offsets.empty() ||
        (lists->start_offsets.size() != 1 && lists->start_offsets.size() != lists->count)) {
      throw DomainError("list walkers need one start offset, or one per walker");
    }
    for (std::size_t k = 0; k < lists->count; ++k) {
      const std::size_t start = lists->start_offsets.size() == 1 ? lists->start_offsets[0] : lists->start_offsets[k];
      if (start + lists->answers_each > order.size()) {
        throw DomainError(fmt::format("list walker lw{} runs past the end of the {}-item list", k, order.size()));
      }
      Source src{fmt::format("lw{}", k), {}, true};
      src.items.assign(order.begin() + static_cast<std::ptrdiff_t>(start),
                       order.begin() + static_cast<std::ptrdiff_t>(start + lists->answers_each));
      sources.push_back(std::move(src));
    }
  }

  // Interleave per-worker sequences into one arrival order.
  std::vector<std::size_t> next(sources.size(), 0);
  std::vector<double> remaining(sources.size());
  std::size_t total = 0;
  for (std::size_t s = 0; s < sources.size(); ++s) {
    remaining[s] = static_cast<double>(sources[s].items.size());
    total += sources[s].items.size();
  }
  Rng mix_rng(derive_seed(seed, kInterleaveStream));
  std::vector<AnswerRecord> records;
  records.reserve(total);
  GroundTruth truth;
  truth.items = items;
  truth.weights = weights;
  truth.is_list_walk.reserve(total);
  std::size_t cursor = 0;
  for (std::size_t k = 0; k < total; ++k) {
    std::size_t s = 0;
    if (workers.interleaving == Interleaving::random) {
      s = mix_rng.weighted(remaining, static_cast<double>(total - k));
    } else {
      while (next[cursor % sources.size()] >= sources[cursor % sources.size()].items.size()) ++cursor;
      s = cursor % sources.size();
      ++cursor;
    }
    const std::size_t item = sources[s].items[next[s]++];
    remaining[s] -= 1.0;
    records.push_back({k, sources[s].id, item_label(item, items)});
    truth.is_list_walk.push_back(sources[s].list_walker);
  }
  return {AnswerStream(std::move(records)), std::move(truth)};
}

nlohmann::json truth_to_json(const GroundTruth& truth) {
  return {{"N", truth.items}, {"weights", truth.weights}, {"list_walk_indices", truth.list_walk_indices()}};
}

std::vector<StreakerStudyRow> streaker_impact_study(const ItemDistribution& dist,
                                                    const std::vector<std::size_t>& worker_counts,
                                                    const StreakerStudyConfig& config, std::uint64_t seed) {
  if (config.repetitions < 1) throw DomainError("streaker study needs at least one repetition");
  const double truth = static_cast<double>(dist.items);
  std::vector<StreakerStudyRow> rows;
  for (std::size_t k : worker_counts) {
    if (k < 1 || k > config.hits) throw DomainError("worker count must lie in [1, hits]");
    WorkerModel model;
    model.num_workers = k;
    model.count_model = CountModel::explicit_counts;
    model.counts.assign(k, config.hits / k);
    for (std::size_t i = 0; i < config.hits % k; ++i) ++model.counts[i];
    model.without_replacement = config.without_replacement;

    StreakerStudyRow row{.num_workers = k, .runs = config.repetitions};
    double sum = 0.0;
    for (std::size_t rep = 0; rep < config.repetitions; ++rep) {
      const auto sim = simulate(dist, model, std::nullopt, derive_seed(derive_seed(seed, k), rep));
      const auto est = estimate_chao92(compute_fstat(sim.stream));
      if (est.low_confidence) {
        ++row.flagged_runs;
        sum = std::numeric_limits<double>::infinity();
      } else {
        sum += est.value - truth;
      }
    }
    row.mean_error = sum / static_cast<double>(config.repetitions);
    rows.push_back(row);
  }
  return rows;
}

}  // namespace crowdest
