#include "crowdest/heuristics.hpp"

#include "crowdest/error.hpp"
#include "crowdest/random.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <unordered_map>

namespace crowdest {

namespace {

// Per worker (first-appearance order), the record positions eligible for removal.
struct Eligible {
  std::vector<std::vector<std::size_t>> positions;
};

Eligible group_by_worker(const AnswerStream& stream, const std::vector<bool>& eligible) {
  Eligible out;
  std::unordered_map<std::string_view, std::size_t> slot;
  for (std::size_t i = 0; i < stream.size(); ++i) {
    auto [it, inserted] = slot.try_emplace(stream[i].worker_id, out.positions.size());
    if (inserted) out.positions.emplace_back();
    if (eligible[i]) out.positions[it->second].push_back(i);
  }
  return out;
}

AnswerStream truncate(const AnswerStream& stream, const std::vector<bool>& eligible,
                      const HeuristicConfig& cfg) {
  cfg.validate();
  const Eligible groups = group_by_worker(stream, eligible);
  std::vector<std::size_t> counts;
  counts.reserve(groups.positions.size());
  for (const auto& p : groups.positions) counts.push_back(p.size());
  const double quota = top_t_quota(counts, cfg.t);

  Rng rng(cfg.seed);
  std::vector<bool> drop(stream.size(), false);
  for (const auto& positions : groups.positions) {
    const std::size_t remove = removal_count(positions.size(), quota, cfg.r);
    if (remove == 0) continue;
    for (std::size_t k : rng.choose(positions.size(), remove)) drop[positions[k]] = true;
  }

  std::vector<AnswerRecord> kept;
  kept.reserve(stream.size());
  for (std::size_t i = 0; i < stream.size(); ++i) {
    if (!drop[i]) kept.push_back(stream[i]);
  }
  return AnswerStream(std::move(kept));
}

}  // namespace

std::string_view to_string(HeuristicKind kind) {
  return kind == HeuristicKind::cluster ? "cluster" : "f1";
}

void HeuristicConfig::validate() const {
  if (t < 1) throw DomainError("heuristic t must be >= 1");
  if (!(r >= 0.0 && r < 1.0)) throw DomainError("heuristic r must lie in [0, 1)");
  if (repetitions < 1) throw DomainError("heuristic repetitions must be >= 1");
}

std::size_t removal_count(std::size_t count, double quota, double r) {
  const double excess = std::max(static_cast<double>(count) - quota, 0.0);
  const auto over = static_cast<std::size_t>(std::ceil(excess));
  const auto cap = static_cast<std::size_t>(std::floor(r * static_cast<double>(count)));
  return std::min(over, cap);
}

double top_t_quota(std::vector<std::size_t> counts, std::size_t t) {
  if (counts.empty()) return 0.0;
  const std::size_t take = std::min(t, counts.size());
  std::partial_sort(counts.begin(), counts.begin() + static_cast<std::ptrdiff_t>(take), counts.end(),
                    std::greater<>());
  const double sum = std::accumulate(counts.begin(), counts.begin() + static_cast<std::ptrdiff_t>(take), 0.0);
  return sum / static_cast<double>(take);
}

AnswerStream cluster_truncate(const AnswerStream& stream, const HeuristicConfig& cfg) {
  return truncate(stream, std::vector<bool>(stream.size(), true), cfg);
}

AnswerStream f1_truncate(const AnswerStream& stream, const HeuristicConfig& cfg) {
  const auto ids = answer_ids(stream);
  std::vector<std::size_t> occurrences;
  for (std::size_t id : ids) {
    if (id >= occurrences.size()) occurrences.resize(id + 1, 0);
    ++occurrences[id];
  }
  std::vector<bool> singleton(stream.size());
  for (std::size_t i = 0; i < ids.size(); ++i) singleton[i] = occurrences[ids[i]] == 1;
  return truncate(stream, singleton, cfg);
}

AnswerStream apply_heuristic(const AnswerStream& stream, const HeuristicConfig& cfg) {
  return cfg.kind == HeuristicKind::cluster ? cluster_truncate(stream, cfg) : f1_truncate(stream, cfg);
}

std::vector<AnswerStream> heuristic_resamples(const AnswerStream& stream, const HeuristicConfig& cfg) {
  cfg.validate();
  std::vector<AnswerStream> out;
  out.reserve(cfg.repetitions);
  for (std::size_t rep = 0; rep < cfg.repetitions; ++rep) {
    HeuristicConfig sub = cfg;
    if (rep > 0) sub.seed = derive_seed(cfg.seed, rep);
    out.push_back(apply_heuristic(stream, sub));
  }
  return out;
}

}  // namespace crowdest
