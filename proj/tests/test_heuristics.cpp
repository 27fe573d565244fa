#include "crowdest/error.hpp"
#include "crowdest/estimators.hpp"
#include "crowdest/heuristics.hpp"
#include "crowdest/random.hpp"
#include "crowdest/simulator.hpp"

#include "generators.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <map>

using namespace crowdest;

namespace {

std::map<std::string, std::size_t> per_worker(const AnswerStream& s) {
  std::map<std::string, std::size_t> out;
  for (const auto& r : s) ++out[r.worker_id];
  return out;
}

bool is_subsequence(const AnswerStream& sub, const AnswerStream& full) {
  std::size_t j = 0;
  for (const auto& r : sub) {
    while (j < full.size() && !(full[j] == r)) ++j;
    if (j == full.size()) return false;
    ++j;
  }
  return true;
}

// Workers with the given counts, each answer distinct per worker so that
// duplication does not matter for cluster_truncate.
AnswerStream workers_with_counts(const std::vector<std::size_t>& counts) {
  std::vector<std::pair<std::string, std::string>> pairs;
  for (std::size_t w = 0; w < counts.size(); ++w) {
    for (std::size_t k = 0; k < counts[w]; ++k) {
      pairs.emplace_back("w" + std::to_string(w), "a" + std::to_string(k));
    }
  }
  return AnswerStream::from_pairs(pairs);
}

HeuristicConfig config(HeuristicKind kind, std::size_t t, double r, std::uint64_t seed) {
  HeuristicConfig cfg;
  cfg.kind = kind;
  cfg.t = t;
  cfg.r = r;
  cfg.seed = seed;
  return cfg;
}

}  // namespace

TEST(RemovalCount, Rule) {
  EXPECT_EQ(removal_count(30, 20.0, 0.4), 10u);
  EXPECT_EQ(removal_count(20, 5.0, 0.4), 8u);
  EXPECT_EQ(removal_count(5, 20.0, 0.4), 0u);
  EXPECT_EQ(removal_count(10, 9.5, 0.4), 1u);  // fractional excess rounds up
  EXPECT_EQ(removal_count(100, 0.0, 0.0), 0u);
}

TEST(TopTQuota, MeanOfLargest) {
  EXPECT_DOUBLE_EQ(top_t_quota({30, 10, 5, 5}, 2), 20.0);
  EXPECT_DOUBLE_EQ(top_t_quota({3, 9}, 10), 6.0);
  EXPECT_DOUBLE_EQ(top_t_quota({}, 10), 0.0);
}

TEST(ClusterTruncate, WorkedExample) {
  const auto s = workers_with_counts({30, 10, 5, 5});
  const auto out = cluster_truncate(s, config(HeuristicKind::cluster, 2, 0.4, 1));
  const auto counts = per_worker(out);
  EXPECT_EQ(counts.at("w0"), 20u);
  EXPECT_EQ(counts.at("w1"), 10u);
  EXPECT_EQ(counts.at("w2"), 5u);
  EXPECT_EQ(counts.at("w3"), 5u);
  EXPECT_TRUE(is_subsequence(out, s));
}

TEST(ClusterTruncate, AllAtOrBelowQuotaIsNoOp) {
  const auto s = workers_with_counts({7, 7, 7});
  EXPECT_EQ(cluster_truncate(s, config(HeuristicKind::cluster, 10, 0.4, 1)), s);
}

TEST(ClusterTruncate, SingleWorkerUnchanged) {
  const auto s = workers_with_counts({100});
  EXPECT_EQ(cluster_truncate(s, config(HeuristicKind::cluster, 10, 0.4, 1)), s);
}

TEST(F1Truncate, StreakerAmongManySamplers) {
  // Streaker holds 20 singletons, fifteen samplers 5 each.
  std::vector<std::pair<std::string, std::string>> pairs;
  for (int k = 0; k < 20; ++k) pairs.emplace_back("s", "s" + std::to_string(k));
  for (int w = 0; w < 15; ++w) {
    for (int k = 0; k < 5; ++k) pairs.emplace_back("w" + std::to_string(w), "w" + std::to_string(w) + "_" + std::to_string(k));
  }
  // Shared answers (doubletons) that must survive.
  pairs.emplace_back("s", "shared");
  pairs.emplace_back("w0", "shared");
  const auto s = AnswerStream::from_pairs(pairs);
  // Top-16 counts: 20 and fifteen 5s -> q = (20 + 75) / 16 = 5.9375.
  // Removal for the streaker: min(ceil(14.0625), floor(8)) = 8.
  const auto out = f1_truncate(s, config(HeuristicKind::f1, 16, 0.4, 4));
  const auto before = compute_fstat(s);
  const auto after = compute_fstat(out);
  EXPECT_EQ(before.singletons() - after.singletons(), 8u);
  EXPECT_EQ(after.doubletons(), before.doubletons());
  EXPECT_EQ(per_worker(out).at("s"), 21u - 8u);
}

TEST(F1Truncate, QuotaFiveExample) {
  // Quota exactly 5 with the streaker inside the top-t set: t = 5 workers
  // with singleton counts {20, 5, 0, 0, 0} gives q = 5.
  std::vector<std::pair<std::string, std::string>> pairs;
  for (int k = 0; k < 20; ++k) pairs.emplace_back("s", "s" + std::to_string(k));
  for (int k = 0; k < 5; ++k) pairs.emplace_back("a", "a" + std::to_string(k));
  for (const char* w : {"b", "c", "d"}) {
    pairs.emplace_back(w, "dup");
  }
  const auto s = AnswerStream::from_pairs(pairs);
  const auto out = f1_truncate(s, config(HeuristicKind::f1, 5, 0.4, 9));
  EXPECT_EQ(per_worker(out).at("s"), 12u);  // removes min(15, 8) = 8
  EXPECT_EQ(per_worker(out).at("a"), 5u);
}

TEST(F1Truncate, NoSingletonsUnchanged) {
  const auto s = gen::pairs_of({{"w0", "x"}, {"w1", "x"}, {"w0", "y"}, {"w0", "y"}});
  EXPECT_EQ(f1_truncate(s, config(HeuristicKind::f1, 10, 0.4, 3)), s);
}

TEST(Heuristics, Properties) {
  Rng rng(2024);
  for (int trial = 0; trial < 400; ++trial) {
    const auto s = gen::random_stream(rng, 80, 40, 6);
    const std::size_t t = 1 + rng.below(6);
    const double r = static_cast<double>(rng.below(10)) / 10.0;
    for (auto kind : {HeuristicKind::cluster, HeuristicKind::f1}) {
      const auto cfg = config(kind, t, r, rng.next());
      const auto out = apply_heuristic(s, cfg);
      ASSERT_TRUE(is_subsequence(out, s));
      EXPECT_EQ(out, apply_heuristic(s, cfg));  // deterministic

      // Per-worker removals bounded by floor(r * a_j) over the eligible answers.
      const auto before = per_worker(s);
      const auto after = per_worker(out);
      std::map<std::string, std::size_t> eligible = before;
      if (kind == HeuristicKind::f1) {
        std::map<std::string, std::size_t> occ;
        for (const auto& rec : s) ++occ[rec.answer];
        eligible.clear();
        for (const auto& rec : s) {
          if (occ[rec.answer] == 1) ++eligible[rec.worker_id];
        }
      }
      for (const auto& [w, k] : before) {
        const std::size_t kept = after.count(w) ? after.at(w) : 0;
        const std::size_t a = eligible.count(w) ? eligible.at(w) : 0;
        EXPECT_LE(k - kept, static_cast<std::size_t>(std::floor(r * static_cast<double>(a))));
      }

      if (kind == HeuristicKind::f1) {
        const auto fin = compute_fstat(s);
        const auto fout = out.empty() ? FrequencyStatistics{} : compute_fstat(out);
        EXPECT_EQ(fin.singletons() - fout.singletons(), s.size() - out.size());
        for (const auto& [j, fj] : fin.f) {
          if (j >= 2) EXPECT_EQ(fout.count(j), fj);
        }
      }
    }
  }
}

TEST(Heuristics, ResamplesShareFirstSeed) {
  Rng rng(5);
  const auto s = gen::random_stream(rng, 60, 50, 3);
  auto cfg = config(HeuristicKind::cluster, 1, 0.5, 77);
  cfg.repetitions = 3;
  const auto res = heuristic_resamples(s, cfg);
  ASSERT_EQ(res.size(), 3u);
  EXPECT_EQ(res[0], apply_heuristic(s, cfg));
}

TEST(Heuristics, ValidatesConfig) {
  auto cfg = config(HeuristicKind::f1, 0, 0.4, 0);
  EXPECT_THROW(cfg.validate(), DomainError);
  cfg.t = 3;
  cfg.r = 1.0;
  EXPECT_THROW(cfg.validate(), DomainError);
  cfg.r = 0.4;
  cfg.repetitions = 0;
  EXPECT_THROW(cfg.validate(), DomainError);
}

TEST(Heuristics, StreakerCorrectionEfficacy) {
  // One streaker gives half the answers without replacement; 20 samplers the rest.
  const auto dist = ItemDistribution::zipf(200, 1.0);
  int better = 0;
  const int seeds = 50;
  for (int s = 0; s < seeds; ++s) {
    WorkerModel wm;
    wm.num_workers = 21;
    wm.count_model = CountModel::explicit_counts;
    wm.counts.assign(21, 10);
    wm.counts[0] = 200;
    wm.without_replacement = true;
    const auto sim = simulate(dist, wm, std::nullopt, 500 + static_cast<std::uint64_t>(s));
    const double raw = estimate_chao92(compute_fstat(sim.stream)).value;
    const auto corrected_stream = f1_truncate(sim.stream, config(HeuristicKind::f1, 10, 0.4, 900 + s));
    const double corrected = estimate_chao92(compute_fstat(corrected_stream)).value;
    if (std::abs(corrected - 200.0) <= std::abs(raw - 200.0)) ++better;
  }
  EXPECT_GE(better, 35);
}
