#include "crowdest/error.hpp"
#include "crowdest/estimators.hpp"
#include "crowdest/paygo.hpp"
#include "crowdest/simulator.hpp"

#include "generators.hpp"
#include "oracles.hpp"

#include <gtest/gtest.h>

#include <cmath>

using namespace crowdest;

namespace {

MeanCurve linear_curve(std::size_t n) {
  MeanCurve c;
  for (std::size_t k = 1; k <= n; ++k) c.points.push_back({static_cast<double>(k), static_cast<double>(k)});
  return c;
}

AnswerStream uniform_stream(std::size_t items, std::size_t draws, std::uint64_t seed) {
  WorkerModel one;
  one.answers_each = draws;
  one.without_replacement = false;
  return simulate(ItemDistribution::uniform(items), one, std::nullopt, seed).stream;
}

}  // namespace

TEST(Shen, FormulaValue) {
  // 10 (1 - 0.99^10), evaluated at 30 digits offline.
  EXPECT_NEAR(shen_formula(10.0, 0.9, 10), 0.956179249911955, 1e-13);
  EXPECT_DOUBLE_EQ(shen_formula(10.0, 0.9, 0), 0.0);
  EXPECT_DOUBLE_EQ(shen_formula(0.0, 0.9, 10), 0.0);
  EXPECT_DOUBLE_EQ(shen_formula(-3.0, 0.9, 10), 0.0);
  EXPECT_NEAR(shen_formula(10.0, 0.9, 100000), 10.0, 1e-9);
}

TEST(Shen, MonotoneAndBounded) {
  double prev = 0.0;
  for (std::size_t m = 0; m <= 2000; m += 7) {
    const double v = shen_formula(12.5, 0.7, m);
    EXPECT_GE(v, prev);
    EXPECT_LE(v, 12.5);
    prev = v;
  }
  // Discovery probability above 1 is clamped: everything unseen arrives at once.
  EXPECT_DOUBLE_EQ(shen_formula(0.5, 0.1, 3), 0.5);
}

TEST(Shen, PredictUsesChao92Gap) {
  const auto fs = FrequencyStatistics::from_histogram({{1, 4}, {2, 2}, {4, 1}, {8, 1}});
  const auto chao = estimate_chao92(fs);
  const double w = chao.value - static_cast<double>(fs.c);
  const auto p = shen_predict(fs, 25);
  EXPECT_EQ(p.method, PaygoMethod::shen);
  EXPECT_EQ(p.m, 25u);
  EXPECT_DOUBLE_EQ(p.expected_new_uniques, shen_formula(w, sample_coverage(fs), 25));
  EXPECT_LE(p.expected_new_uniques, w);
  EXPECT_DOUBLE_EQ(shen_predict(FrequencyStatistics::from_histogram({{3, 5}}), 10).expected_new_uniques, 0.0);
}

TEST(MeanSac, IdentityPermutationEqualsObserved) {
  const auto s = gen::stream_of({"a", "b", "a", "c", "b", "d"});
  const auto curve = mean_sac(s, 1, 5, true);
  const auto expected = to_mean_curve(sac(s));
  ASSERT_EQ(curve.points.size(), expected.points.size());
  for (std::size_t i = 0; i < curve.points.size(); ++i) {
    EXPECT_EQ(curve.points[i].hits, expected.points[i].hits);
    EXPECT_EQ(curve.points[i].unique, expected.points[i].unique);
  }
}

TEST(MeanSac, TrivialCases) {
  const auto same = mean_sac(gen::stream_of({"x", "x", "x", "x"}), 13, 1);
  for (const auto& p : same.points) EXPECT_EQ(p.unique, 1.0);
  const auto ab = mean_sac(gen::stream_of({"a", "b"}), 9, 2);
  EXPECT_EQ(ab.points[0].unique, 1.0);
  EXPECT_EQ(ab.points[1].unique, 2.0);
  EXPECT_THROW((void)mean_sac(gen::stream_of({"a"}), 0, 1), DomainError);
}

TEST(MeanSac, ConvergesToExactRarefaction) {
  // Class counts 6, 3, 2, 1, 1, 1: compare against the hypergeometric mean.
  std::vector<std::string> answers;
  const std::vector<std::size_t> counts = {6, 3, 2, 1, 1, 1};
  for (std::size_t c = 0; c < counts.size(); ++c) {
    for (std::size_t k = 0; k < counts[c]; ++k) answers.push_back("c" + std::to_string(c));
  }
  const auto exact = oracle::exact_mean_sac(counts);
  const auto curve = mean_sac(gen::stream_of(answers), 20000, 42);
  for (std::size_t k = 0; k < exact.size(); ++k) {
    EXPECT_NEAR(curve.points[k].unique, exact[k], 0.03) << k;
  }
  EXPECT_DOUBLE_EQ(curve.points.back().unique, 6.0);
}

TEST(MeanSac, SeededDeterminism) {
  const auto s = uniform_stream(30, 80, 3);
  const auto a = mean_sac(s, 25, 9);
  const auto b = mean_sac(s, 25, 9);
  const auto c = mean_sac(s, 25, 10);
  bool differs = false;
  for (std::size_t i = 0; i < a.points.size(); ++i) {
    EXPECT_EQ(a.points[i].unique, b.points[i].unique);
    differs = differs || a.points[i].unique != c.points[i].unique;
  }
  EXPECT_TRUE(differs);
}

TEST(SplineFit, KnotsAndReproduction) {
  EXPECT_EQ(knot_stride(10), 1u);
  EXPECT_EQ(knot_stride(100), 4u);
  const auto s = uniform_stream(50, 203, 11);
  const auto curve = mean_sac(s, 50, 11);
  const auto model = spline_fit(curve);
  EXPECT_EQ(model.knots.back().hits, 203.0);
  EXPECT_EQ(model.knots[1].hits - model.knots[0].hits, 8.0);
  for (const auto& p : curve.points) EXPECT_NEAR(model(p.hits), p.unique, 0.5) << p.hits;
  // Non-decreasing over the observed range.
  double prev = model(1.0);
  for (double x = 1.0; x <= 203.0; x += 0.25) {
    EXPECT_GE(model(x), prev - 1e-9);
    prev = model(x);
  }
}

TEST(SplineFit, NeedsFourPoints) {
  EXPECT_THROW((void)spline_fit(linear_curve(3)), DomainError);
  EXPECT_NO_THROW((void)spline_fit(linear_curve(4)));
}

TEST(SplineFit, ExactCubicCurve) {
  MeanCurve c;
  for (int k = 1; k <= 60; ++k) {
    const double x = k;
    c.points.push_back({x, 2.0 + 0.5 * x + 0.02 * x * x - 0.0001 * x * x * x});
  }
  const auto model = spline_fit(c);
  for (double x = 1.0; x <= 60.0; x += 0.1) {
    EXPECT_NEAR(model(x), 2.0 + 0.5 * x + 0.02 * x * x - 0.0001 * x * x * x, 1e-6);
  }
}

TEST(SplinePredict, LinearCurve) {
  const auto model = spline_fit(linear_curve(100));
  EXPECT_DOUBLE_EQ(spline_predict(model, 100, 0).expected_new_uniques, 0.0);
  EXPECT_NEAR(spline_predict(model, 100, 20).expected_new_uniques, 20.0, 1e-9);
  EXPECT_THROW((void)spline_predict(model, 99, 5), DomainError);
}

TEST(SplinePredict, PlateauGivesNothing) {
  MeanCurve c;
  for (int k = 1; k <= 100; ++k) c.points.push_back({static_cast<double>(k), static_cast<double>(std::min(k, 40))});
  const auto model = spline_fit(c);
  EXPECT_NEAR(spline_predict(model, 100, 10).expected_new_uniques, 0.0, 1e-9);
}

TEST(SplinePredict, MonotoneInMAndBounded) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const auto s = uniform_stream(80, 120, 100 + seed);
    const auto model = spline_fit(mean_sac(s, 30, seed));
    const double slope = std::max(model.curve.derivative(120.0), 0.0);
    double prev = 0.0;
    for (std::size_t m = 0; m <= 400; m += 5) {
      const double v = spline_predict(model, 120, m).expected_new_uniques;
      EXPECT_GE(v, prev - 1e-12) << seed << " " << m;
      EXPECT_GE(v, 0.0);
      EXPECT_LE(v, slope * static_cast<double>(m) + 1e-12);
      prev = v;
    }
  }
}

TEST(PaygoPredict, OrderingAndHeuristic) {
  const auto s = uniform_stream(60, 150, 4);
  PaygoOptions opt;
  opt.permutations = 20;
  opt.seed = 4;
  const auto preds = paygo_predict(s, opt);
  ASSERT_EQ(preds.size(), 2 * opt.m_values.size());
  for (std::size_t i = 0; i < opt.m_values.size(); ++i) {
    EXPECT_EQ(preds[2 * i].m, opt.m_values[i]);
    EXPECT_EQ(preds[2 * i].method, PaygoMethod::shen);
    EXPECT_EQ(preds[2 * i + 1].method, PaygoMethod::spline);
    EXPECT_GE(preds[2 * i + 1].expected_new_uniques, 0.0);
  }
  EXPECT_EQ(preds[0].expected_new_uniques, shen_predict(compute_fstat(s), 10).expected_new_uniques);

  HeuristicConfig h;
  h.seed = 1;
  opt.heuristic = h;
  EXPECT_EQ(paygo_predict(s, opt).size(), preds.size());
}
