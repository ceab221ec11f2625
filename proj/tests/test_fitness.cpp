#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <vector>

#include "rpne/fitness.hpp"
#include "rpne/random.hpp"

using namespace rpne;

namespace {

constexpr double kNaN = std::numeric_limits<double>::quiet_NaN();
constexpr double kInf = std::numeric_limits<double>::infinity();

std::vector<double> ramp(std::size_t n, double lo = 1.0, double step = 0.25) {
    std::vector<double> v(n);
    for (std::size_t i = 0; i < n; ++i) v[i] = lo + step * static_cast<double>(i);
    return v;
}

} // namespace

TEST(PtptCase, BranchFixtures) {
    EXPECT_EQ(ptpt_case(0, 0, 1100), 1100);
    EXPECT_EQ(ptpt_case(2, 2, 1100), 1100);
    EXPECT_EQ(ptpt_case(-2, 2, 1100), 1000);
    EXPECT_EQ(ptpt_case(kNaN, kNaN, 1100), 1100);
    EXPECT_EQ(ptpt_case(kNaN, 5, 1100), -1100);
    EXPECT_EQ(ptpt_case(5, kNaN, 1100), -1100);
}

TEST(PtptCase, InfinityCountsAsInvalid) {
    EXPECT_EQ(ptpt_case(kInf, 5, 1100), -1100);
    EXPECT_EQ(ptpt_case(-kInf, kNaN, 1100), 1100);
}

TEST(PtptCase, RatioAndRounding) {
    EXPECT_EQ(ptpt_case(1, 2, 1000), 500);
    EXPECT_EQ(ptpt_case(0, 3, 1000), 0);
    // 1000 / 3 = 333.33 -> 333; 1100 * 0.5 - 100 = 450
    EXPECT_EQ(ptpt_case(1, 3, 1000), 333);
    EXPECT_EQ(ptpt_case(-1, 2, 1100), 450);
    // 1000 * 0.0005 = 0.5 rounds away from zero; with the sign penalty,
    // 1100 * 1/2200 - 100 = -99.5 rounds to -100.
    EXPECT_EQ(ptpt_case(1, 2000, 1000), 1);
    EXPECT_EQ(ptpt_case(-1, 2200, 1100), -100);
    EXPECT_EQ(round_half_away(2.5), 3);
    EXPECT_EQ(round_half_away(-2.5), -3);
}

TEST(PtptCase, RangeSymmetryAndScaleFamily) {
    Rng rng(1);
    for (int i = 0; i < 100000; ++i) {
        const double a = uniform_real(rng, -10, 10);
        const double b = uniform_real(rng, -10, 10);
        const auto s = ptpt_case(a, b, 1100);
        ASSERT_GE(s, -1100);
        ASSERT_LE(s, 1100);
        ASSERT_EQ(s, ptpt_case(b, a, 1100));
        // Power-of-two scale factors keep the products exact.
        const double k = std::ldexp(1.0, static_cast<int>(uniform_index(rng, 40)) - 20);
        ASSERT_EQ(s, ptpt_case(k * a, k * b, 1100)) << a << " " << b << " " << k;
    }
}

TEST(AggregatePtpt, PerfectRow) {
    const auto y = ramp(512);
    const auto rec = aggregate_ptpt(y, y, 1000);
    EXPECT_EQ(rec.score, 512000.0);
    EXPECT_EQ(rec.c1, 0u);
    EXPECT_EQ(rec.c2, 0u);
}

TEST(AggregatePtpt, OppositeSignsEqualMagnitude) {
    const auto y = ramp(512);
    std::vector<double> yhat(y.size());
    for (std::size_t i = 0; i < y.size(); ++i) yhat[i] = -y[i];
    EXPECT_EQ(aggregate_ptpt(yhat, y, 1100).score, 512000.0);
}

TEST(AggregatePtpt, EmptyRowScoresZero) {
    EXPECT_EQ(aggregate_ptpt(std::span<const double>{}, std::span<const double>{}, 1100).score, 0.0);
}

TEST(AggregatePtpt, InvalidBookkeeping) {
    const std::vector<double> y{1, kNaN, kNaN, 4, kInf};
    const std::vector<double> yhat{1, kNaN, 3, kNaN, kNaN};
    const auto rec = aggregate_ptpt(yhat, y, 1100);
    EXPECT_EQ(rec.c1, 2u);
    EXPECT_EQ(rec.c2, 2u);
    EXPECT_EQ(rec.score, 1100.0 + 1100 - 1100 - 1100 + 1100);
}

TEST(PearsonR, PerfectAndAffine) {
    const auto y = ramp(200);
    auto p = pearson_r(y, y);
    EXPECT_TRUE(p.defined);
    EXPECT_EQ(p.r, 1.0);
    EXPECT_EQ(p.c1, 0u);
    EXPECT_EQ(p.c2, 0u);
    Rng rng(2);
    for (int i = 0; i < 200; ++i) {
        const double a = uniform_real(rng, 0.01, 100.0);
        const double b = uniform_real(rng, -100.0, 100.0);
        std::vector<double> pos(y.size()), neg(y.size());
        for (std::size_t k = 0; k < y.size(); ++k) {
            pos[k] = a * y[k] + b;
            neg[k] = -a * y[k] + b;
        }
        EXPECT_NEAR(pearson_r(pos, y).r, 1.0, 1e-12);
        EXPECT_NEAR(pearson_r(neg, y).r, -1.0, 1e-12);
    }
}

TEST(PearsonR, ConstantModelIsUndefined) {
    const auto y = ramp(64);
    const std::vector<double> c(64, 3.0);
    const auto p = pearson_r(c, y);
    EXPECT_FALSE(p.defined);
    EXPECT_EQ(p.r, 0.0);
    EXPECT_FALSE(pearson_r(std::vector<double>{1.0}, std::vector<double>{2.0}).defined);
}

TEST(PearsonR, OnlyValidPairsCount) {
    std::vector<double> y = ramp(100);
    std::vector<double> yhat = y;
    y[3] = kNaN;
    yhat[3] = kNaN;
    yhat[10] = kNaN;
    y[20] = kInf;
    yhat[30] = 1e9; // one wild point on a valid pair does affect r
    const auto p = pearson_r(yhat, y);
    EXPECT_EQ(p.c1, 2u);
    EXPECT_EQ(p.c2, 1u);
    EXPECT_EQ(p.n_valid + p.c1 + p.c2, y.size());
    EXPECT_LT(p.r, 0.9);
    yhat[30] = y[30];
    EXPECT_NEAR(pearson_r(yhat, y).r, 1.0, 1e-15);
}

TEST(CorrScore, PlugInFixtures) {
    EXPECT_EQ(corr_score(1.0, 512, 0, 0, 1000), 512000.0);
    EXPECT_EQ(corr_score(0.0, 512, 0, 512, 1000), 512000.0);
    EXPECT_EQ(corr_score(0.37, 512, 512, 0, 1000), -512000.0);
    EXPECT_NEAR(corr_score(0.5, 100, 10, 5, 1000), 1000 * 0.0625 * 85 - 1000 * 5, 1e-9);
}

TEST(CorrScore, ArgmaxInvariantUnderCommonScaling) {
    Rng rng(3);
    const auto y = ramp(128);
    std::vector<std::vector<double>> models;
    for (int m = 0; m < 20; ++m) {
        std::vector<double> v(y.size());
        for (std::size_t k = 0; k < y.size(); ++k) v[k] = y[k] + uniform_real(rng, -1.0, 1.0) * (1 + m);
        models.push_back(v);
    }
    auto argmax = [&](double scale) {
        std::size_t best = 0;
        double best_score = -1e300;
        for (std::size_t m = 0; m < models.size(); ++m) {
            std::vector<double> v = models[m];
            for (double& x : v) x *= scale;
            const double s = aggregate_corr(v, y, 1000).score;
            if (s > best_score) {
                best_score = s;
                best = m;
            }
        }
        return best;
    };
    const auto ref = argmax(1.0);
    EXPECT_EQ(argmax(0.001), ref);
    EXPECT_EQ(argmax(7.5), ref);
    EXPECT_EQ(argmax(1e6), ref);
}

TEST(AggregateCorr, RecordFields) {
    std::vector<double> y = ramp(50);
    std::vector<double> yhat = y;
    y[0] = kNaN;
    yhat[0] = kNaN;
    const auto rec = aggregate_corr(yhat, y, 1000);
    EXPECT_EQ(rec.c2, 1u);
    ASSERT_TRUE(rec.r2.has_value());
    EXPECT_NEAR(*rec.r2, 1.0, 1e-15);
    EXPECT_NEAR(rec.score, 1000.0 * 49 + 1000.0, 1e-9);
    const std::vector<double> flat(50, 1.0);
    EXPECT_FALSE(aggregate_corr(flat, ramp(50), 1000).r2.has_value());
}

TEST(NanAgreement, MatchingModelOutscoresMismatch) {
    std::vector<double> y = ramp(64);
    for (std::size_t i = 0; i < y.size(); i += 5) y[i] = kNaN;
    const std::vector<double> match = y;
    std::vector<double> mismatch = y;
    mismatch[5] = 2.0;
    for (const double m : {1100.0, 1000.0}) {
        EXPECT_GT(aggregate_ptpt(match, y, m).score, aggregate_ptpt(mismatch, y, m).score);
        EXPECT_GT(aggregate_corr(match, y, m).score, aggregate_corr(mismatch, y, m).score);
    }
}

TEST(PairwiseSum, FixedSplitOrder) {
    std::vector<double> v{1e16, 1.0, -1e16, 1.0, 1, 1, 1, 1, 1, 1, 1, 1};
    const double expect = (((1e16 + 1.0) + -1e16) + 1.0 + 1 + 1) + (1.0 + 1 + 1 + 1 + 1 + 1);
    EXPECT_EQ(pairwise_sum(v), expect);
    EXPECT_EQ(pairwise_sum(ramp(1000, 0, 1)), 499500.0);
}

TEST(FitnessFn, Defaults) {
    EXPECT_EQ(FitnessFn::ptpt().max_case_score, 1100.0);
    EXPECT_EQ(FitnessFn::corr().max_case_score, 1000.0);
    EXPECT_EQ(parse_fitness_kind("corr"), FitnessKind::Correlation);
    EXPECT_THROW(parse_fitness_kind("rmse"), ConfigError);
}
