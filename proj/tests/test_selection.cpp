#include <gtest/gtest.h>

#include <algorithm>
#include <numeric>
#include <vector>

#include "rpne/selection.hpp"

using namespace rpne;

namespace {

std::vector<double> random_scores(Rng& rng, std::size_t n) {
    std::vector<double> s(n);
    for (double& v : s) v = uniform_real(rng, 0.0, 1000.0);
    return s;
}

} // namespace

TEST(Microcosm, AllEqualScores) {
    Rng rng(1);
    const std::vector<double> s(5000, 7.0);
    const auto t = build_microcosm(rng, s);
    ASSERT_EQ(t.thresholds.size(), 99u);
    for (double v : t.thresholds) EXPECT_EQ(v, 7.0);
}

TEST(Microcosm, MedianIndexRule) {
    Rng rng(2);
    std::vector<double> s(100);
    std::iota(s.begin(), s.end(), 1.0);
    std::shuffle(s.begin(), s.end(), rng);
    const auto t = build_microcosm(rng, s);
    EXPECT_TRUE(t.exact);
    EXPECT_EQ(t.thresholds[49], 51.0);
    EXPECT_EQ(t.thresholds[0], 2.0);  // round(0.99) = 1
    EXPECT_EQ(t.thresholds[98], 99.0); // round(98.01) = 98
}

TEST(Microcosm, SmallPopulationUsesExactPercentiles) {
    Rng rng(3);
    const std::vector<double> s{5, 1, 4, 2, 3};
    const auto t = build_microcosm(rng, s);
    EXPECT_TRUE(t.exact);
    EXPECT_EQ(t.sample_size, 5u);
    EXPECT_TRUE(std::is_sorted(t.thresholds.begin(), t.thresholds.end()));
    EXPECT_EQ(t.thresholds[49], 3.0);
}

TEST(Microcosm, SampleIsDrawnWithoutReplacement) {
    Rng rng(4);
    for (int trial = 0; trial < 200; ++trial) {
        auto picked = detail::sample_without_replacement(rng, 150, 100);
        std::sort(picked.begin(), picked.end());
        EXPECT_EQ(std::adjacent_find(picked.begin(), picked.end()), picked.end());
        EXPECT_LT(picked.back(), 150u);
    }
}

TEST(Microcosm, ThresholdsNonDecreasingAndCounted) {
    Rng rng(5);
    const auto s = random_scores(rng, 100000);
    SelectionCounters c;
    const auto t = build_microcosm(rng, s, 100, &c);
    EXPECT_FALSE(t.exact);
    EXPECT_EQ(t.sample_size, 100u);
    EXPECT_TRUE(std::is_sorted(t.thresholds.begin(), t.thresholds.end()));
    EXPECT_EQ(c.largest_sort, 100u);
}

TEST(SelectSurvivors, AllEqualScoresHitTargetOnAverage) {
    Rng rng(6);
    const std::vector<double> s(20000, 1.0);
    double total = 0;
    for (int gen = 0; gen < 20; ++gen) {
        const auto t = build_microcosm(rng, s);
        total += static_cast<double>(select_survivors(s, t, 10000, rng).survivors);
    }
    EXPECT_NEAR(total / 20.0, 10000.0, 500.0);
}

TEST(SelectSurvivors, TopIndividualAlwaysSurvives) {
    for (std::uint64_t seed = 0; seed < 50; ++seed) {
        Rng rng(seed);
        auto s = random_scores(rng, 5000);
        s[1234] = 1e9;
        const auto t = build_microcosm(rng, s);
        for (auto curve : {SurvivalCurve::Step, SurvivalCurve::Linear}) {
            const auto r = select_survivors(s, t, 2500, rng, curve);
            EXPECT_TRUE(r.survives[1234]);
            EXPECT_EQ(r.elite, 1234u);
        }
    }
}

TEST(SelectSurvivors, FullTargetKeepsEveryone) {
    Rng rng(7);
    const auto s = random_scores(rng, 3000);
    const auto t = build_microcosm(rng, s);
    const auto r = select_survivors(s, t, 3000, rng);
    EXPECT_EQ(r.survivors, 3000u);
    EXPECT_TRUE(std::all_of(r.survives.begin(), r.survives.end(), [](auto v) { return v == 1; }));
}

TEST(SelectSurvivors, NoFullPopulationSort) {
    Rng rng(8);
    const auto s = random_scores(rng, 200000);
    SelectionCounters c;
    SelectionConfig cfg;
    const auto r = select_population(s, 100000, rng, cfg, &c);
    EXPECT_EQ(c.records_scanned, s.size());
    EXPECT_LE(c.largest_sort, cfg.sample_size);
    EXPECT_NEAR(static_cast<double>(r.survivors), 100000.0, 2000.0);
}

TEST(SelectSurvivors, MonotoneInScore) {
    // Survival frequency over many trials must not decrease with score.
    Rng rng(9);
    std::vector<double> s(2000);
    std::iota(s.begin(), s.end(), 0.0);
    for (auto curve : {SurvivalCurve::Step, SurvivalCurve::Linear}) {
        std::vector<int> kept(s.size(), 0);
        for (int trial = 0; trial < 400; ++trial) {
            const auto t = build_microcosm(rng, s);
            const auto r = select_survivors(s, t, 1000, rng, curve);
            for (std::size_t i = 0; i < s.size(); ++i) kept[i] += r.survives[i];
        }
        // Compare deciles to smooth out coin-flip noise.
        int prev = -1;
        for (std::size_t d = 0; d < 10; ++d) {
            int sum = 0;
            for (std::size_t i = d * 200; i < (d + 1) * 200; ++i) sum += kept[i];
            EXPECT_GE(sum, prev) << "decile " << d;
            prev = sum;
        }
    }
}

TEST(SelectSurvivors, OverlapWithFullRank) {
    Rng rng(10);
    const auto s = random_scores(rng, 100000);
    double overlap = 0;
    const int gens = 10;
    for (int gen = 0; gen < gens; ++gen) {
        const auto t = build_microcosm(rng, s);
        const auto mc = select_survivors(s, t, 50000, rng);
        const auto fr = full_rank_select(s, 50000);
        std::size_t both = 0;
        for (std::size_t i = 0; i < s.size(); ++i) both += mc.survives[i] && fr.survives[i];
        overlap += static_cast<double>(both) / 50000.0;
    }
    EXPECT_GE(overlap / gens, 0.9);
}

TEST(FullRank, KeepsTopScores) {
    std::vector<double> s(10);
    std::iota(s.begin(), s.end(), 1.0);
    std::reverse(s.begin(), s.end());
    const auto r = full_rank_select(s, 3);
    EXPECT_EQ(r.survivors, 3u);
    EXPECT_TRUE(r.survives[0] && r.survives[1] && r.survives[2]);
    EXPECT_EQ(std::count(r.survives.begin(), r.survives.end(), 1), 3);
}

TEST(FullRank, TiesKeepLowestIndices) {
    const std::vector<double> s(8, 4.0);
    const auto r = full_rank_select(s, 3);
    for (std::size_t i = 0; i < 8; ++i) EXPECT_EQ(r.survives[i], i < 3 ? 1 : 0);
}

TEST(FullRank, ExactCount) {
    Rng rng(11);
    for (std::size_t target : {1u, 17u, 500u, 999u, 2000u}) {
        const auto s = random_scores(rng, 999);
        EXPECT_EQ(full_rank_select(s, target).survivors, std::min<std::size_t>(target, 999));
    }
}

TEST(SelectPopulation, SmallPopulationsFallBackToFullRank) {
    Rng rng(12);
    const auto s = random_scores(rng, 999);
    SelectionCounters c;
    const auto r = select_population(s, 400, rng, SelectionConfig{}, &c);
    EXPECT_EQ(r.survivors, 400u);
    EXPECT_EQ(c.largest_sort, 999u);
}

TEST(SelectionNames, Parse) {
    EXPECT_EQ(parse_selection_method("fullrank"), SelectionMethod::FullRank);
    EXPECT_EQ(parse_survival_curve("linear"), SurvivalCurve::Linear);
    EXPECT_THROW(parse_selection_method("tournament"), ConfigError);
}
