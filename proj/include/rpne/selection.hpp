#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <numeric>
#include <span>
#include <string>
#include <string_view>
#include <unordered_set>
#include <vector>

#include "rpne/errors.hpp"
#include "rpne/random.hpp"

namespace rpne {

inline constexpr std::size_t kDefaultMicrocosmSample = 100;
inline constexpr std::size_t kPercentileCount = 99; // 1% .. 99%
inline constexpr std::size_t kBucketCount = kPercentileCount + 1;
inline constexpr std::size_t kFullSortBelow = 1000;

enum class SelectionMethod { Microcosm, FullRank };
enum class SurvivalCurve { Step, Linear };

inline std::string_view selection_name(SelectionMethod m) { return m == SelectionMethod::Microcosm ? "microcosm" : "fullrank"; }

inline SelectionMethod parse_selection_method(std::string_view s) {
    if (s == "microcosm") return SelectionMethod::Microcosm;
    if (s == "fullrank") return SelectionMethod::FullRank;
    throw ConfigError("unknown selection '" + std::string(s) + "' (expected microcosm or fullrank)");
}

inline std::string_view curve_name(SurvivalCurve c) { return c == SurvivalCurve::Step ? "step" : "linear"; }

inline SurvivalCurve parse_survival_curve(std::string_view s) {
    if (s == "step") return SurvivalCurve::Step;
    if (s == "linear") return SurvivalCurve::Linear;
    throw ConfigError("unknown survival curve '" + std::string(s) + "' (expected step or linear)");
}

// Instrumentation: how much work selection did. sorted_elements counts every
// element passed to a comparison sort.
struct SelectionCounters {
    std::uint64_t records_scanned = 0;
    std::uint64_t sorted_elements = 0;
    std::uint64_t sort_calls = 0;
    std::uint64_t largest_sort = 0;

    void note_sort(std::size_t n) noexcept {
        sorted_elements += n;
        ++sort_calls;
        largest_sort = std::max<std::uint64_t>(largest_sort, n);
    }
};

// Score thresholds at the 1%..99% grid, estimated from a sorted sample.
struct PercentileTable {
    std::vector<double> thresholds;
    std::size_t sample_size = 0;
    bool exact = false; // built from the whole population

    // Estimated percentile bucket in [0, 99]: the number of thresholds <= score.
    std::size_t bucket(double score) const noexcept {
        return static_cast<std::size_t>(std::upper_bound(thresholds.begin(), thresholds.end(), score) - thresholds.begin());
    }
};

namespace detail {

inline PercentileTable percentiles_of_sorted(std::span<const double> sorted, bool exact) {
    PercentileTable t;
    t.sample_size = sorted.size();
    t.exact = exact;
    t.thresholds.resize(kPercentileCount);
    const double last = static_cast<double>(sorted.size() - 1);
    for (std::size_t k = 1; k <= kPercentileCount; ++k) {
        const double p = static_cast<double>(k) / 100.0;
        t.thresholds[k - 1] = sorted[static_cast<std::size_t>(std::round(p * last))];
    }
    return t;
}

// Floyd's algorithm: `count` distinct indices from [0, n) in O(count).
inline std::vector<std::size_t> sample_without_replacement(Rng& rng, std::size_t n, std::size_t count) {
    std::vector<std::size_t> picked;
    picked.reserve(count);
    std::unordered_set<std::size_t> seen;
    seen.reserve(count * 2);
    for (std::size_t j = n - count; j < n; ++j) {
        const std::size_t t = std::uniform_int_distribution<std::size_t>(0, j)(rng);
        const std::size_t v = seen.insert(t).second ? t : j;
        if (v == j) seen.insert(j);
        picked.push_back(v);
    }
    return picked;
}

} // namespace detail

// Percentile table from a uniform sample of `sample_size` scores. Populations
// smaller than the sample use exact percentiles of the full population.
inline PercentileTable build_microcosm(Rng& rng, std::span<const double> scores,
                                       std::size_t sample_size = kDefaultMicrocosmSample,
                                       SelectionCounters* counters = nullptr) {
    if (scores.empty()) return {};
    std::vector<double> sample;
    bool exact = false;
    if (scores.size() <= sample_size) {
        sample.assign(scores.begin(), scores.end());
        exact = true;
    } else {
        for (std::size_t i : detail::sample_without_replacement(rng, scores.size(), sample_size)) sample.push_back(scores[i]);
    }
    std::sort(sample.begin(), sample.end());
    if (counters) counters->note_sort(sample.size());
    return detail::percentiles_of_sorted(sample, exact);
}

struct SelectionResult {
    std::vector<std::uint8_t> survives;
    std::size_t survivors = 0;
    std::size_t elite = 0; // index forced to survive
};

// Single-pass survivor selection against a percentile table.
//
// One pass buckets every record by estimated percentile and counts bucket
// occupancy; survival probability is then a non-decreasing function of the
// bucket, calibrated on the exact counts so the expected survivor count is
// target_size. The best record seen in the pass always survives.
//
// Step curve: buckets above a cutoff all survive, the cutoff bucket survives
// with the probability that makes up the difference. Linear curve: survival
// ramps linearly across a band of width keep_fraction around the cutoff.
// Per-record coin flips come from a counter-based stream keyed once from rng.
inline SelectionResult select_survivors(std::span<const double> scores, const PercentileTable& table,
                                        std::size_t target_size, Rng& rng, SurvivalCurve curve = SurvivalCurve::Step,
                                        SelectionCounters* counters = nullptr) {
    const std::size_t n = scores.size();
    SelectionResult out;
    out.survives.assign(n, 0);
    if (n == 0) return out;
    const std::uint64_t key = rng();

    std::vector<std::uint8_t> bucket(n);
    std::array<std::size_t, kBucketCount> counts{};
    std::size_t elite = 0;
    for (std::size_t i = 0; i < n; ++i) {
        const auto b = static_cast<std::uint8_t>(table.bucket(scores[i]));
        bucket[i] = b;
        ++counts[b];
        if (scores[i] > scores[elite]) elite = i;
    }
    if (counters) counters->records_scanned += n;
    out.elite = elite;

    if (target_size >= n) {
        std::fill(out.survives.begin(), out.survives.end(), std::uint8_t{1});
        out.survivors = n;
        return out;
    }
    const std::size_t target = std::max<std::size_t>(1, target_size) - 1; // elite accounted separately
    --counts[bucket[elite]];

    std::array<double, kBucketCount> prob{};
    if (curve == SurvivalCurve::Step) {
        std::size_t above = 0;
        for (std::size_t b = kBucketCount; b-- > 0;) {
            if (above + counts[b] >= target) {
                prob[b] = counts[b] ? static_cast<double>(target - above) / static_cast<double>(counts[b]) : 0.0;
                break;
            }
            prob[b] = 1.0;
            above += counts[b];
        }
    } else {
        const double keep = static_cast<double>(target_size) / static_cast<double>(n);
        const double lo = 1.0 - keep * 1.5;
        const double hi = 1.0 - keep * 0.5;
        auto fill = [&](double shift) {
            double expected = 0.0;
            for (std::size_t b = 0; b < kBucketCount; ++b) {
                const double q = (static_cast<double>(b) + 0.5) / static_cast<double>(kBucketCount);
                prob[b] = std::clamp((q - lo + shift) / (hi - lo), 0.0, 1.0);
                expected += prob[b] * static_cast<double>(counts[b]);
            }
            return expected;
        };
        double a = -2.0, z = 2.0;
        for (int it = 0; it < 100; ++it) {
            const double mid = 0.5 * (a + z);
            (fill(mid) < static_cast<double>(target) ? a : z) = mid;
        }
        fill(z);
    }

    for (std::size_t i = 0; i < n; ++i) {
        const double p = prob[bucket[i]];
        const bool keep = p >= 1.0 || (p > 0.0 && counter_uniform(key, i) < p);
        out.survives[i] = keep;
        out.survivors += keep;
    }
    if (!out.survives[elite]) {
        out.survives[elite] = 1;
        ++out.survivors;
    }
    return out;
}

// Baseline: sort everything by score (descending, ties by lower index) and
// keep the first target_size.
inline SelectionResult full_rank_select(std::span<const double> scores, std::size_t target_size,
                                        SelectionCounters* counters = nullptr) {
    const std::size_t n = scores.size();
    SelectionResult out;
    out.survives.assign(n, 0);
    if (n == 0) return out;
    std::vector<std::uint32_t> order(n);
    std::iota(order.begin(), order.end(), 0u);
    std::sort(order.begin(), order.end(), [&](std::uint32_t a, std::uint32_t b) {
        if (scores[a] != scores[b]) return scores[a] > scores[b];
        return a < b;
    });
    if (counters) {
        counters->note_sort(n);
        counters->records_scanned += n;
    }
    const std::size_t keep = std::min(n, target_size);
    for (std::size_t k = 0; k < keep; ++k) out.survives[order[k]] = 1;
    out.survivors = keep;
    out.elite = order[0];
    return out;
}

struct SelectionConfig {
    SelectionMethod method = SelectionMethod::Microcosm;
    std::size_t sample_size = kDefaultMicrocosmSample;
    std::size_t full_sort_below = kFullSortBelow;
    SurvivalCurve curve = SurvivalCurve::Step;
};

// Dispatch used by the generation loop: microcosm selection, or full-rank
// for small populations and when configured.
inline SelectionResult select_population(std::span<const double> scores, std::size_t target_size, Rng& rng,
                              const SelectionConfig& cfg, SelectionCounters* counters = nullptr) {
    if (cfg.method == SelectionMethod::FullRank || scores.size() < cfg.full_sort_below)
        return full_rank_select(scores, target_size, counters);
    const PercentileTable table = build_microcosm(rng, scores, cfg.sample_size, counters);
    return select_survivors(scores, table, target_size, rng, cfg.curve, counters);
}

} // namespace rpne
