#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "rpne/errors.hpp"
#include "rpne/token.hpp"

namespace rpne {

enum class FitnessKind { PointToPoint, Correlation };

inline constexpr double kDefaultPtptMaxScore = 1100.0;
inline constexpr double kDefaultCorrMaxScore = 1000.0;

inline std::string_view fitness_name(FitnessKind k) { return k == FitnessKind::PointToPoint ? "ptpt" : "corr"; }

inline FitnessKind parse_fitness_kind(std::string_view s) {
    if (s == "ptpt") return FitnessKind::PointToPoint;
    if (s == "corr") return FitnessKind::Correlation;
    throw ConfigError("unknown fitness kind '" + std::string(s) + "' (expected ptpt or corr)");
}

// Fitness function selector plus its per-case ceiling M.
struct FitnessFn {
    FitnessKind kind = FitnessKind::PointToPoint;
    double max_case_score = kDefaultPtptMaxScore;

    static FitnessFn ptpt(double m = kDefaultPtptMaxScore) { return {FitnessKind::PointToPoint, m}; }
    static FitnessFn corr(double m = kDefaultCorrMaxScore) { return {FitnessKind::Correlation, m}; }

    // Best attainable aggregate over n cases.
    double max_score(std::size_t n_cases) const noexcept { return max_case_score * static_cast<double>(n_cases); }
};

struct FitnessRecord {
    double score = 0.0;
    std::size_t c1 = 0; // exactly one of (model, target) invalid
    std::size_t c2 = 0; // both invalid
    std::size_t n_cases = 0;
    std::optional<double> r2; // correlation mode only; empty when r was undefined
};

// Half-away-from-zero rounding.
inline std::int64_t round_half_away(double x) noexcept { return static_cast<std::int64_t>(std::round(x)); }

// Point-to-point score of one case: a magnitude-ratio similarity with a sign
// penalty of M/11 when valid, +M when both values are invalid, -M when
// exactly one is.
inline std::int64_t ptpt_case(double yhat, double y, double m) noexcept {
    const bool vh = is_valid_value(yhat);
    const bool vy = is_valid_value(y);
    const auto full = round_half_away(m);
    if (!vh || !vy) return (vh == vy) ? full : -full;
    const double a = std::fabs(yhat);
    const double b = std::fabs(y);
    const double hi = std::max(a, b);
    if (hi == 0.0) return full;
    const double ratio = std::min(a, b) / hi;
    const bool opposite = (yhat < 0.0 && y > 0.0) || (yhat > 0.0 && y < 0.0);
    return opposite ? round_half_away(m * ratio - m / 11.0) : round_half_away(m * ratio);
}

// Sum of ptpt_case over cases in ascending index order.
inline FitnessRecord aggregate_ptpt(std::span<const double> yhat, std::span<const double> y, double m) {
    if (yhat.size() != y.size()) throw DimensionMismatch("model and target rows differ in length");
    FitnessRecord rec;
    rec.n_cases = y.size();
    std::int64_t total = 0;
    for (std::size_t i = 0; i < y.size(); ++i) {
        total += ptpt_case(yhat[i], y[i], m);
        const bool vh = is_valid_value(yhat[i]);
        const bool vy = is_valid_value(y[i]);
        rec.c1 += (vh != vy);
        rec.c2 += (!vh && !vy);
    }
    rec.score = static_cast<double>(total);
    return rec;
}

// Pairwise (tree) summation: halves split at n/2 down to blocks of 8 summed
// left to right. Deterministic for a given input order.
inline double pairwise_sum(std::span<const double> v) noexcept {
    if (v.size() <= 8) {
        double s = 0.0;
        for (double x : v) s += x;
        return s;
    }
    const std::size_t half = v.size() / 2;
    return pairwise_sum(v.first(half)) + pairwise_sum(v.subspan(half));
}

struct PearsonResult {
    double r = 0.0;
    bool defined = false;
    std::size_t c1 = 0;
    std::size_t c2 = 0;
    std::size_t n_valid = 0;
};

// Pearson r over the pairs where both values are valid; other pairs only
// feed the c1/c2 counts. Undefined (reported as r = 0) when fewer than two
// valid pairs remain or either side has zero variance.
inline PearsonResult pearson_r(std::span<const double> yhat, std::span<const double> y) {
    if (yhat.size() != y.size()) throw DimensionMismatch("model and target rows differ in length");
    PearsonResult out;
    thread_local std::vector<double> a, b, prod;
    a.clear();
    b.clear();
    for (std::size_t i = 0; i < y.size(); ++i) {
        const bool vh = is_valid_value(yhat[i]);
        const bool vy = is_valid_value(y[i]);
        if (vh && vy) {
            a.push_back(yhat[i]);
            b.push_back(y[i]);
        } else if (vh != vy) {
            ++out.c1;
        } else {
            ++out.c2;
        }
    }
    const std::size_t n = a.size();
    out.n_valid = n;
    if (n < 2) return out;

    const double mean_a = pairwise_sum(a) / static_cast<double>(n);
    const double mean_b = pairwise_sum(b) / static_cast<double>(n);
    for (std::size_t i = 0; i < n; ++i) {
        a[i] -= mean_a;
        b[i] -= mean_b;
    }
    prod.resize(n);
    for (std::size_t i = 0; i < n; ++i) prod[i] = a[i] * b[i];
    const double sab = pairwise_sum(prod);
    for (std::size_t i = 0; i < n; ++i) prod[i] = a[i] * a[i];
    const double saa = pairwise_sum(prod);
    for (std::size_t i = 0; i < n; ++i) prod[i] = b[i] * b[i];
    const double sbb = pairwise_sum(prod);

    if (!(saa > 0.0) || !(sbb > 0.0) || !std::isfinite(saa) || !std::isfinite(sbb) || !std::isfinite(sab)) return out;
    double denom = std::sqrt(saa * sbb);
    if (!std::isfinite(denom) || denom == 0.0) denom = std::sqrt(saa) * std::sqrt(sbb);
    const double r = sab / denom;
    if (!std::isfinite(r)) return out;
    out.r = std::clamp(r, -1.0, 1.0);
    out.defined = true;
    return out;
}

// M * r^4 * (N - (c1 + c2)) - M * (c1 - c2)
inline double corr_score(double r, std::size_t n, std::size_t c1, std::size_t c2, double m) noexcept {
    const double r2 = r * r;
    const double valid = static_cast<double>(n) - static_cast<double>(c1 + c2);
    return m * (r2 * r2) * valid - m * (static_cast<double>(c1) - static_cast<double>(c2));
}

inline FitnessRecord aggregate_corr(std::span<const double> yhat, std::span<const double> y, double m) {
    const PearsonResult p = pearson_r(yhat, y);
    FitnessRecord rec;
    rec.n_cases = y.size();
    rec.c1 = p.c1;
    rec.c2 = p.c2;
    if (p.defined) rec.r2 = p.r * p.r;
    rec.score = corr_score(p.r, y.size(), p.c1, p.c2, m);
    return rec;
}

inline FitnessRecord score_row(const FitnessFn& fn, std::span<const double> yhat, std::span<const double> y) {
    return fn.kind == FitnessKind::PointToPoint ? aggregate_ptpt(yhat, y, fn.max_case_score)
                                                : aggregate_corr(yhat, y, fn.max_case_score);
}

} // namespace rpne
