#pragma once

#include <cmath>
#include <limits>

#include "rpne/case_table.hpp"
#include "rpne/genome.hpp"
#include "rpne/interpreter.hpp"

namespace rpne {

inline constexpr double kValidationThreshold = 1e-3; // 0.1% per point
inline constexpr double kRelativeErrorFloor = 1e-12;

struct ValidationReport {
    std::size_t n_test = 0;
    double max_relative_error = 0.0; // +inf when some point disagrees on validity
    std::size_t failing_points = 0;
    bool validated = false;
};

// Relative error of one prediction: |yhat - y| / max(|y|, floor). Invalid
// targets demand an invalid prediction (error 0), valid targets a valid one
// (otherwise error +inf).
inline double relative_error(double yhat, double y, double floor = kRelativeErrorFloor) noexcept {
    const bool vh = std::isfinite(yhat);
    const bool vy = std::isfinite(y);
    if (!vy) return vh ? std::numeric_limits<double>::infinity() : 0.0;
    if (!vh) return std::numeric_limits<double>::infinity();
    return std::fabs(yhat - y) / std::max(std::fabs(y), floor);
}

// A model is validated only if every test point is within the threshold.
inline ValidationReport validate_model(const Genome& genome, const CaseTable& test,
                                       double threshold = kValidationThreshold) {
    ValidationReport rep;
    rep.n_test = test.n_cases();
    for (std::size_t j = 0; j < test.n_cases(); ++j) {
        const double err = relative_error(eval_case(genome, test.row(j)), test.targets()[j]);
        rep.max_relative_error = std::max(rep.max_relative_error, err);
        rep.failing_points += !(err <= threshold);
    }
    rep.validated = rep.n_test > 0 && rep.failing_points == 0;
    return rep;
}

} // namespace rpne
