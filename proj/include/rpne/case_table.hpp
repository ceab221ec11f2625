#pragma once

#include <cmath>
#include <cstddef>
#include <span>
#include <string>
#include <vector>

#include "rpne/errors.hpp"

namespace rpne {

// Fitness cases: a row-major input matrix [n_cases x arity] and one target
// per case. Targets may be invalid (NaN/Inf); inputs may not.
class CaseTable {
public:
    CaseTable() = default;

    CaseTable(std::size_t arity, std::vector<double> inputs, std::vector<double> targets)
        : arity_(arity), inputs_(std::move(inputs)), targets_(std::move(targets)) {
        if (arity_ == 0) throw DimensionMismatch("case table arity must be at least 1");
        if (inputs_.size() != arity_ * targets_.size())
            throw DimensionMismatch("case table has " + std::to_string(inputs_.size()) + " inputs for " +
                                    std::to_string(targets_.size()) + " cases of arity " + std::to_string(arity_));
        for (double v : inputs_)
            if (!std::isfinite(v)) throw DimensionMismatch("case table inputs must be finite");
        columns_.resize(inputs_.size());
        const auto n = targets_.size();
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t k = 0; k < arity_; ++k) columns_[k * n + i] = inputs_[i * arity_ + k];
    }

    std::size_t arity() const noexcept { return arity_; }
    std::size_t n_cases() const noexcept { return targets_.size(); }

    std::span<const double> row(std::size_t i) const noexcept { return {inputs_.data() + i * arity_, arity_}; }
    // All cases' values of one input variable, contiguous.
    std::span<const double> column(std::size_t k) const noexcept { return {columns_.data() + k * n_cases(), n_cases()}; }
    std::span<const double> targets() const noexcept { return targets_; }
    std::span<const double> inputs() const noexcept { return inputs_; }

    std::size_t invalid_target_count() const noexcept {
        std::size_t n = 0;
        for (double t : targets_) n += !std::isfinite(t);
        return n;
    }

private:
    std::size_t arity_ = 0;
    std::vector<double> inputs_;
    std::vector<double> targets_;
    std::vector<double> columns_;
};

// Outputs of a batch evaluation, row i = individual i, column j = case j.
class EvalMatrix {
public:
    EvalMatrix() = default;
    EvalMatrix(std::size_t rows, std::size_t cols) : rows_(rows), cols_(cols), data_(rows * cols) {}

    void resize(std::size_t rows, std::size_t cols) {
        rows_ = rows;
        cols_ = cols;
        data_.resize(rows * cols);
    }

    std::size_t rows() const noexcept { return rows_; }
    std::size_t cols() const noexcept { return cols_; }
    std::span<double> row(std::size_t i) noexcept { return {data_.data() + i * cols_, cols_}; }
    std::span<const double> row(std::size_t i) const noexcept { return {data_.data() + i * cols_, cols_}; }
    double operator()(std::size_t i, std::size_t j) const noexcept { return data_[i * cols_ + j]; }

private:
    std::size_t rows_ = 0;
    std::size_t cols_ = 0;
    std::vector<double> data_;
};

// Bitwise equality with every NaN equal to every other NaN.
inline bool same_value(double a, double b) noexcept {
    if (std::isnan(a) || std::isnan(b)) return std::isnan(a) && std::isnan(b);
    return a == b;
}

} // namespace rpne
