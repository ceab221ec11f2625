#pragma once

#include <array>
#include <cstddef>
#include <span>
#include <vector>

#include "rpne/case_table.hpp"
#include "rpne/genome.hpp"

namespace rpne {

// Evaluates one genome on one input vector with a fixed, preallocated stack.
// Stack depth never exceeds the genome length.
inline double eval_case(const Genome& genome, std::span<const double> inputs) noexcept {
    std::array<double, kMaxGenomeLengthLimit> stack;
    std::size_t top = 0;
    for (const Token& t : genome.tokens) {
        switch (t.op) {
        case Op::Var: stack[top++] = inputs[t.var]; break;
        case Op::Const: stack[top++] = t.value; break;
        case Op::Add:
        case Op::Sub:
        case Op::Mul:
        case Op::Div:
            --top;
            stack[top - 1] = apply_binary(t.op, stack[top - 1], stack[top]);
            break;
        default: stack[top - 1] = apply_unary(t.op, stack[top - 1]); break;
        }
    }
    return stack[0];
}

namespace detail {

template <class F>
inline void lanes_unary(double* a, std::size_t n, F f) noexcept {
    for (std::size_t j = 0; j < n; ++j) a[j] = f(a[j]);
}

template <class F>
inline void lanes_binary(double* a, const double* b, std::size_t n, F f) noexcept {
    for (std::size_t j = 0; j < n; ++j) a[j] = f(a[j], b[j]);
}

} // namespace detail

// Column-wise evaluator: every token is applied to a whole tile of cases
// before the next token runs, so all lanes follow the same instruction
// stream. Per-lane arithmetic is identical to eval_case.
class ColumnEvaluator {
public:
    static constexpr std::size_t kTile = 256;

    // out[j] = eval_case(genome, cases.row(j)) for every case j.
    void evaluate(const Genome& genome, const CaseTable& cases, std::span<double> out) {
        const std::size_t n = cases.n_cases();
        const std::size_t depth = max_stack_depth(genome);
        if (stack_.size() < depth * kTile) stack_.resize(depth * kTile);
        for (std::size_t start = 0; start < n; start += kTile) {
            const std::size_t width = std::min(kTile, n - start);
            run_tile(genome, cases, start, width);
            std::copy_n(stack_.data(), width, out.data() + start);
        }
    }

private:
    void run_tile(const Genome& genome, const CaseTable& cases, std::size_t start, std::size_t w) noexcept {
        double* base = stack_.data();
        std::size_t top = 0;
        for (const Token& t : genome.tokens) {
            switch (t.op) {
            case Op::Var: {
                const double* src = cases.column(t.var).data() + start;
                std::copy_n(src, w, base + top * kTile);
                ++top;
                break;
            }
            case Op::Const: std::fill_n(base + top * kTile, w, t.value), ++top; break;
            case Op::Add:
            case Op::Sub:
            case Op::Mul:
            case Op::Div: {
                --top;
                double* a = base + (top - 1) * kTile;
                const double* b = base + top * kTile;
                switch (t.op) {
                case Op::Add: detail::lanes_binary(a, b, w, [](double x, double y) { return x + y; }); break;
                case Op::Sub: detail::lanes_binary(a, b, w, [](double x, double y) { return x - y; }); break;
                case Op::Mul: detail::lanes_binary(a, b, w, [](double x, double y) { return x * y; }); break;
                default: detail::lanes_binary(a, b, w, [](double x, double y) { return x / y; }); break;
                }
                break;
            }
            default: {
                double* a = base + (top - 1) * kTile;
                switch (t.op) {
                case Op::Sq: detail::lanes_unary(a, w, [](double x) { return x * x; }); break;
                case Op::Inv: detail::lanes_unary(a, w, [](double x) { return 1.0 / x; }); break;
                case Op::Sqrt: detail::lanes_unary(a, w, [](double x) { return std::sqrt(x); }); break;
                case Op::Cos: detail::lanes_unary(a, w, [](double x) { return std::cos(x); }); break;
                case Op::Sin: detail::lanes_unary(a, w, [](double x) { return std::sin(x); }); break;
                case Op::Tan: detail::lanes_unary(a, w, [](double x) { return std::tan(x); }); break;
                case Op::Acos: detail::lanes_unary(a, w, [](double x) { return std::acos(x); }); break;
                case Op::Asin: detail::lanes_unary(a, w, [](double x) { return std::asin(x); }); break;
                case Op::Atan: detail::lanes_unary(a, w, [](double x) { return std::atan(x); }); break;
                case Op::Tanh: detail::lanes_unary(a, w, [](double x) { return std::tanh(x); }); break;
                case Op::Log: detail::lanes_unary(a, w, [](double x) { return std::log(x); }); break;
                default: detail::lanes_unary(a, w, [](double x) { return std::exp(x); }); break;
                }
                break;
            }
            }
        }
    }

    std::vector<double> stack_;
};

} // namespace rpne
