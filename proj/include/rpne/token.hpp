#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <limits>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "rpne/errors.hpp"

namespace rpne {

// Token opcodes. Var and Const are terminals; the rest form the operator
// catalogue: four binary arithmetic ops and twelve unary functions.
enum class Op : std::uint8_t {
    Var,
    Const,
    Add,
    Sub,
    Mul,
    Div,
    Sq,
    Sqrt,
    Inv,
    Cos,
    Sin,
    Tan,
    Acos,
    Asin,
    Atan,
    Tanh,
    Log,
    Exp,
};

inline constexpr std::size_t kOpCount = static_cast<std::size_t>(Op::Exp) + 1;

inline constexpr std::array<Op, 16> kAllOperators = {
    Op::Add, Op::Sub, Op::Mul,  Op::Div,  Op::Sq,   Op::Sqrt, Op::Inv, Op::Cos,
    Op::Sin, Op::Tan, Op::Acos, Op::Asin, Op::Atan, Op::Tanh, Op::Log, Op::Exp,
};

constexpr bool is_terminal(Op op) noexcept { return op == Op::Var || op == Op::Const; }
constexpr bool is_binary(Op op) noexcept {
    return op == Op::Add || op == Op::Sub || op == Op::Mul || op == Op::Div;
}
constexpr bool is_unary(Op op) noexcept { return !is_terminal(op) && !is_binary(op); }

// Net stack-depth change caused by executing one token.
constexpr int depth_delta(Op op) noexcept {
    if (is_terminal(op)) return 1;
    if (is_binary(op)) return -1;
    return 0;
}

// Operands the token pops before pushing its result.
constexpr int operand_count(Op op) noexcept {
    if (is_terminal(op)) return 0;
    return is_binary(op) ? 2 : 1;
}

constexpr std::string_view op_name(Op op) noexcept {
    switch (op) {
    case Op::Var: return "var";
    case Op::Const: return "const";
    case Op::Add: return "add";
    case Op::Sub: return "sub";
    case Op::Mul: return "mul";
    case Op::Div: return "div";
    case Op::Sq: return "sq";
    case Op::Sqrt: return "sqrt";
    case Op::Inv: return "inv";
    case Op::Cos: return "cos";
    case Op::Sin: return "sin";
    case Op::Tan: return "tan";
    case Op::Acos: return "acos";
    case Op::Asin: return "asin";
    case Op::Atan: return "atan";
    case Op::Tanh: return "tanh";
    case Op::Log: return "log";
    case Op::Exp: return "exp";
    }
    return "?";
}

inline std::optional<Op> op_from_name(std::string_view name) noexcept {
    for (Op op : kAllOperators) {
        if (op_name(op) == name) return op;
    }
    return std::nullopt;
}

// Scalar semantics shared by every evaluator. Invalid results are whatever
// IEEE arithmetic yields (NaN or +-Inf); nothing is clamped or special-cased.
inline double apply_unary(Op op, double x) noexcept {
    switch (op) {
    case Op::Sq: return x * x;
    case Op::Sqrt: return std::sqrt(x);
    case Op::Inv: return 1.0 / x;
    case Op::Cos: return std::cos(x);
    case Op::Sin: return std::sin(x);
    case Op::Tan: return std::tan(x);
    case Op::Acos: return std::acos(x);
    case Op::Asin: return std::asin(x);
    case Op::Atan: return std::atan(x);
    case Op::Tanh: return std::tanh(x);
    case Op::Log: return std::log(x);
    case Op::Exp: return std::exp(x);
    default: return std::numeric_limits<double>::quiet_NaN();
    }
}

inline double apply_binary(Op op, double lhs, double rhs) noexcept {
    switch (op) {
    case Op::Add: return lhs + rhs;
    case Op::Sub: return lhs - rhs;
    case Op::Mul: return lhs * rhs;
    case Op::Div: return lhs / rhs;
    default: return std::numeric_limits<double>::quiet_NaN();
    }
}

inline bool is_valid_value(double v) noexcept { return std::isfinite(v); }

struct Token {
    Op op = Op::Var;
    std::uint32_t var = 0;
    double value = 0.0;

    static constexpr Token variable(std::uint32_t index) noexcept { return {Op::Var, index, 0.0}; }
    static constexpr Token constant(double v) noexcept { return {Op::Const, 0, v}; }
    static constexpr Token op_token(Op o) noexcept { return {o, 0, 0.0}; }

    friend bool operator==(const Token& a, const Token& b) noexcept {
        if (a.op != b.op) return false;
        if (a.op == Op::Var) return a.var == b.var;
        if (a.op == Op::Const) return a.value == b.value || (std::isnan(a.value) && std::isnan(b.value));
        return true;
    }
};

// The enabled subset of the operator catalogue. Terminals are always allowed.
class OperatorSet {
public:
    OperatorSet() = default;

    static OperatorSet all() {
        OperatorSet s;
        for (Op op : kAllOperators) s.enable(op);
        return s;
    }

    static OperatorSet from_names(const std::vector<std::string>& names) {
        OperatorSet s;
        for (const auto& n : names) {
            auto op = op_from_name(n);
            if (!op) throw ConfigError("unknown operator '" + n + "'");
            s.enable(*op);
        }
        return s;
    }

    void enable(Op op) {
        if (is_terminal(op)) return;
        if (contains(op)) return;
        enabled_[static_cast<std::size_t>(op)] = true;
        (is_binary(op) ? binary_ : unary_).push_back(op);
    }

    bool contains(Op op) const noexcept {
        return is_terminal(op) || enabled_[static_cast<std::size_t>(op)];
    }

    const std::vector<Op>& unary() const noexcept { return unary_; }
    const std::vector<Op>& binary() const noexcept { return binary_; }
    bool has_unary() const noexcept { return !unary_.empty(); }
    bool has_binary() const noexcept { return !binary_.empty(); }

    std::vector<std::string> names() const {
        std::vector<std::string> out;
        for (Op op : kAllOperators)
            if (contains(op)) out.emplace_back(op_name(op));
        return out;
    }

private:
    std::array<bool, kOpCount> enabled_{};
    std::vector<Op> unary_;
    std::vector<Op> binary_;
};

} // namespace rpne
