#pragma once

#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "rpne/errors.hpp"
#include "rpne/genome.hpp"

namespace rpne {

namespace detail {

inline std::string infix_constant(double v) {
    std::string s = format_real(v);
    return (s.front() == '-') ? "(" + s + ")" : s;
}

inline std::string_view infix_symbol(Op op) {
    switch (op) {
    case Op::Add: return "+";
    case Op::Sub: return "-";
    case Op::Mul: return "*";
    case Op::Div: return "/";
    default: return "?";
    }
}

} // namespace detail

// Fully parenthesised infix text of a valid genome, e.g. "(x0 + x1)".
inline std::string to_infix(const Genome& genome) {
    std::vector<std::string> stack;
    stack.reserve(genome.size());
    for (const Token& t : genome.tokens) {
        if (t.op == Op::Var) {
            stack.push_back("x" + std::to_string(t.var));
        } else if (t.op == Op::Const) {
            stack.push_back(detail::infix_constant(t.value));
        } else if (is_binary(t.op)) {
            std::string rhs = std::move(stack.back());
            stack.pop_back();
            stack.back() = "(" + stack.back() + " " + std::string(detail::infix_symbol(t.op)) + " " + rhs + ")";
        } else if (t.op == Op::Sq) {
            stack.back() = "((" + stack.back() + ")^2)";
        } else if (t.op == Op::Inv) {
            stack.back() = "(1 / " + stack.back() + ")";
        } else {
            stack.back() = std::string(op_name(t.op)) + "(" + stack.back() + ")";
        }
    }
    return stack.empty() ? std::string{} : stack.back();
}

// A parsed infix expression over variables x0, x1, ...
//
// Grammar (usual precedence, '^' right-associative and binding tighter than
// unary minus):
//   expr    := term (('+' | '-') term)*
//   term    := unary (('*' | '/') unary)*
//   unary   := '-' unary | power
//   power   := primary ('^' unary)?
//   primary := number | 'pi' | xN | func '(' expr ')' | '(' expr ')'
// Functions: sqrt sq inv cos sin tan acos asin atan tanh log exp (plus the
// arccos/arcsin/arctan spellings).
class Expression {
public:
    static Expression parse(std::string_view text) {
        Expression e;
        Parser p{text, 0, e};
        e.root_ = p.expr();
        p.skip_ws();
        if (p.pos != text.size())
            throw ParseError("unexpected '" + std::string(text.substr(p.pos, 1)) + "' at offset " + std::to_string(p.pos) +
                             " in expression '" + std::string(text) + "'");
        return e;
    }

    double operator()(std::span<const double> x) const { return eval(root_, x); }

    // Number of input variables referenced: 1 + the highest index, or 0.
    std::size_t arity() const noexcept {
        std::size_t n = 0;
        for (const Node& node : nodes_)
            if (node.kind == Kind::Var) n = std::max<std::size_t>(n, node.var + 1);
        return n;
    }

private:
    enum class Kind { Num, Var, Neg, Unary, Binary, Pow };

    struct Node {
        Kind kind;
        Op op = Op::Var;
        std::uint32_t var = 0;
        double value = 0.0;
        int lhs = -1;
        int rhs = -1;
    };

    int add(Node n) {
        nodes_.push_back(n);
        return static_cast<int>(nodes_.size() - 1);
    }

    double eval(int i, std::span<const double> x) const {
        const Node& n = nodes_[static_cast<std::size_t>(i)];
        switch (n.kind) {
        case Kind::Num: return n.value;
        case Kind::Var: return x[n.var];
        case Kind::Neg: return -eval(n.lhs, x);
        case Kind::Unary: return apply_unary(n.op, eval(n.lhs, x));
        case Kind::Binary: return apply_binary(n.op, eval(n.lhs, x), eval(n.rhs, x));
        case Kind::Pow: {
            const double b = eval(n.lhs, x);
            const double p = eval(n.rhs, x);
            return p == 2.0 ? b * b : std::pow(b, p);
        }
        }
        return std::numeric_limits<double>::quiet_NaN();
    }

    struct Parser {
        std::string_view s;
        std::size_t pos;
        Expression& e;

        void skip_ws() {
            while (pos < s.size() && std::isspace(static_cast<unsigned char>(s[pos]))) ++pos;
        }
        bool accept(char c) {
            skip_ws();
            if (pos < s.size() && s[pos] == c) {
                ++pos;
                return true;
            }
            return false;
        }
        [[noreturn]] void fail(const std::string& what) {
            throw ParseError(what + " at offset " + std::to_string(pos) + " in expression '" + std::string(s) + "'");
        }

        int expr() {
            int lhs = term();
            for (;;) {
                if (accept('+'))
                    lhs = e.add({Kind::Binary, Op::Add, 0, 0.0, lhs, term()});
                else if (accept('-'))
                    lhs = e.add({Kind::Binary, Op::Sub, 0, 0.0, lhs, term()});
                else
                    return lhs;
            }
        }
        int term() {
            int lhs = unary();
            for (;;) {
                if (accept('*'))
                    lhs = e.add({Kind::Binary, Op::Mul, 0, 0.0, lhs, unary()});
                else if (accept('/'))
                    lhs = e.add({Kind::Binary, Op::Div, 0, 0.0, lhs, unary()});
                else
                    return lhs;
            }
        }
        int unary() {
            if (accept('-')) return e.add({Kind::Neg, Op::Var, 0, 0.0, unary(), -1});
            if (accept('+')) return unary();
            return power();
        }
        int power() {
            int base = primary();
            if (accept('^')) return e.add({Kind::Pow, Op::Var, 0, 0.0, base, unary()});
            return base;
        }
        int primary() {
            skip_ws();
            if (pos >= s.size()) fail("unexpected end of input");
            if (accept('(')) {
                int inner = expr();
                if (!accept(')')) fail("expected ')'");
                return inner;
            }
            const char c = s[pos];
            if (std::isdigit(static_cast<unsigned char>(c)) || c == '.') {
                double v = 0.0;
                auto [p, ec] = std::from_chars(s.data() + pos, s.data() + s.size(), v);
                if (ec != std::errc{}) fail("malformed number");
                pos = static_cast<std::size_t>(p - s.data());
                return e.add({Kind::Num, Op::Const, 0, v, -1, -1});
            }
            if (!std::isalpha(static_cast<unsigned char>(c))) fail(std::string("unexpected '") + c + "'");
            const std::size_t start = pos;
            while (pos < s.size() && (std::isalnum(static_cast<unsigned char>(s[pos])) || s[pos] == '_')) ++pos;
            const std::string_view word = s.substr(start, pos - start);
            if (word == "pi") return e.add({Kind::Num, Op::Const, 0, std::numbers::pi, -1, -1});
            if (word.size() > 1 && word[0] == 'x' && word.find_first_not_of("0123456789", 1) == std::string_view::npos) {
                std::uint32_t idx = 0;
                std::from_chars(word.data() + 1, word.data() + word.size(), idx);
                return e.add({Kind::Var, Op::Var, idx, 0.0, -1, -1});
            }
            const Op fn = function_named(word);
            if (!accept('(')) fail("expected '(' after " + std::string(word));
            int arg = expr();
            if (!accept(')')) fail("expected ')'");
            return e.add({Kind::Unary, fn, 0, 0.0, arg, -1});
        }
        Op function_named(std::string_view w) {
            if (w == "arccos") return Op::Acos;
            if (w == "arcsin") return Op::Asin;
            if (w == "arctan") return Op::Atan;
            auto op = op_from_name(w);
            if (!op || !is_unary(*op)) fail("unknown function '" + std::string(w) + "'");
            return *op;
        }
    };

    std::vector<Node> nodes_;
    int root_ = -1;
};

} // namespace rpne
