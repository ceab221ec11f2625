#pragma once

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "rpne/errors.hpp"
#include "rpne/token.hpp"

namespace rpne {

inline constexpr std::size_t kDefaultMaxGenomeLength = 64;
// Upper bound on max_genome_len; also sizes the interpreter's fixed stack.
inline constexpr std::size_t kMaxGenomeLengthLimit = 256;

inline constexpr std::uint32_t kNoSlot = 0xFFFFFFFFu;

// A linear RPN program. Genomes are plain values; the population arena
// assigns slot_id and reuses the token storage across births.
struct Genome {
    std::vector<Token> tokens;
    std::uint32_t slot_id = kNoSlot;

    Genome() = default;
    explicit Genome(std::vector<Token> t) : tokens(std::move(t)) {}
    Genome(std::initializer_list<Token> t) : tokens(t) {}

    std::size_t size() const noexcept { return tokens.size(); }
    bool empty() const noexcept { return tokens.empty(); }

    // Token equality only; slot_id is bookkeeping.
    friend bool operator==(const Genome& a, const Genome& b) noexcept { return a.tokens == b.tokens; }
};

// Stack-balance check plus per-token well-formedness for the given arity and
// operator set. Total: never throws.
inline bool validate(const Genome& genome, std::size_t arity, const OperatorSet& ops,
                     std::size_t max_len = kMaxGenomeLengthLimit) noexcept {
    const auto n = genome.tokens.size();
    if (n < 1 || n > max_len) return false;
    int depth = 0;
    for (const Token& t : genome.tokens) {
        if (static_cast<std::size_t>(t.op) >= kOpCount) return false;
        if (t.op == Op::Var && t.var >= arity) return false;
        if (t.op == Op::Const && !std::isfinite(t.value)) return false;
        if (!ops.contains(t.op)) return false;
        if (depth < operand_count(t.op)) return false;
        depth += depth_delta(t.op);
    }
    return depth == 1;
}

// Stack-balance only, without arity or operator-set checks.
inline bool is_stack_balanced(std::span<const Token> tokens) noexcept {
    if (tokens.empty()) return false;
    int depth = 0;
    for (const Token& t : tokens) {
        if (depth < operand_count(t.op)) return false;
        depth += depth_delta(t.op);
    }
    return depth == 1;
}

inline std::size_t max_stack_depth(const Genome& genome) noexcept {
    int depth = 0;
    int peak = 0;
    for (const Token& t : genome.tokens) {
        depth += depth_delta(t.op);
        peak = std::max(peak, depth);
    }
    return static_cast<std::size_t>(peak);
}

inline std::size_t constant_count(const Genome& genome) noexcept {
    std::size_t n = 0;
    for (const Token& t : genome.tokens) n += (t.op == Op::Const);
    return n;
}

// Shortest decimal text that parses back to the same double.
inline std::string format_real(double v) {
    char buf[64];
    auto [end, ec] = std::to_chars(buf, buf + sizeof buf, v);
    if (ec != std::errc{}) {
        std::snprintf(buf, sizeof buf, "%.17g", v);
        return buf;
    }
    return std::string(buf, end);
}

// Whitespace-separated RPN text: "x0 3.14 mul sin".
inline std::string to_text(const Genome& genome) {
    std::string out;
    for (std::size_t i = 0; i < genome.tokens.size(); ++i) {
        if (i) out += ' ';
        const Token& t = genome.tokens[i];
        if (t.op == Op::Var)
            out += 'x' + std::to_string(t.var);
        else if (t.op == Op::Const)
            out += format_real(t.value);
        else
            out += op_name(t.op);
    }
    return out;
}

inline Genome parse_genome(std::string_view text) {
    Genome g;
    std::istringstream in{std::string(text)};
    std::string word;
    while (in >> word) {
        if (auto op = op_from_name(word)) {
            g.tokens.push_back(Token::op_token(*op));
            continue;
        }
        if (word.size() > 1 && word[0] == 'x') {
            std::uint32_t idx = 0;
            auto [p, ec] = std::from_chars(word.data() + 1, word.data() + word.size(), idx);
            if (ec == std::errc{} && p == word.data() + word.size()) {
                g.tokens.push_back(Token::variable(idx));
                continue;
            }
        }
        double value = 0.0;
        auto [p, ec] = std::from_chars(word.data(), word.data() + word.size(), value);
        if (ec != std::errc{} || p != word.data() + word.size())
            throw ParseError("unrecognised genome token '" + word + "'");
        g.tokens.push_back(Token::constant(value));
    }
    if (!is_stack_balanced(g.tokens)) throw ParseError("genome text is not a stack-balanced RPN program: '" + std::string(text) + "'");
    return g;
}

} // namespace rpne
