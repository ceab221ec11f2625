#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <random>
#include <vector>

#include "rpne/genome.hpp"
#include "rpne/random.hpp"
#include "rpne/token.hpp"

namespace rpne {

// What a genome may contain: input arity, enabled operators, length cap and
// the ephemeral-constant rule.
struct GenomeSpace {
    std::size_t arity = 1;
    OperatorSet ops = OperatorSet::all();
    std::size_t max_len = kDefaultMaxGenomeLength;
    double constant_probability = 0.25;
    double constant_lo = -5.0;
    double constant_hi = 5.0;
};

struct MutationWeights {
    double point_replace = 0.4;
    double terminal_replace = 0.2;
    double constant_perturb = 0.2;
    double insert = 0.1;
    double remove = 0.1;
};

enum class MutationKind { PointReplace, TerminalReplace, ConstantPerturb, Insert, Remove, Identity };

// Sigma of the log-normal factor applied by constant perturbation.
inline constexpr double kConstantPerturbSigma = 0.2;

namespace detail {

// Whether an RPN suffix of exactly `remaining` tokens can take the stack from
// `depth` to exactly one value, given which operator arities are available.
constexpr bool can_finish(int depth, std::size_t remaining, bool has_unary, bool has_binary) noexcept {
    const auto r = static_cast<long>(remaining);
    if (r == 0) return depth == 1;
    if (depth == 0) return can_finish(1, remaining - 1, has_unary, has_binary);
    if (has_unary && has_binary) return r >= depth - 1;
    if (has_binary) return r >= depth - 1 && (r - (depth - 1)) % 2 == 0;
    if (has_unary) return depth == 1;
    return false;
}

inline Token random_terminal(Rng& rng, const GenomeSpace& space) {
    if (bernoulli(rng, space.constant_probability))
        return Token::constant(uniform_real(rng, space.constant_lo, space.constant_hi));
    return Token::variable(static_cast<std::uint32_t>(uniform_index(rng, space.arity)));
}

inline Op random_of(Rng& rng, const std::vector<Op>& ops) { return ops[uniform_index(rng, ops.size())]; }

// Appends a grow-sampled RPN fragment of exactly `length` tokens that leaves
// one value on the stack. Each position draws uniformly among the token
// kinds that are legal now and still allow the fragment to finish.
inline void append_expression(Rng& rng, const GenomeSpace& space, std::size_t length, std::vector<Token>& out) {
    const bool hu = space.ops.has_unary();
    const bool hb = space.ops.has_binary();
    int depth = 0;
    for (std::size_t i = 0; i < length; ++i) {
        const std::size_t rest = length - i - 1;
        std::array<int, 3> kinds{};
        int n = 0;
        if (can_finish(depth + 1, rest, hu, hb)) kinds[n++] = 0;
        if (hu && depth >= 1 && can_finish(depth, rest, hu, hb)) kinds[n++] = 1;
        if (hb && depth >= 2 && can_finish(depth - 1, rest, hu, hb)) kinds[n++] = 2;
        const int kind = kinds[n == 1 ? 0 : uniform_index(rng, n)];
        if (kind == 0) {
            out.push_back(random_terminal(rng, space));
            ++depth;
        } else if (kind == 1) {
            out.push_back(Token::op_token(random_of(rng, space.ops.unary())));
        } else {
            out.push_back(Token::op_token(random_of(rng, space.ops.binary())));
            --depth;
        }
    }
}

inline bool length_feasible(const GenomeSpace& space, std::size_t length) noexcept {
    return can_finish(0, length, space.ops.has_unary(), space.ops.has_binary());
}

// Random correction: resample every token that is illegal where it stands,
// then rebalance the tail so exactly one value remains within max_len.
inline void repair(Rng& rng, const GenomeSpace& space, std::vector<Token>& tokens) {
    if (tokens.size() > space.max_len) tokens.resize(space.max_len);
    int depth = 0;
    for (Token& t : tokens) {
        const bool well_formed = space.ops.contains(t.op) && (t.op != Op::Var || t.var < space.arity) &&
                                 (t.op != Op::Const || std::isfinite(t.value));
        if (!well_formed || depth < operand_count(t.op)) t = random_terminal(rng, space);
        depth += depth_delta(t.op);
    }
    if (tokens.empty()) {
        tokens.push_back(random_terminal(rng, space));
        depth = 1;
    }
    if (depth == 1) return;

    // Keep the longest prefix whose surplus values can be folded by binary
    // ops without exceeding max_len. A one-token prefix always qualifies.
    std::size_t keep = 1;
    int keep_depth = 1;
    int d = 0;
    for (std::size_t len = 1; len <= tokens.size(); ++len) {
        d += depth_delta(tokens[len - 1].op);
        const bool fits = space.ops.has_binary() ? len + static_cast<std::size_t>(d - 1) <= space.max_len : d == 1;
        if (fits) {
            keep = len;
            keep_depth = d;
        }
    }
    tokens.resize(keep);
    for (int i = 1; i < keep_depth; ++i) tokens.push_back(Token::op_token(random_of(rng, space.ops.binary())));
}

template <class Pred>
inline std::size_t count_sites(const std::vector<Token>& tokens, Pred pred) {
    std::size_t n = 0;
    for (const Token& t : tokens) n += pred(t);
    return n;
}

// Index of the k-th token satisfying pred.
template <class Pred>
inline std::size_t nth_site(const std::vector<Token>& tokens, std::size_t k, Pred pred) {
    for (std::size_t i = 0; i < tokens.size(); ++i) {
        if (pred(tokens[i])) {
            if (k == 0) return i;
            --k;
        }
    }
    return tokens.size();
}

} // namespace detail

// Fills `out` with a random valid genome. Length is uniform over the
// feasible lengths in [1, max_len]; storage in `out` is reused.
inline void random_genome_into(Rng& rng, const GenomeSpace& space, Genome& out) {
    std::size_t length = 1;
    do {
        length = 1 + uniform_index(rng, space.max_len);
    } while (!detail::length_feasible(space, length));
    out.tokens.clear();
    detail::append_expression(rng, space, length, out.tokens);
}

inline Genome random_genome(Rng& rng, const GenomeSpace& space) {
    Genome g;
    g.tokens.reserve(space.max_len);
    random_genome_into(rng, space, g);
    return g;
}

inline Genome random_genome(Rng& rng, std::size_t arity, std::size_t max_len, const OperatorSet& ops) {
    GenomeSpace space;
    space.arity = arity;
    space.max_len = max_len;
    space.ops = ops;
    return random_genome(rng, space);
}

inline MutationKind pick_mutation_kind(Rng& rng, const MutationWeights& w) {
    const std::array<double, 5> weights{w.point_replace, w.terminal_replace, w.constant_perturb, w.insert, w.remove};
    double total = 0.0;
    for (double x : weights) total += x;
    double u = uniform_real(rng, 0.0, total);
    for (std::size_t k = 0; k + 1 < weights.size(); ++k) {
        if (u < weights[k]) return static_cast<MutationKind>(k);
        u -= weights[k];
    }
    return MutationKind::Remove;
}

// Writes a mutated copy of `parent` into `child`, reusing child's storage.
// The parent must be valid; the child always is. Returns the kind applied,
// or Identity when the drawn kind had no applicable site.
inline MutationKind mutate_into(Rng& rng, const Genome& parent, Genome& child, const GenomeSpace& space,
                                const MutationWeights& weights) {
    auto& tok = child.tokens;
    tok.assign(parent.tokens.begin(), parent.tokens.end());
    const MutationKind kind = pick_mutation_kind(rng, weights);

    switch (kind) {
    case MutationKind::PointReplace: {
        auto is_op = [](const Token& t) { return !is_terminal(t.op); };
        const auto sites = detail::count_sites(tok, is_op);
        if (sites == 0) return MutationKind::Identity;
        Token& t = tok[detail::nth_site(tok, uniform_index(rng, sites), is_op)];
        const auto& pool = is_binary(t.op) ? space.ops.binary() : space.ops.unary();
        if (pool.size() < 2) return MutationKind::Identity;
        Op next = t.op;
        while (next == t.op) next = detail::random_of(rng, pool);
        t.op = next;
        break;
    }
    case MutationKind::TerminalReplace: {
        auto is_term = [](const Token& t) { return is_terminal(t.op); };
        const auto sites = detail::count_sites(tok, is_term);
        tok[detail::nth_site(tok, uniform_index(rng, sites), is_term)] = detail::random_terminal(rng, space);
        break;
    }
    case MutationKind::ConstantPerturb: {
        auto is_const = [](const Token& t) { return t.op == Op::Const; };
        const auto sites = detail::count_sites(tok, is_const);
        if (sites == 0) return MutationKind::Identity;
        Token& t = tok[detail::nth_site(tok, uniform_index(rng, sites), is_const)];
        t.value *= std::lognormal_distribution<double>(0.0, kConstantPerturbSigma)(rng);
        break;
    }
    case MutationKind::Insert: {
        const std::size_t room = space.max_len - std::min(space.max_len, tok.size());
        const bool unary_ok = space.ops.has_unary() && room >= 1;
        const bool binary_ok = space.ops.has_binary() && room >= 2;
        if (!unary_ok && !binary_ok) return MutationKind::Identity;
        // Inserting after at least one token keeps the prefix depth >= 1.
        const std::size_t pos = 1 + uniform_index(rng, tok.size());
        std::array<Token, 8> unit;
        std::size_t unit_len = 0;
        if (unary_ok && (!binary_ok || bernoulli(rng, 0.5))) {
            unit[unit_len++] = Token::op_token(detail::random_of(rng, space.ops.unary()));
        } else {
            std::size_t sub_len = 1;
            const std::size_t max_sub = std::min<std::size_t>(3, room - 1);
            do {
                sub_len = 1 + uniform_index(rng, max_sub);
            } while (!detail::length_feasible(space, sub_len));
            thread_local std::vector<Token> frag;
            frag.clear();
            detail::append_expression(rng, space, sub_len, frag);
            for (const Token& t : frag) unit[unit_len++] = t;
            unit[unit_len++] = Token::op_token(detail::random_of(rng, space.ops.binary()));
        }
        tok.insert(tok.begin() + static_cast<std::ptrdiff_t>(pos), unit.begin(),
                   unit.begin() + static_cast<std::ptrdiff_t>(unit_len));
        break;
    }
    case MutationKind::Remove: {
        if (tok.size() < 2) return MutationKind::Identity;
        const std::size_t span = 1 + uniform_index(rng, std::min<std::size_t>(4, tok.size() - 1));
        const std::size_t start = uniform_index(rng, tok.size() - span + 1);
        tok.erase(tok.begin() + static_cast<std::ptrdiff_t>(start),
                  tok.begin() + static_cast<std::ptrdiff_t>(start + span));
        break;
    }
    case MutationKind::Identity: break;
    }

    if (!validate(child, space.arity, space.ops, space.max_len)) detail::repair(rng, space, tok);
    return kind;
}

inline Genome mutate(Rng& rng, const Genome& parent, const GenomeSpace& space,
                     const MutationWeights& weights = {}) {
    Genome child;
    child.tokens.reserve(space.max_len);
    mutate_into(rng, parent, child, space, weights);
    return child;
}

} // namespace rpne
