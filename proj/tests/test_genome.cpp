#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <vector>

#include "oracle.hpp"
#include "rpne/genome.hpp"
#include "rpne/infix.hpp"
#include "rpne/interpreter.hpp"
#include "rpne/variation.hpp"

using namespace rpne;

namespace {

Genome g(std::string_view text) { return parse_genome(text); }

const OperatorSet kAll = OperatorSet::all();

std::vector<double> random_inputs(Rng& rng, std::size_t arity) {
    std::vector<double> x(arity);
    for (double& v : x) v = uniform_real(rng, -3.0, 3.0);
    return x;
}

} // namespace

TEST(Validate, SingleTerminalIsValid) { EXPECT_TRUE(validate(g("x0"), 1, kAll)); }

TEST(Validate, BinaryAfterTwoOperands) { EXPECT_TRUE(validate(g("x0 x1 add"), 2, kAll)); }

TEST(Validate, BinaryOnEmptyStackRejected) {
    Genome bad{Token::op_token(Op::Add), Token::variable(0)};
    EXPECT_FALSE(validate(bad, 1, kAll));
}

TEST(Validate, RejectsEmptyLeftoverOperandsAndForeignTokens) {
    EXPECT_FALSE(validate(Genome{}, 1, kAll));
    EXPECT_FALSE(validate(Genome{Token::variable(0), Token::variable(0)}, 1, kAll));
    EXPECT_FALSE(validate(g("x1"), 1, kAll));
    EXPECT_FALSE(validate(Genome{Token::constant(std::numeric_limits<double>::quiet_NaN())}, 1, kAll));
    const OperatorSet arith = OperatorSet::from_names({"add", "mul"});
    EXPECT_FALSE(validate(g("x0 sin"), 1, arith));
    EXPECT_TRUE(validate(g("x0 x0 mul"), 1, arith));
}

TEST(Validate, RespectsLengthCap) {
    EXPECT_TRUE(validate(g("x0 x0 add"), 1, kAll, 3));
    EXPECT_FALSE(validate(g("x0 x0 add"), 1, kAll, 2));
}

TEST(GenomeText, RoundTripsOperatorsAndConstants) {
    const Genome a = g("x0 3.14 mul sin x1 -0.5 div sub sqrt");
    EXPECT_EQ(to_text(a), "x0 3.14 mul sin x1 -0.5 div sub sqrt");
    EXPECT_EQ(parse_genome(to_text(a)), a);
    EXPECT_THROW(parse_genome("x0 add"), ParseError);
    EXPECT_THROW(parse_genome("x0 frob"), ParseError);
}

TEST(GenomeText, ConstantsRoundTripExactly) {
    Rng rng(3);
    for (int i = 0; i < 1000; ++i) {
        const double v = uniform_real(rng, -5.0, 5.0) * std::pow(10.0, static_cast<double>(uniform_index(rng, 20)) - 10.0);
        EXPECT_EQ(parse_genome(format_real(v)).tokens[0].value, v);
    }
}

TEST(EvalCase, Addition) {
    const double x[] = {2.0, 3.0};
    EXPECT_EQ(eval_case(g("x0 x1 add"), x), 5.0);
}

TEST(EvalCase, DomainViolationsAreInvalid) {
    const double neg[] = {-4.0};
    const double zero[] = {0.0};
    EXPECT_TRUE(std::isnan(eval_case(g("x0 sqrt"), neg)));
    EXPECT_TRUE(std::isnan(eval_case(g("x0 log"), neg)));
    EXPECT_FALSE(std::isfinite(eval_case(g("x0 log"), zero)));
    EXPECT_FALSE(std::isfinite(eval_case(g("x0 inv"), zero)));
    EXPECT_TRUE(std::isnan(eval_case(g("x0 acos"), neg)));
    EXPECT_TRUE(std::isnan(eval_case(g("x0 asin"), neg)));
    EXPECT_FALSE(std::isfinite(eval_case(g("1 x0 div"), zero)));
}

TEST(EvalCase, InvalidValuesPropagate) {
    const double neg[] = {-4.0};
    EXPECT_TRUE(std::isnan(eval_case(g("x0 sqrt 0 mul 1 add"), neg)));
}

TEST(EvalCase, OperandOrderOfNonCommutativeOps) {
    const double x[] = {8.0, 2.0};
    EXPECT_EQ(eval_case(g("x0 x1 sub"), x), 6.0);
    EXPECT_EQ(eval_case(g("x0 x1 div"), x), 4.0);
}

TEST(EvalCase, MatchesTreeOracleOnRandomGenomes) {
    Rng rng(11);
    GenomeSpace space;
    space.arity = 3;
    space.max_len = 48;
    for (int i = 0; i < 2000; ++i) {
        const Genome genome = random_genome(rng, space);
        for (int k = 0; k < 5; ++k) {
            const auto x = random_inputs(rng, 3);
            ASSERT_TRUE(oracle::same(eval_case(genome, x), oracle::evaluate(genome, x))) << to_text(genome);
        }
    }
}

TEST(EvalCase, StackDepthNeverExceedsLength) {
    Rng rng(5);
    GenomeSpace space;
    space.arity = 2;
    for (int i = 0; i < 2000; ++i) {
        const Genome genome = random_genome(rng, space);
        EXPECT_LE(max_stack_depth(genome), genome.size());
    }
}

TEST(ColumnEvaluator, BitwiseEqualToScalar) {
    Rng rng(17);
    GenomeSpace space;
    space.arity = 2;
    std::vector<double> in;
    std::vector<double> tgt(700, 0.0);
    for (std::size_t i = 0; i < tgt.size() * 2; ++i) in.push_back(uniform_real(rng, -4.0, 4.0));
    const CaseTable cases(2, in, tgt);
    ColumnEvaluator ev;
    std::vector<double> out(cases.n_cases());
    for (int i = 0; i < 300; ++i) {
        const Genome genome = random_genome(rng, space);
        ev.evaluate(genome, cases, out);
        for (std::size_t j = 0; j < cases.n_cases(); ++j)
            ASSERT_TRUE(oracle::same(out[j], eval_case(genome, cases.row(j)))) << to_text(genome);
    }
}

TEST(RandomGenome, LengthOneIsATerminal) {
    Rng rng(1);
    for (int i = 0; i < 100; ++i) {
        const Genome genome = random_genome(rng, 1, 1, kAll);
        ASSERT_EQ(genome.size(), 1u);
        EXPECT_TRUE(is_terminal(genome.tokens[0].op));
    }
}

TEST(RandomGenome, AlwaysValid) {
    Rng rng(2);
    for (int i = 0; i < 100000; ++i) ASSERT_TRUE(validate(random_genome(rng, 3, 32, kAll), 3, kAll, 32));
}

TEST(RandomGenome, RestrictedOperatorSets) {
    Rng rng(4);
    for (const auto& names : std::vector<std::vector<std::string>>{{}, {"sin"}, {"add"}, {"mul", "exp"}}) {
        const OperatorSet ops = OperatorSet::from_names(names);
        GenomeSpace space;
        space.ops = ops;
        space.max_len = 9;
        for (int i = 0; i < 2000; ++i) {
            const Genome genome = random_genome(rng, space);
            ASSERT_TRUE(validate(genome, 1, ops, 9)) << to_text(genome);
            const Genome child = mutate(rng, genome, space);
            ASSERT_TRUE(validate(child, 1, ops, 9)) << to_text(child);
        }
    }
}

TEST(RandomGenome, Deterministic) {
    Rng a(99), b(99);
    for (int i = 0; i < 500; ++i) EXPECT_EQ(random_genome(a, 2, 32, kAll), random_genome(b, 2, 32, kAll));
}

TEST(Mutate, ConstantPerturbWithoutConstantsIsIdentity) {
    Rng rng(1);
    GenomeSpace space;
    MutationWeights only_perturb{0, 0, 1, 0, 0};
    const Genome parent = g("x0");
    Genome child;
    EXPECT_EQ(mutate_into(rng, parent, child, space, only_perturb), MutationKind::Identity);
    EXPECT_EQ(child, parent);
}

TEST(Mutate, ConstantPerturbKeepsSign) {
    Rng rng(8);
    GenomeSpace space;
    MutationWeights only_perturb{0, 0, 1, 0, 0};
    const Genome parent = g("x0 -2.5 mul");
    for (int i = 0; i < 200; ++i) {
        const Genome child = mutate(rng, parent, space, only_perturb);
        ASSERT_EQ(child.size(), 3u);
        EXPECT_LT(child.tokens[1].value, 0.0);
    }
}

TEST(Mutate, ParentUnmodifiedAndChildValid) {
    Rng rng(21);
    GenomeSpace space;
    space.arity = 3;
    for (int i = 0; i < 20000; ++i) {
        const Genome parent = random_genome(rng, space);
        const Genome copy = parent;
        const Genome child = mutate(rng, parent, space);
        ASSERT_EQ(parent, copy);
        ASSERT_TRUE(validate(child, 3, kAll, space.max_len)) << to_text(parent) << " -> " << to_text(child);
    }
}

TEST(Mutate, EachKindProducesValidChildren) {
    Rng rng(31);
    GenomeSpace space;
    space.arity = 2;
    space.max_len = 12;
    const MutationWeights kinds[] = {{1, 0, 0, 0, 0}, {0, 1, 0, 0, 0}, {0, 0, 1, 0, 0}, {0, 0, 0, 1, 0}, {0, 0, 0, 0, 1}};
    for (const auto& w : kinds) {
        Genome parent = random_genome(rng, space);
        for (int i = 0; i < 20000; ++i) {
            Genome child = mutate(rng, parent, space, w);
            ASSERT_TRUE(validate(child, 2, kAll, 12)) << to_text(parent) << " -> " << to_text(child);
            parent = std::move(child);
        }
    }
}

TEST(Mutate, ChainsStayValidAtTheLengthCap) {
    Rng rng(41);
    GenomeSpace space;
    space.max_len = 5;
    Genome cur = g("x0");
    for (int i = 0; i < 50000; ++i) {
        cur = mutate(rng, cur, space);
        ASSERT_TRUE(validate(cur, 1, kAll, 5)) << to_text(cur);
    }
}

TEST(Mutate, Deterministic) {
    GenomeSpace space;
    space.arity = 2;
    Rng a(5), b(5);
    Genome pa = random_genome(a, space), pb = random_genome(b, space);
    for (int i = 0; i < 1000; ++i) {
        pa = mutate(a, pa, space);
        pb = mutate(b, pb, space);
        ASSERT_EQ(pa, pb);
    }
}

TEST(Repair, FixesBrokenSequences) {
    Rng rng(6);
    GenomeSpace space;
    space.arity = 2;
    space.max_len = 8;
    for (int i = 0; i < 20000; ++i) {
        std::vector<Token> tok;
        const std::size_t n = uniform_index(rng, std::size_t{12});
        for (std::size_t k = 0; k < n; ++k) {
            const auto op = static_cast<Op>(uniform_index(rng, kOpCount));
            tok.push_back(op == Op::Var ? Token::variable(static_cast<std::uint32_t>(uniform_index(rng, std::size_t{4})))
                                        : op == Op::Const ? Token::constant(1.5) : Token::op_token(op));
        }
        detail::repair(rng, space, tok);
        ASSERT_TRUE(validate(Genome(tok), 2, kAll, 8));
    }
}

TEST(Infix, RendersFullyParenthesised) {
    EXPECT_EQ(to_infix(g("x0 x1 add")), "(x0 + x1)");
    EXPECT_EQ(to_infix(g("x0 sq")), "((x0)^2)");
    EXPECT_EQ(to_infix(g("x0 inv")), "(1 / x0)");
    EXPECT_EQ(to_infix(g("x0 sin x1 mul")), "(sin(x0) * x1)");
}

TEST(Infix, RoundTripIsBitwiseEqual) {
    Rng rng(13);
    GenomeSpace space;
    space.arity = 3;
    space.max_len = 40;
    for (int i = 0; i < 2000; ++i) {
        const Genome genome = random_genome(rng, space);
        const std::string text = to_infix(genome);
        const Expression expr = Expression::parse(text);
        for (int k = 0; k < 100; ++k) {
            const auto x = random_inputs(rng, 3);
            ASSERT_TRUE(oracle::same(expr(x), eval_case(genome, x))) << to_text(genome) << "  =>  " << text;
        }
    }
}

TEST(InfixParser, PrecedenceAndFunctions) {
    const double x[] = {2.0, 3.0, 4.0};
    EXPECT_EQ(Expression::parse("x0 + x1 * x2")(x), 14.0);
    EXPECT_EQ(Expression::parse("-x0^2")(x), -4.0);
    EXPECT_EQ(Expression::parse("2^3^2")(x), 512.0);
    EXPECT_EQ(Expression::parse("(x0 + x1) / x2")(x), 1.25);
    EXPECT_DOUBLE_EQ(Expression::parse("arcsin(1) * 2")(x), std::acos(-1.0));
    EXPECT_DOUBLE_EQ(Expression::parse("pi")(x), std::acos(-1.0));
    EXPECT_EQ(Expression::parse("x2 - x0").arity(), 3u);
    EXPECT_THROW(Expression::parse("x0 +"), ParseError);
    EXPECT_THROW(Expression::parse("foo(x0)"), ParseError);
}
