#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <functional>
#include <istream>
#include <memory>
#include <span>
#include <sstream>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "rpne/case_table.hpp"
#include "rpne/config.hpp"
#include "rpne/engine.hpp"
#include "rpne/errors.hpp"
#include "rpne/infix.hpp"
#include "rpne/random.hpp"
#include "rpne/validation.hpp"

namespace rpne {

inline constexpr std::size_t kTrainCases = 512;
inline constexpr std::size_t kTestCases = 128;
inline constexpr double kDefaultDomainLo = 1.0;
inline constexpr double kDefaultDomainHi = 5.0;

struct Domain {
    double lo = kDefaultDomainLo;
    double hi = kDefaultDomainHi;
};

// A benchmark target: a closed-form expression sampled on a box domain.
struct ProblemSpec {
    std::string name;
    std::size_t arity = 1;
    std::string expression;
    std::vector<Domain> domains;
    bool allow_invalid = false;

    double evaluate(std::span<const double> x) const { return compiled().operator()(x); }

    const Expression& compiled() const {
        if (!compiled_) compiled_ = std::make_shared<Expression>(Expression::parse(expression));
        return *compiled_;
    }

    void check() const {
        if (name.empty()) throw ConfigError("problem needs a name");
        if (arity < 1) throw ConfigError("problem '" + name + "' needs arity >= 1");
        if (domains.size() != arity) throw ConfigError("problem '" + name + "' needs one domain per variable");
        for (const auto& d : domains)
            if (!(d.lo < d.hi)) throw ConfigError("problem '" + name + "' has a domain with lo >= hi");
        if (compiled().arity() > arity)
            throw ConfigError("problem '" + name + "' expression reads more variables than its arity");
    }

private:
    mutable std::shared_ptr<const Expression> compiled_;
};

inline ProblemSpec make_problem(std::string name, std::size_t arity, std::string expression,
                                std::vector<Domain> domains = {}, bool allow_invalid = false) {
    ProblemSpec p;
    p.name = std::move(name);
    p.arity = arity;
    p.expression = std::move(expression);
    p.domains = domains.empty() ? std::vector<Domain>(arity, Domain{}) : std::move(domains);
    p.allow_invalid = allow_invalid;
    p.check();
    return p;
}

// Quadratic root (-b + sqrt(b^2 - 4ac)) / (2a) with a = x0, b = x1, c = x2.
inline constexpr const char* kQuadraticExpression = "(-x1 + sqrt(x1^2 - 4*x0*x2)) / (2*x0)";

// b in [4, 6] with a, c in [1, 2] keeps b^2 - 4ac >= 0 everywhere.
inline ProblemSpec quadratic_restricted() {
    return make_problem("quadratic", 3, kQuadraticExpression, {{1, 2}, {4, 6}, {1, 2}});
}

// b extended down to 0: the discriminant goes negative on part of the box
// and those targets are kept as NaN.
inline ProblemSpec quadratic_widened() {
    return make_problem("quadratic_wide", 3, kQuadraticExpression, {{1, 2}, {0, 6}, {1, 2}}, true);
}

// The built-in desk-scale registry, easiest first.
inline std::vector<ProblemSpec> builtin_problems() {
    return {
        make_problem("identity", 1, "x0"),
        make_problem("add2", 2, "x0 + x1"),
        make_problem("mul2", 2, "x0 * x1"),
        make_problem("div2", 2, "x0 / x1"),
        make_problem("square", 1, "x0^2"),
        make_problem("sin", 1, "sin(x0)"),
        make_problem("gauss", 1, "exp(-x0^2/2)", {{1, 3}}),
        make_problem("parallel", 2, "x0*x1/(x0 + x1)"),
        make_problem("hypot", 2, "sqrt(x0^2 + x1^2)"),
        make_problem("sinc", 1, "sin(x0)/x0"),
        quadratic_restricted(),
        make_problem("mul3", 3, "x0*x1*x2"),
    };
}

inline const ProblemSpec* find_problem(const std::vector<ProblemSpec>& problems, std::string_view name) {
    for (const auto& p : problems)
        if (p.name == name) return &p;
    return nullptr;
}

namespace detail {

inline std::string trim(std::string s) {
    const auto b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

inline std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> out;
    std::string field;
    bool quoted = false;
    for (char c : line) {
        if (c == '"') quoted = !quoted;
        else if (c == ',' && !quoted) {
            out.push_back(trim(field));
            field.clear();
        } else field += c;
    }
    out.push_back(trim(field));
    return out;
}

inline double parse_double_field(const std::string& s, const std::string& what) {
    try {
        std::size_t used = 0;
        const double v = std::stod(s, &used);
        if (used != s.size()) throw ParseError("");
        return v;
    } catch (const std::exception&) {
        throw ParseError("bad " + what + " '" + s + "'");
    }
}

inline bool parse_bool_field(const std::string& s) {
    if (s == "1" || s == "true" || s == "yes") return true;
    if (s == "0" || s == "false" || s == "no" || s.empty()) return false;
    throw ParseError("bad allow_invalid value '" + s + "'");
}

} // namespace detail

// Problem CSV: `name, arity, expression, lo1, hi1, ..., allow_invalid`.
// Blank lines and lines starting with '#' are skipped, as is a header row
// whose first field is "name". Expressions containing commas must be quoted.
inline std::vector<ProblemSpec> parse_problem_csv(std::istream& in) {
    std::vector<ProblemSpec> out;
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const std::string t = detail::trim(line);
        if (t.empty() || t[0] == '#') continue;
        auto f = detail::split_csv_line(t);
        if (f[0] == "name") continue;
        try {
            if (f.size() < 5) throw ParseError("too few fields");
            const auto arity = static_cast<std::size_t>(detail::parse_double_field(f[1], "arity"));
            if (f.size() != 3 + 2 * arity + 1) throw ParseError("expected " + std::to_string(4 + 2 * arity) + " fields");
            std::vector<Domain> domains;
            for (std::size_t k = 0; k < arity; ++k)
                domains.push_back({detail::parse_double_field(f[3 + 2 * k], "lo"),
                                   detail::parse_double_field(f[4 + 2 * k], "hi")});
            out.push_back(make_problem(f[0], arity, f[2], domains, detail::parse_bool_field(f.back())));
        } catch (const Error& e) {
            throw ParseError("problem file line " + std::to_string(lineno) + ": " + e.what());
        }
    }
    return out;
}

inline std::vector<ProblemSpec> load_problem_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open problem file '" + path + "'");
    return parse_problem_csv(in);
}

inline CaseTable sample_table(const ProblemSpec& spec, std::size_t n, Rng& rng) {
    std::vector<double> inputs;
    std::vector<double> targets;
    inputs.reserve(n * spec.arity);
    targets.reserve(n);
    std::vector<double> x(spec.arity);
    for (std::size_t i = 0; i < n; ++i) {
        double y = 0.0;
        // Out-of-domain points are resampled unless invalid targets are allowed.
        for (int attempt = 0;; ++attempt) {
            for (std::size_t k = 0; k < spec.arity; ++k) x[k] = uniform_real(rng, spec.domains[k].lo, spec.domains[k].hi);
            y = spec.evaluate(x);
            if (spec.allow_invalid || std::isfinite(y)) break;
            if (attempt > 1000)
                throw DegenerateDomain("problem '" + spec.name + "' produces no valid targets on its domain");
        }
        inputs.insert(inputs.end(), x.begin(), x.end());
        targets.push_back(y);
    }
    return CaseTable(spec.arity, std::move(inputs), std::move(targets));
}

struct DataSplit {
    CaseTable train;
    CaseTable test;
};

// Training and test tables drawn independently from the problem's domain.
inline DataSplit generate_data(const ProblemSpec& spec, Rng& rng, std::size_t n_train = kTrainCases,
                               std::size_t n_test = kTestCases) {
    DataSplit d{sample_table(spec, n_train, rng), sample_table(spec, n_test, rng)};
    if (d.train.invalid_target_count() == d.train.n_cases())
        throw DegenerateDomain("every training target of problem '" + spec.name + "' is invalid");
    return d;
}

struct RunRecord {
    std::uint64_t seed = 0;
    bool validated = false;
    double max_relative_error = 0.0;
    double best_score = 0.0;
    std::uint64_t generations = 0;
    double elapsed_seconds = 0.0;
    std::string model;
    Termination termination = Termination::GenerationCap;
};

struct ProblemOutcome {
    std::string name;
    std::size_t repeats = 0;
    std::size_t validated_count = 0;
    bool typical = false; // validated in at least half the runs
    bool best = false;    // validated at least once
    std::vector<RunRecord> runs;
};

struct SuiteReport {
    FitnessKind fitness = FitnessKind::PointToPoint;
    std::size_t repeats = 0;
    std::vector<ProblemOutcome> problems;

    std::size_t typical_count() const {
        return static_cast<std::size_t>(std::count_if(problems.begin(), problems.end(), [](const auto& p) { return p.typical; }));
    }
    std::size_t best_count() const {
        return static_cast<std::size_t>(std::count_if(problems.begin(), problems.end(), [](const auto& p) { return p.best; }));
    }
    std::size_t validated_runs() const {
        std::size_t n = 0;
        for (const auto& p : problems) n += p.validated_count;
        return n;
    }
};

inline void tally(ProblemOutcome& o) {
    o.repeats = o.runs.size();
    o.validated_count = static_cast<std::size_t>(std::count_if(o.runs.begin(), o.runs.end(), [](const auto& r) { return r.validated; }));
    o.typical = o.repeats > 0 && 2 * o.validated_count >= o.repeats;
    o.best = o.validated_count >= 1;
}

// Seed of repeat `k` of a problem: independent of the problem order.
inline std::uint64_t run_seed(std::uint64_t base, const std::string& problem, std::size_t k) {
    std::uint64_t h = 1469598103934665603ull;
    for (unsigned char c : problem) h = (h ^ c) * 1099511628211ull;
    return derive_seed(base, h + k);
}

// Training and test data of a seeded run; the data stream is separate from
// the engine's.
inline DataSplit problem_data(const ProblemSpec& spec, const RunConfig& config, std::uint64_t seed) {
    Rng data_rng(derive_seed(seed, 0xDA7A));
    return generate_data(spec, data_rng, config.batch_size, config.test_size);
}

// One seeded run of one problem: fresh data, fresh engine.
inline RunRecord run_problem(const ProblemSpec& spec, RunConfig config, std::uint64_t seed,
                             const GenerationCallback& on_generation = {}) {
    config.arity = spec.arity;
    config.seed = seed;
    const DataSplit data = problem_data(spec, config, seed);
    const RunResult res = run(config, data.train, data.test, on_generation);
    RunRecord r;
    r.seed = seed;
    r.validated = res.validation.validated;
    r.max_relative_error = res.validation.max_relative_error;
    r.best_score = res.best_score;
    r.generations = res.generations;
    r.elapsed_seconds = res.elapsed_seconds;
    r.model = res.infix;
    r.termination = res.termination;
    return r;
}

using RunObserver = std::function<void(const ProblemSpec&, std::size_t, const RunRecord&)>;

// `repeats` independently seeded runs per problem.
inline SuiteReport run_suite(const std::vector<ProblemSpec>& problems, const RunConfig& config, std::size_t repeats = 10,
                             const RunObserver& observer = {}) {
    SuiteReport rep;
    rep.fitness = config.fitness;
    rep.repeats = repeats;
    for (const auto& spec : problems) {
        ProblemOutcome o;
        o.name = spec.name;
        for (std::size_t k = 0; k < repeats; ++k) {
            o.runs.push_back(run_problem(spec, config, run_seed(config.seed, spec.name, k)));
            if (observer) observer(spec, k, o.runs.back());
        }
        tally(o);
        rep.problems.push_back(std::move(o));
    }
    return rep;
}

struct NanExperimentReport {
    FitnessKind fitness = FitnessKind::PointToPoint;
    ProblemOutcome restricted;
    ProblemOutcome widened;
};

// The quadratic-root target on a real-only domain versus a wider domain
// whose negative discriminants leave NaN targets in the training data.
inline NanExperimentReport quadratic_nan_experiment(const RunConfig& config, std::size_t repeats = 10,
                                                    const RunObserver& observer = {}) {
    NanExperimentReport rep;
    rep.fitness = config.fitness;
    const ProblemSpec narrow = quadratic_restricted();
    const ProblemSpec wide = quadratic_widened();
    rep.restricted.name = narrow.name;
    rep.widened.name = wide.name;
    for (std::size_t k = 0; k < repeats; ++k) {
        rep.restricted.runs.push_back(run_problem(narrow, config, run_seed(config.seed, narrow.name, k)));
        if (observer) observer(narrow, k, rep.restricted.runs.back());
        rep.widened.runs.push_back(run_problem(wide, config, run_seed(config.seed, wide.name, k)));
        if (observer) observer(wide, k, rep.widened.runs.back());
    }
    tally(rep.restricted);
    tally(rep.widened);
    return rep;
}

} // namespace rpne
