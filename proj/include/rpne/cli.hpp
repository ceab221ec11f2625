#pragma once

#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "rpne/bench.hpp"
#include "rpne/config.hpp"
#include "rpne/engine.hpp"
#include "rpne/errors.hpp"
#include "rpne/report.hpp"

namespace rpne::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 1;
inline constexpr int kExitUnvalidated = 2;

// Flags shared by every verb. Anything set here overrides the config file.
struct CommonOptions {
    std::string config_path;
    std::string problems_csv;
    std::optional<std::uint64_t> seed;
    std::optional<std::uint64_t> generations;
    std::optional<double> time_limit;
    std::string fitness;
    std::string backend;
    std::string selection;
    std::string output;
    bool no_timing = false;
};

inline void add_common(CLI::App& cmd, CommonOptions& o) {
    cmd.add_option("-c,--config", o.config_path, "JSON config file");
    cmd.add_option("--problems", o.problems_csv, "CSV problem file (replaces the built-in registry)");
    cmd.add_option("--seed", o.seed, "base seed");
    cmd.add_option("--generations", o.generations, "generation cap");
    cmd.add_option("--time-limit", o.time_limit, "wall-clock budget per run, seconds (0 disables)");
    cmd.add_option("--fitness", o.fitness, "ptpt or corr");
    cmd.add_option("--backend", o.backend, "reference or parallel");
    cmd.add_option("--selection", o.selection, "microcosm or fullrank");
    cmd.add_option("-o,--output", o.output, "report path (default: stdout)");
    cmd.add_flag("--no-timing", o.no_timing, "write zero elapsed times so outputs are reproducible byte for byte");
}

inline RunConfig resolve_config(const CommonOptions& o) {
    RunConfig cfg = o.config_path.empty() ? RunConfig{} : load_config(o.config_path);
    if (o.seed) cfg.seed = *o.seed;
    if (o.generations) cfg.max_generations = *o.generations;
    if (o.time_limit) cfg.time_limit_seconds = *o.time_limit;
    if (!o.fitness.empty()) {
        cfg.fitness = parse_fitness_kind(o.fitness);
        cfg.max_case_score.reset();
    }
    if (!o.backend.empty()) cfg.backend = parse_backend_kind(o.backend);
    if (!o.selection.empty()) cfg.selection.method = parse_selection_method(o.selection);
    if (o.no_timing) cfg.record_timing = false;
    return cfg;
}

inline std::vector<ProblemSpec> resolve_registry(const CommonOptions& o) {
    return o.problems_csv.empty() ? builtin_problems() : load_problem_csv(o.problems_csv);
}

inline const ProblemSpec& resolve_problem(const std::vector<ProblemSpec>& registry, const std::string& name) {
    if (name.empty()) throw ConfigError("--problem is required");
    if (const ProblemSpec* p = find_problem(registry, name)) return *p;
    std::string known;
    for (const auto& p : registry) known += (known.empty() ? "" : ", ") + p.name;
    throw ConfigError("unknown problem '" + name + "' (known: " + known + ")");
}

inline void emit(const nlohmann::json& j, const std::string& path, std::ostream& out) {
    if (path.empty()) {
        out << j.dump(2) << '\n';
        return;
    }
    std::ofstream f(path);
    if (!f) throw ConfigError("cannot write '" + path + "'");
    f << j.dump(2) << '\n';
}

inline int cmd_run(const CommonOptions& o, const std::string& problem, const std::string& telemetry, std::ostream& out,
                   std::ostream& err) {
    const auto registry = resolve_registry(o);
    const ProblemSpec& spec = resolve_problem(registry, problem);
    RunConfig cfg = resolve_config(o);
    cfg.arity = spec.arity;
    cfg.check();

    std::unique_ptr<std::ofstream> tel;
    if (!telemetry.empty()) {
        tel = std::make_unique<std::ofstream>(telemetry);
        if (!*tel) throw ConfigError("cannot write '" + telemetry + "'");
    }
    const DataSplit data = problem_data(spec, cfg, cfg.seed);
    const RunResult res = run(cfg, data.train, data.test, [&](const GenerationStats& s) {
        if (tel) write_telemetry_line(*tel, s);
    });
    emit(run_report_json(spec.name, cfg, res), o.output, out);
    err << spec.name << ": " << (res.validation.validated ? "validated" : "not validated") << " after "
        << res.generations << " generations (" << termination_name(res.termination) << "): " << res.infix << '\n';
    return res.validation.validated ? kExitOk : kExitUnvalidated;
}

inline int cmd_bench(const CommonOptions& o, const std::vector<std::string>& only, std::size_t repeats,
                     std::ostream& out, std::ostream& err) {
    const auto registry = resolve_registry(o);
    std::vector<ProblemSpec> problems;
    if (only.empty())
        problems = registry;
    else
        for (const auto& name : only) problems.push_back(resolve_problem(registry, name));
    RunConfig cfg = resolve_config(o);
    cfg.check();
    const SuiteReport rep = run_suite(problems, cfg, repeats, [&](const ProblemSpec& p, std::size_t k, const RunRecord& r) {
        err << p.name << " #" << k << ": " << (r.validated ? "validated" : "-") << " " << r.model << '\n';
    });
    emit(suite_report_json(rep, cfg.record_timing), o.output, out);
    print_suite_table(err, rep);
    return kExitOk;
}

inline int cmd_validate(const CommonOptions& o, const std::string& problem, const std::string& genome_text,
                        std::ostream& out) {
    const auto registry = resolve_registry(o);
    const ProblemSpec& spec = resolve_problem(registry, problem);
    RunConfig cfg = resolve_config(o);
    const Genome g = parse_genome(genome_text);
    if (!validate(g, spec.arity, OperatorSet::all(), kMaxGenomeLengthLimit))
        throw ConfigError("genome is not valid for problem '" + spec.name + "'");
    const DataSplit data = problem_data(spec, cfg, cfg.seed);
    const ValidationReport v = validate_model(g, data.test);
    nlohmann::json j{{"problem", spec.name}, {"seed", cfg.seed}, {"model", to_infix(g)}, {"genome", to_text(g)},
                     {"validation", validation_json(v)}};
    emit(j, o.output, out);
    return v.validated ? kExitOk : kExitUnvalidated;
}

inline int cmd_nan_experiment(const CommonOptions& o, std::size_t repeats, std::ostream& out, std::ostream& err) {
    RunConfig cfg = resolve_config(o);
    cfg.arity = 3;
    cfg.check();
    const NanExperimentReport rep =
        quadratic_nan_experiment(cfg, repeats, [&](const ProblemSpec& p, std::size_t k, const RunRecord& r) {
            err << p.name << " #" << k << ": " << (r.validated ? "validated" : "-") << " " << r.model << '\n';
        });
    emit(nan_report_json(rep, cfg.record_timing), o.output, out);
    err << "restricted " << rep.restricted.validated_count << "/" << rep.restricted.repeats << ", widened "
        << rep.widened.validated_count << "/" << rep.widened.repeats << '\n';
    return kExitOk;
}

// Entry point. Returns the process exit code; never calls exit().
inline int main(int argc, const char* const* argv, std::ostream& out = std::cout, std::ostream& err = std::cerr) {
    CLI::App app{"rpne: symbolic regression with RPN linear genomes"};
    app.require_subcommand(1);

    CommonOptions o;
    std::string problem, telemetry, genome;
    std::vector<std::string> only;
    std::size_t repeats = 10;

    auto* run_cmd = app.add_subcommand("run", "evolve a model for one problem");
    add_common(*run_cmd, o);
    run_cmd->add_option("-p,--problem", problem, "problem name")->required();
    run_cmd->add_option("--telemetry", telemetry, "JSONL telemetry path");

    auto* bench_cmd = app.add_subcommand("bench", "seeded repeats over the problem registry");
    add_common(*bench_cmd, o);
    bench_cmd->add_option("-p,--problem", only, "restrict to these problems");
    bench_cmd->add_option("-r,--repeats", repeats, "runs per problem")->check(CLI::PositiveNumber);

    auto* val_cmd = app.add_subcommand("validate", "check a genome against a problem's test set");
    add_common(*val_cmd, o);
    val_cmd->add_option("-p,--problem", problem, "problem name")->required();
    val_cmd->add_option("-g,--genome", genome, "RPN genome text, e.g. \"x0 x1 add\"")->required();

    auto* nan_cmd = app.add_subcommand("nan-experiment", "quadratic root on restricted vs widened domains");
    add_common(*nan_cmd, o);
    nan_cmd->add_option("-r,--repeats", repeats, "runs per setting")->check(CLI::PositiveNumber);

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << '\n';
        return kExitUsage;
    }

    try {
        if (*run_cmd) return cmd_run(o, problem, telemetry, out, err);
        if (*bench_cmd) return cmd_bench(o, only, repeats, out, err);
        if (*val_cmd) return cmd_validate(o, problem, genome, out);
        if (*nan_cmd) return cmd_nan_experiment(o, repeats, out, err);
    } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
        return kExitUsage;
    }
    return kExitUsage;
}

} // namespace rpne::cli
