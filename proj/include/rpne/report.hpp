#pragma once

#include <cmath>
#include <ostream>
#include <string>

#include <nlohmann/json.hpp>

#include "rpne/bench.hpp"
#include "rpne/engine.hpp"
#include "rpne/genome.hpp"

namespace rpne {

// Non-finite reals become null so every report stays valid JSON.
inline nlohmann::json json_real(double v) { return std::isfinite(v) ? nlohmann::json(v) : nlohmann::json(nullptr); }

// One telemetry line per generation. elapsed_ms is the wall time since the
// run started (0 when timing is disabled).
inline nlohmann::json telemetry_json(const GenerationStats& s) {
    return {{"gen", s.generation},  {"live", s.evaluated},           {"best", json_real(s.best)},
            {"median", json_real(s.median)}, {"evals_total", s.evals_total}, {"deadpool", s.dead_pool},
            {"elapsed_ms", s.elapsed_ms}};
}

inline void write_telemetry_line(std::ostream& out, const GenerationStats& s) { out << telemetry_json(s).dump() << '\n'; }

inline nlohmann::json validation_json(const ValidationReport& v) {
    return {{"n_test", v.n_test},
            {"max_relative_error", json_real(v.max_relative_error)},
            {"failing_points", v.failing_points},
            {"validated", v.validated}};
}

inline nlohmann::json run_report_json(const std::string& problem, const RunConfig& cfg, const RunResult& r) {
    nlohmann::json j;
    j["problem"] = problem;
    j["seed"] = cfg.seed;
    j["fitness"] = fitness_name(cfg.fitness);
    j["model"] = r.infix;
    j["genome"] = to_text(r.best);
    j["score"] = json_real(r.best_score);
    j["max_score"] = cfg.fitness_fn().max_score(cfg.batch_size);
    if (r.best_record.r2) j["r2"] = json_real(*r.best_record.r2);
    j["c1"] = r.best_record.c1;
    j["c2"] = r.best_record.c2;
    j["generations"] = r.generations;
    j["evals_total"] = r.evals_total;
    j["termination"] = termination_name(r.termination);
    j["validation"] = validation_json(r.validation);
    if (cfg.record_timing) j["elapsed_seconds"] = r.elapsed_seconds;
    return j;
}

inline nlohmann::json outcome_json(const ProblemOutcome& o, bool with_timing) {
    auto runs = nlohmann::json::array();
    for (const auto& r : o.runs) {
        nlohmann::json jr{{"seed", r.seed},
                          {"validated", r.validated},
                          {"max_relative_error", json_real(r.max_relative_error)},
                          {"score", json_real(r.best_score)},
                          {"generations", r.generations},
                          {"termination", termination_name(r.termination)},
                          {"model", r.model}};
        if (with_timing) jr["elapsed_seconds"] = r.elapsed_seconds;
        runs.push_back(std::move(jr));
    }
    return {{"name", o.name},         {"repeats", o.repeats}, {"validated_count", o.validated_count},
            {"typical", o.typical},   {"best", o.best},       {"runs", std::move(runs)}};
}

inline nlohmann::json suite_report_json(const SuiteReport& rep, bool with_timing = true) {
    auto problems = nlohmann::json::array();
    for (const auto& p : rep.problems) problems.push_back(outcome_json(p, with_timing));
    return {{"fitness", fitness_name(rep.fitness)},
            {"repeats", rep.repeats},
            {"summary",
             {{"problems", rep.problems.size()},
              {"typical", rep.typical_count()},
              {"best", rep.best_count()},
              {"validated_runs", rep.validated_runs()}}},
            {"problems", std::move(problems)}};
}

inline nlohmann::json nan_report_json(const NanExperimentReport& rep, bool with_timing = true) {
    return {{"fitness", fitness_name(rep.fitness)},
            {"restricted", outcome_json(rep.restricted, with_timing)},
            {"widened", outcome_json(rep.widened, with_timing)}};
}

// Human-readable typical/best table for a suite.
inline void print_suite_table(std::ostream& out, const SuiteReport& rep) {
    out << "fitness " << fitness_name(rep.fitness) << ", " << rep.repeats << " repeats\n";
    for (const auto& p : rep.problems) {
        out << "  " << p.name << std::string(p.name.size() < 16 ? 16 - p.name.size() : 1, ' ') << p.validated_count << "/"
            << p.repeats << (p.typical ? "  typical" : "") << (p.best ? "  best" : "") << '\n';
    }
    out << "  typical " << rep.typical_count() << "/" << rep.problems.size() << ", best " << rep.best_count() << "/"
        << rep.problems.size() << '\n';
}

} // namespace rpne
