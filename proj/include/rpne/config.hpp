#pragma once

#include <cstdint>
#include <fstream>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "rpne/backend.hpp"
#include "rpne/errors.hpp"
#include "rpne/fitness.hpp"
#include "rpne/selection.hpp"
#include "rpne/variation.hpp"

namespace rpne {

inline constexpr std::uint64_t kForever = std::numeric_limits<std::uint64_t>::max();

// Population size by generation: the first stage whose threshold exceeds the
// generation applies; the last stage applies forever.
struct Schedule {
    struct Stage {
        std::uint64_t until = kForever; // stage covers generations < until
        std::size_t size = 1;
    };
    std::vector<Stage> stages;

    // Five million individuals until generation 20, then one million.
    static Schedule ptpt_table() { return {{{20, 5'000'000}, {kForever, 1'000'000}}}; }
    // 5M / 3M / 1M / 500k, stepping every five generations, then 250k.
    static Schedule corr_table() {
        return {{{5, 5'000'000}, {10, 3'000'000}, {15, 1'000'000}, {20, 500'000}, {kForever, 250'000}}};
    }
    static Schedule constant(std::size_t size) { return {{{kForever, size}}}; }
    static Schedule for_fitness(FitnessKind k) { return k == FitnessKind::PointToPoint ? ptpt_table() : corr_table(); }

    // Every size divided by `divisor` (at least 1), stage boundaries kept.
    Schedule scaled(std::size_t divisor) const {
        Schedule s = *this;
        for (auto& st : s.stages) st.size = std::max<std::size_t>(1, st.size / std::max<std::size_t>(1, divisor));
        return s;
    }

    std::size_t target_size(std::uint64_t generation) const {
        for (const auto& st : stages)
            if (generation < st.until) return st.size;
        return stages.back().size;
    }

    std::size_t max_size() const {
        std::size_t m = 0;
        for (const auto& st : stages) m = std::max(m, st.size);
        return m;
    }

    void check() const {
        if (stages.empty()) throw ConfigError("schedule needs at least one stage");
        for (std::size_t i = 0; i < stages.size(); ++i) {
            if (stages[i].size < 1) throw ConfigError("schedule stage sizes must be >= 1");
            if (i > 0 && stages[i].until <= stages[i - 1].until)
                throw ConfigError("schedule thresholds must be strictly increasing");
        }
    }
};

inline std::size_t target_size(const Schedule& schedule, std::uint64_t generation) { return schedule.target_size(generation); }

struct RunConfig {
    std::size_t arity = 1;
    OperatorSet operators = OperatorSet::all();
    FitnessKind fitness = FitnessKind::PointToPoint;
    std::optional<double> max_case_score;  // defaults by fitness kind
    std::optional<Schedule> schedule;      // defaults to the fitness kind's table
    std::size_t scale_divisor = 100;
    std::size_t batch_size = 512;          // training cases per generation
    std::size_t test_size = 128;
    std::uint64_t seed = 1;
    double time_limit_seconds = 60.0;      // <= 0 disables the wall-clock budget
    std::optional<std::uint64_t> max_generations;
    BackendKind backend = BackendKind::Parallel;
    std::size_t backend_capacity = kDefaultBackendCapacity;
    std::size_t threads = 0;               // 0: RPNE_THREADS or hardware concurrency
    SelectionConfig selection;
    double survival_fraction = 0.5;
    MutationWeights mutation;
    std::size_t max_genome_len = kDefaultMaxGenomeLength;
    double constant_probability = 0.25;
    bool stop_on_perfect = true;
    bool record_timing = true;

    FitnessFn fitness_fn() const {
        const double def = fitness == FitnessKind::PointToPoint ? kDefaultPtptMaxScore : kDefaultCorrMaxScore;
        return {fitness, max_case_score.value_or(def)};
    }

    // Explicit schedules are used as given; table defaults are scaled.
    Schedule effective_schedule() const {
        return schedule ? *schedule : Schedule::for_fitness(fitness).scaled(scale_divisor);
    }

    GenomeSpace genome_space() const {
        GenomeSpace s;
        s.arity = arity;
        s.ops = operators;
        s.max_len = max_genome_len;
        s.constant_probability = constant_probability;
        return s;
    }

    std::size_t worker_count() const { return threads ? threads : default_worker_count(); }

    void check() const {
        if (arity < 1) throw ConfigError("arity must be >= 1");
        if (batch_size < 1 || batch_size > kMaxCasesPerBatch)
            throw ConfigError("batch_size must be in [1, " + std::to_string(kMaxCasesPerBatch) + "]");
        if (max_genome_len < 1 || max_genome_len > kMaxGenomeLengthLimit)
            throw ConfigError("max_genome_len must be in [1, " + std::to_string(kMaxGenomeLengthLimit) + "]");
        if (fitness_fn().max_case_score < 11) throw ConfigError("max_case_score must be >= 11");
        if (time_limit_seconds <= 0 && !max_generations)
            throw ConfigError("a positive time_limit or a max_generations cap is required");
        if (!(survival_fraction > 0.0 && survival_fraction <= 1.0))
            throw ConfigError("survival_fraction must be in (0, 1]");
        if (backend_capacity < 1) throw ConfigError("backend_capacity must be >= 1");
        if (selection.sample_size < 2) throw ConfigError("microcosm_sample must be >= 2");
        effective_schedule().check();
    }
};

// ---- JSON mapping -----------------------------------------------------------

inline nlohmann::json schedule_to_json(const Schedule& s) {
    auto arr = nlohmann::json::array();
    for (const auto& st : s.stages) {
        nlohmann::json j{{"size", st.size}};
        if (st.until != kForever) j["until"] = st.until;
        arr.push_back(j);
    }
    return arr;
}

inline Schedule schedule_from_json(const nlohmann::json& j) {
    Schedule s;
    for (const auto& st : j) {
        Schedule::Stage stage;
        stage.size = st.at("size").get<std::size_t>();
        if (st.contains("until") && !st["until"].is_null()) stage.until = st["until"].get<std::uint64_t>();
        s.stages.push_back(stage);
    }
    s.check();
    return s;
}

inline nlohmann::json to_json(const RunConfig& c) {
    nlohmann::json j;
    j["operators"] = c.operators.names();
    j["fitness"] = fitness_name(c.fitness);
    j["max_case_score"] = c.fitness_fn().max_case_score;
    j["schedule"] = schedule_to_json(c.effective_schedule());
    j["scale_divisor"] = c.scale_divisor;
    j["batch_size"] = c.batch_size;
    j["test_size"] = c.test_size;
    j["seed"] = c.seed;
    j["time_limit"] = c.time_limit_seconds;
    j["max_generations"] = c.max_generations ? nlohmann::json(*c.max_generations) : nlohmann::json(nullptr);
    j["backend"] = backend_name(c.backend);
    j["backend_capacity"] = c.backend_capacity;
    j["threads"] = c.threads;
    j["selection"] = selection_name(c.selection.method);
    j["microcosm_sample"] = c.selection.sample_size;
    j["full_sort_below"] = c.selection.full_sort_below;
    j["survival_curve"] = curve_name(c.selection.curve);
    j["survival_fraction"] = c.survival_fraction;
    j["mutation_weights"] = {{"point_replace", c.mutation.point_replace},
                             {"terminal_replace", c.mutation.terminal_replace},
                             {"constant_perturb", c.mutation.constant_perturb},
                             {"insert", c.mutation.insert},
                             {"delete", c.mutation.remove}};
    j["max_genome_len"] = c.max_genome_len;
    j["constant_probability"] = c.constant_probability;
    j["stop_on_perfect"] = c.stop_on_perfect;
    j["record_timing"] = c.record_timing;
    return j;
}

// Applies the keys present in `j` on top of `c`. Unknown keys are rejected.
inline void apply_json(RunConfig& c, const nlohmann::json& j) {
    if (!j.is_object()) throw ConfigError("config must be a JSON object");
    try {
        for (auto it = j.begin(); it != j.end(); ++it) {
            const std::string& k = it.key();
            const auto& v = it.value();
            if (k == "operators") c.operators = OperatorSet::from_names(v.get<std::vector<std::string>>());
            else if (k == "fitness") c.fitness = parse_fitness_kind(v.get<std::string>());
            else if (k == "max_case_score") c.max_case_score = v.is_null() ? std::nullopt : std::optional<double>(v.get<double>());
            else if (k == "schedule") c.schedule = v.is_null() ? std::nullopt : std::optional<Schedule>(schedule_from_json(v));
            else if (k == "scale_divisor") c.scale_divisor = v.get<std::size_t>();
            else if (k == "batch_size") c.batch_size = v.get<std::size_t>();
            else if (k == "test_size") c.test_size = v.get<std::size_t>();
            else if (k == "seed") c.seed = v.get<std::uint64_t>();
            else if (k == "time_limit") c.time_limit_seconds = v.get<double>();
            else if (k == "max_generations") c.max_generations = v.is_null() ? std::nullopt : std::optional<std::uint64_t>(v.get<std::uint64_t>());
            else if (k == "backend") c.backend = parse_backend_kind(v.get<std::string>());
            else if (k == "backend_capacity") c.backend_capacity = v.get<std::size_t>();
            else if (k == "threads") c.threads = v.get<std::size_t>();
            else if (k == "selection") c.selection.method = parse_selection_method(v.get<std::string>());
            else if (k == "microcosm_sample") c.selection.sample_size = v.get<std::size_t>();
            else if (k == "full_sort_below") c.selection.full_sort_below = v.get<std::size_t>();
            else if (k == "survival_curve") c.selection.curve = parse_survival_curve(v.get<std::string>());
            else if (k == "survival_fraction") c.survival_fraction = v.get<double>();
            else if (k == "mutation_weights") {
                c.mutation.point_replace = v.value("point_replace", c.mutation.point_replace);
                c.mutation.terminal_replace = v.value("terminal_replace", c.mutation.terminal_replace);
                c.mutation.constant_perturb = v.value("constant_perturb", c.mutation.constant_perturb);
                c.mutation.insert = v.value("insert", c.mutation.insert);
                c.mutation.remove = v.value("delete", c.mutation.remove);
            }
            else if (k == "max_genome_len") c.max_genome_len = v.get<std::size_t>();
            else if (k == "constant_probability") c.constant_probability = v.get<double>();
            else if (k == "stop_on_perfect") c.stop_on_perfect = v.get<bool>();
            else if (k == "record_timing") c.record_timing = v.get<bool>();
            else throw ConfigError("unknown config key '" + k + "'");
        }
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("bad config value: ") + e.what());
    }
}

inline RunConfig load_config(const std::string& path, RunConfig base = {}) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file '" + path + "'");
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(in);
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError("cannot parse config file '" + path + "': " + e.what());
    }
    apply_json(base, j);
    return base;
}

} // namespace rpne
