#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <functional>
#include <string>
#include <string_view>
#include <vector>

#include "rpne/backend.hpp"
#include "rpne/case_table.hpp"
#include "rpne/config.hpp"
#include "rpne/fitness.hpp"
#include "rpne/infix.hpp"
#include "rpne/population.hpp"
#include "rpne/random.hpp"
#include "rpne/selection.hpp"
#include "rpne/validation.hpp"
#include "rpne/variation.hpp"

namespace rpne {

struct GenerationStats {
    std::uint64_t generation = 0;
    std::size_t evaluated = 0;   // live individuals scored this generation
    std::size_t survivors = 0;
    std::size_t live = 0;        // after births
    std::size_t target = 0;      // schedule size for the next generation
    double best = 0.0;
    double median = 0.0;
    double best_ever = 0.0;
    std::uint64_t evals_total = 0;
    std::size_t dead_pool = 0;
    std::size_t arena = 0;
    std::uint64_t allocations = 0; // cumulative new-slot allocations
    std::uint64_t submissions = 0; // backend sub-batches this generation
    double elapsed_ms = 0.0;
};

enum class Termination { Converged, BudgetExhausted, GenerationCap };

inline std::string_view termination_name(Termination t) {
    switch (t) {
    case Termination::Converged: return "converged";
    case Termination::BudgetExhausted: return "budget_exhausted";
    case Termination::GenerationCap: return "generation_cap";
    }
    return "?";
}

// One evolving population bound to a fixed training table.
//
// Each generation: score every live slot once (delegated to the backend in
// sub-batches), select survivors, push the dead onto the dead pool, and
// refill to the next schedule size with mutated copies of uniformly chosen
// survivors. There is no crossover.
class Engine {
public:
    Engine(RunConfig config, const CaseTable& train)
        : cfg_(std::move(config)),
          train_(train),
          schedule_(cfg_.effective_schedule()),
          fn_(cfg_.fitness_fn()),
          space_(cfg_.genome_space()),
          backend_(cfg_.backend, cfg_.backend_capacity, cfg_.worker_count()),
          rng_(derive_seed(cfg_.seed, 0x45564F)),
          pop_(schedule_.max_size(), cfg_.max_genome_len) {
        if (train_.arity() != cfg_.arity)
            throw DimensionMismatch("config arity " + std::to_string(cfg_.arity) + " but training table arity " +
                                    std::to_string(train_.arity()));
        if (train_.n_cases() > kMaxCasesPerBatch)
            throw CapExceeded("training table exceeds " + std::to_string(kMaxCasesPerBatch) + " cases");
    }

    // Generation-0 fill with random genomes at the first stage's size.
    void initialize() {
        const std::size_t n = schedule_.target_size(0);
        std::vector<std::uint32_t> live;
        live.reserve(n);
        for (std::size_t i = 0; i < n; ++i) {
            const std::uint32_t id = pop_.acquire();
            random_genome_into(rng_, space_, pop_.slot(id));
            live.push_back(id);
        }
        pop_.set_live(std::move(live));
    }

    // Replaces the population with the given genomes.
    void seed_population(const std::vector<Genome>& genomes) {
        std::vector<std::uint32_t> live;
        for (const std::uint32_t id : pop_.live()) pop_.release(id);
        for (const Genome& g : genomes) {
            const std::uint32_t id = pop_.acquire();
            pop_.slot(id).tokens.assign(g.tokens.begin(), g.tokens.end());
            live.push_back(id);
        }
        pop_.set_live(std::move(live));
    }

    // Scores the current population and updates the best-ever genome without
    // selection or births.
    void score_only() {
        score_live();
        update_best();
    }

    GenerationStats step() {
        const auto submissions_before = backend_.submissions();
        score_live();
        GenerationStats st;
        st.generation = generation_;
        st.evaluated = pop_.live_count();
        st.best = update_best();
        st.median = median_score();
        st.submissions = backend_.submissions() - submissions_before;
        evals_total_ += static_cast<std::uint64_t>(st.evaluated) * train_.n_cases();
        st.evals_total = evals_total_;

        const std::size_t next_target = schedule_.target_size(generation_ + 1);
        const auto wanted = static_cast<std::size_t>(std::llround(cfg_.survival_fraction * static_cast<double>(next_target)));
        const std::size_t keep = std::clamp<std::size_t>(wanted, 1, pop_.live_count());
        const SelectionResult sel = select_population(scores_, keep, rng_, cfg_.selection, &sel_counters_);

        survivors_.clear();
        const auto& live = pop_.live();
        for (std::size_t i = 0; i < live.size(); ++i) {
            if (sel.survives[i])
                survivors_.push_back(live[i]);
            else
                pop_.release(live[i]);
        }
        st.survivors = survivors_.size();

        next_live_.assign(survivors_.begin(), survivors_.end());
        while (next_live_.size() < next_target) {
            const std::uint32_t child = pop_.acquire();
            const std::uint32_t parent = survivors_[uniform_index(rng_, survivors_.size())];
            mutate_into(rng_, pop_.slot(parent), pop_.slot(child), space_, cfg_.mutation);
            next_live_.push_back(child);
        }
        pop_.live_mut().swap(next_live_);

        ++generation_;
        st.live = pop_.live_count();
        st.target = next_target;
        st.best_ever = best_score_;
        st.dead_pool = pop_.dead_count();
        st.arena = pop_.arena_size();
        st.allocations = pop_.allocations();
        return st;
    }

    // Best score at the N*M ceiling, up to rounding in r for correlation.
    bool perfect() const noexcept {
        return has_best_ && best_score_ >= fn_.max_score(train_.n_cases()) * (1.0 - 1e-12);
    }

    std::uint64_t generation() const noexcept { return generation_; }
    const Population& population() const noexcept { return pop_; }
    const Backend& backend() const noexcept { return backend_; }
    const SelectionCounters& selection_counters() const noexcept { return sel_counters_; }
    const std::vector<FitnessRecord>& records() const noexcept { return records_; }
    const Schedule& schedule() const noexcept { return schedule_; }
    const FitnessFn& fitness() const noexcept { return fn_; }

    bool has_best() const noexcept { return has_best_; }
    const Genome& best() const noexcept { return best_; }
    double best_score() const noexcept { return best_score_; }
    const FitnessRecord& best_record() const noexcept { return best_record_; }

private:
    void score_live() {
        ptrs_.clear();
        for (const std::uint32_t id : pop_.live()) ptrs_.push_back(&pop_.slot(id));
        backend_.evaluate_and_score(ptrs_, train_, fn_, records_);
        scores_.resize(records_.size());
        for (std::size_t i = 0; i < records_.size(); ++i) scores_[i] = records_[i].score;
    }

    // Generation best (ties go to the shorter genome) folded into the
    // best-ever record. Returns the generation best score.
    double update_best() {
        if (records_.empty()) return 0.0;
        std::size_t bi = 0;
        for (std::size_t i = 1; i < records_.size(); ++i) {
            if (scores_[i] > scores_[bi] || (scores_[i] == scores_[bi] && ptrs_[i]->size() < ptrs_[bi]->size())) bi = i;
        }
        const double s = scores_[bi];
        if (!has_best_ || s > best_score_ || (s == best_score_ && ptrs_[bi]->size() < best_.size())) {
            best_.tokens.assign(ptrs_[bi]->tokens.begin(), ptrs_[bi]->tokens.end());
            best_score_ = s;
            best_record_ = records_[bi];
            has_best_ = true;
        }
        return s;
    }

    double median_score() {
        if (scores_.empty()) return 0.0;
        median_buf_.assign(scores_.begin(), scores_.end());
        const auto mid = median_buf_.begin() + static_cast<std::ptrdiff_t>(median_buf_.size() / 2);
        std::nth_element(median_buf_.begin(), mid, median_buf_.end());
        return *mid;
    }

    RunConfig cfg_;
    const CaseTable& train_;
    Schedule schedule_;
    FitnessFn fn_;
    GenomeSpace space_;
    Backend backend_;
    Rng rng_;
    Population pop_;
    std::uint64_t generation_ = 0;
    std::uint64_t evals_total_ = 0;
    SelectionCounters sel_counters_;

    std::vector<const Genome*> ptrs_;
    std::vector<FitnessRecord> records_;
    std::vector<double> scores_;
    std::vector<double> median_buf_;
    std::vector<std::uint32_t> survivors_;
    std::vector<std::uint32_t> next_live_;

    bool has_best_ = false;
    Genome best_;
    double best_score_ = 0.0;
    FitnessRecord best_record_;
};

struct RunResult {
    Genome best;
    std::string infix;
    double best_score = 0.0;
    FitnessRecord best_record;
    std::vector<GenerationStats> history;
    ValidationReport validation;
    Termination termination = Termination::GenerationCap;
    std::uint64_t generations = 0;
    std::uint64_t evals_total = 0;
    double elapsed_seconds = 0.0;
};

using GenerationCallback = std::function<void(const GenerationStats&)>;

// Evolves under the configured budget (wall clock and/or generation cap),
// stopping early once the training score reaches its ceiling when
// stop_on_perfect is set. The best-ever genome is validated on `test`.
inline RunResult run(const RunConfig& config, const CaseTable& train, const CaseTable& test,
                     const GenerationCallback& on_generation = {}) {
    config.check();
    using clock = std::chrono::steady_clock;
    const auto t0 = clock::now();
    auto elapsed = [&] { return std::chrono::duration<double>(clock::now() - t0).count(); };

    Engine engine(config, train);
    engine.initialize();
    RunResult result;
    for (;;) {
        if (config.max_generations && engine.generation() >= *config.max_generations) {
            result.termination = Termination::GenerationCap;
            break;
        }
        if (config.time_limit_seconds > 0 && elapsed() >= config.time_limit_seconds) {
            result.termination = Termination::BudgetExhausted;
            break;
        }
        GenerationStats st = engine.step();
        st.elapsed_ms = config.record_timing ? elapsed() * 1000.0 : 0.0;
        if (on_generation) on_generation(st);
        result.history.push_back(st);
        if (config.stop_on_perfect && engine.perfect()) {
            result.termination = Termination::Converged;
            break;
        }
    }
    if (!engine.has_best()) engine.score_only();

    result.best = engine.best();
    result.infix = to_infix(result.best);
    result.best_score = engine.best_score();
    result.best_record = engine.best_record();
    result.generations = engine.generation();
    result.evals_total = result.history.empty() ? 0 : result.history.back().evals_total;
    result.validation = validate_model(result.best, test);
    result.elapsed_seconds = elapsed();
    return result;
}

} // namespace rpne
