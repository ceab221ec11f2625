#pragma once

#include <algorithm>
#include <atomic>
#include <cstddef>
#include <cstdint>
#include <cstdlib>
#include <span>
#include <string>
#include <string_view>
#include <thread>
#include <vector>

#include "rpne/case_table.hpp"
#include "rpne/errors.hpp"
#include "rpne/fitness.hpp"
#include "rpne/genome.hpp"
#include "rpne/interpreter.hpp"

namespace rpne {

// Hard cap on fitness cases per individual in one submission, matching the
// per-block thread limit of the GPU execution model.
inline constexpr std::size_t kMaxCasesPerBatch = 1024;
inline constexpr std::size_t kDefaultBackendCapacity = 1024;

enum class BackendKind { Reference, Parallel };

inline std::string_view backend_name(BackendKind k) { return k == BackendKind::Reference ? "reference" : "parallel"; }

inline BackendKind parse_backend_kind(std::string_view s) {
    if (s == "reference") return BackendKind::Reference;
    if (s == "parallel") return BackendKind::Parallel;
    throw ConfigError("unknown backend '" + std::string(s) + "' (expected reference or parallel)");
}

// Worker count: RPNE_THREADS when set to a positive integer, otherwise the
// hardware concurrency (at least 1).
inline std::size_t default_worker_count() {
    if (const char* env = std::getenv("RPNE_THREADS")) {
        const long v = std::strtol(env, nullptr, 10);
        if (v > 0) return static_cast<std::size_t>(v);
    }
    return std::max(1u, std::thread::hardware_concurrency());
}

// Splits [0, n) into `workers` contiguous ranges and runs fn(begin, end) on
// each, the last range on the calling thread.
template <class Fn>
void parallel_for(std::size_t n, std::size_t workers, Fn&& fn) {
    workers = std::max<std::size_t>(1, std::min(workers, n));
    if (workers <= 1) {
        if (n) fn(std::size_t{0}, n);
        return;
    }
    std::vector<std::jthread> pool;
    pool.reserve(workers - 1);
    const std::size_t chunk = n / workers;
    const std::size_t extra = n % workers;
    std::size_t begin = 0;
    for (std::size_t w = 0; w < workers; ++w) {
        const std::size_t end = begin + chunk + (w < extra ? 1 : 0);
        if (w + 1 == workers)
            fn(begin, end);
        else
            pool.emplace_back([&fn, begin, end] { fn(begin, end); });
        begin = end;
    }
}

// Batched evaluation of a population slice against a case table.
//
// The reference backend runs the scalar interpreter one (individual, case)
// pair at a time. The parallel backend partitions individuals across
// workers (one "block" per individual) and evaluates each individual's
// cases column-wise (one lane per case). Both produce bitwise-identical
// outputs; scoring is shared code, so aggregates agree exactly.
//
// Slices larger than `capacity` individuals are split into sub-batches; each
// sub-batch counts as one submission.
class Backend {
public:
    explicit Backend(BackendKind kind = BackendKind::Parallel, std::size_t capacity = kDefaultBackendCapacity,
                     std::size_t workers = default_worker_count())
        : kind_(kind), capacity_(std::max<std::size_t>(1, capacity)), workers_(std::max<std::size_t>(1, workers)) {}

    BackendKind kind() const noexcept { return kind_; }
    std::size_t capacity() const noexcept { return capacity_; }
    std::size_t workers() const noexcept { return workers_; }

    std::uint64_t submissions() const noexcept { return submissions_.load(); }
    std::uint64_t case_evaluations() const noexcept { return evaluations_.load(); }
    void reset_counters() noexcept {
        submissions_ = 0;
        evaluations_ = 0;
    }

    EvalMatrix evaluate_batch(std::span<const Genome* const> genomes, const CaseTable& cases) {
        check(genomes, cases);
        EvalMatrix out(genomes.size(), cases.n_cases());
        for (std::size_t start = 0; start < genomes.size(); start += capacity_) {
            const std::size_t count = std::min(capacity_, genomes.size() - start);
            run_evaluation(genomes.subspan(start, count), cases, out, start);
            ++submissions_;
            evaluations_ += count * cases.n_cases();
        }
        return out;
    }

    EvalMatrix evaluate_batch(std::span<const Genome> genomes, const CaseTable& cases) {
        std::vector<const Genome*> ptrs;
        ptrs.reserve(genomes.size());
        for (const Genome& g : genomes) ptrs.push_back(&g);
        return evaluate_batch(std::span<const Genome* const>(ptrs), cases);
    }

    std::vector<FitnessRecord> score_batch(const EvalMatrix& outputs, std::span<const double> targets,
                                           const FitnessFn& fn) const {
        if (outputs.rows() > 0 && outputs.cols() != targets.size())
            throw DimensionMismatch("evaluation matrix has " + std::to_string(outputs.cols()) + " cases but " +
                                    std::to_string(targets.size()) + " targets");
        std::vector<FitnessRecord> records(outputs.rows());
        score_rows(outputs, targets, fn, records, 0, outputs.rows());
        return records;
    }

    // Evaluate and score in sub-batches of `capacity` individuals without
    // materialising the whole population's output matrix.
    void evaluate_and_score(std::span<const Genome* const> genomes, const CaseTable& cases, const FitnessFn& fn,
                            std::vector<FitnessRecord>& records) {
        check(genomes, cases);
        records.resize(genomes.size());
        thread_local EvalMatrix scratch;
        for (std::size_t start = 0; start < genomes.size(); start += capacity_) {
            const std::size_t count = std::min(capacity_, genomes.size() - start);
            scratch.resize(count, cases.n_cases());
            run_evaluation(genomes.subspan(start, count), cases, scratch, 0);
            std::span<FitnessRecord> slice(records.data() + start, count);
            score_rows(scratch, cases.targets(), fn, slice, 0, count);
            ++submissions_;
            evaluations_ += count * cases.n_cases();
        }
    }

private:
    void check(std::span<const Genome* const> genomes, const CaseTable& cases) const {
        if (cases.n_cases() > kMaxCasesPerBatch)
            throw CapExceeded(std::to_string(cases.n_cases()) + " fitness cases exceed the per-batch cap of " +
                              std::to_string(kMaxCasesPerBatch));
        if (cases.n_cases() == 0) throw DimensionMismatch("case table is empty");
        for (const Genome* g : genomes) {
            for (const Token& t : g->tokens)
                if (t.op == Op::Var && t.var >= cases.arity())
                    throw DimensionMismatch("genome reads x" + std::to_string(t.var) + " but cases have arity " +
                                            std::to_string(cases.arity()));
        }
    }

    void run_evaluation(std::span<const Genome* const> genomes, const CaseTable& cases, EvalMatrix& out,
                        std::size_t row_offset) const {
        if (kind_ == BackendKind::Reference) {
            for (std::size_t i = 0; i < genomes.size(); ++i) {
                auto row = out.row(row_offset + i);
                for (std::size_t j = 0; j < cases.n_cases(); ++j) row[j] = eval_case(*genomes[i], cases.row(j));
            }
            return;
        }
        parallel_for(genomes.size(), workers_, [&](std::size_t begin, std::size_t end) {
            thread_local ColumnEvaluator evaluator;
            for (std::size_t i = begin; i < end; ++i) evaluator.evaluate(*genomes[i], cases, out.row(row_offset + i));
        });
    }

    template <class Records>
    void score_rows(const EvalMatrix& outputs, std::span<const double> targets, const FitnessFn& fn, Records& records,
                    std::size_t begin, std::size_t end) const {
        if (kind_ == BackendKind::Reference) {
            for (std::size_t i = begin; i < end; ++i) records[i] = score_row(fn, outputs.row(i), targets);
            return;
        }
        parallel_for(end - begin, workers_, [&](std::size_t b, std::size_t e) {
            for (std::size_t i = begin + b; i < begin + e; ++i) records[i] = score_row(fn, outputs.row(i), targets);
        });
    }

    BackendKind kind_;
    std::size_t capacity_;
    std::size_t workers_;
    std::atomic<std::uint64_t> submissions_{0};
    std::atomic<std::uint64_t> evaluations_{0};
};

// Free-function form of the batch contract.
inline EvalMatrix evaluate_batch(std::span<const Genome> genomes, const CaseTable& cases,
                                 BackendKind kind = BackendKind::Reference) {
    Backend backend(kind);
    return backend.evaluate_batch(genomes, cases);
}

inline std::vector<FitnessRecord> score_batch(const EvalMatrix& outputs, std::span<const double> targets,
                                              const FitnessFn& fn) {
    return Backend(BackendKind::Reference).score_batch(outputs, targets, fn);
}

} // namespace rpne
