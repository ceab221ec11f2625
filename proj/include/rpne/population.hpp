#pragma once

#include <cstdint>
#include <vector>

#include "rpne/genome.hpp"

namespace rpne {

// Slot arena of genomes with a dead pool. Slots are created on demand, never
// released: a death pushes the slot id onto the dead pool and the next birth
// reuses it along with its token storage.
class Population {
public:
    Population() = default;

    Population(std::size_t capacity_hint, std::size_t max_genome_len) : max_len_(max_genome_len) {
        slots_.reserve(capacity_hint);
    }

    std::size_t arena_size() const noexcept { return slots_.size(); }
    std::size_t live_count() const noexcept { return live_.size(); }
    std::size_t dead_count() const noexcept { return dead_.size(); }
    // New slots created so far; stays flat once the arena has reached its
    // peak size.
    std::uint64_t allocations() const noexcept { return allocations_; }

    const std::vector<std::uint32_t>& live() const noexcept { return live_; }
    const std::vector<std::uint32_t>& dead_pool() const noexcept { return dead_; }

    Genome& slot(std::uint32_t id) noexcept { return slots_[id]; }
    const Genome& slot(std::uint32_t id) const noexcept { return slots_[id]; }

    // A recyclable slot from the dead pool, or a newly allocated one.
    std::uint32_t acquire() {
        if (!dead_.empty()) {
            const std::uint32_t id = dead_.back();
            dead_.pop_back();
            return id;
        }
        const auto id = static_cast<std::uint32_t>(slots_.size());
        Genome& g = slots_.emplace_back();
        g.tokens.reserve(max_len_);
        g.slot_id = id;
        ++allocations_;
        return id;
    }

    void release(std::uint32_t id) { dead_.push_back(id); }

    // Replaces the live list. Every id must be an acquired slot not in the
    // dead pool.
    void set_live(std::vector<std::uint32_t> ids) { live_ = std::move(ids); }

    std::vector<std::uint32_t>& live_mut() noexcept { return live_; }

    // live and dead pool partition the arena.
    bool conserved() const noexcept { return live_.size() + dead_.size() == slots_.size(); }

private:
    std::size_t max_len_ = kDefaultMaxGenomeLength;
    std::vector<Genome> slots_;
    std::vector<std::uint32_t> live_;
    std::vector<std::uint32_t> dead_;
    std::uint64_t allocations_ = 0;
};

} // namespace rpne
