#pragma once

// Discrete-time SIR rumor spreading over users. Two users are in contact
// when they share at least one topic. An optional search channel exposes
// susceptible users independently of the contact structure.
//
// Every random decision is a counter draw keyed by the identities involved:
//   contact   (seed, v, age of v's infection) hashed with target w
//   recovery  (seed, age) hashed with v
//   search    (seed, step) hashed with w
// A run with the search channel therefore replays every contact and recovery
// event of the run without it, only earlier or equally early, so coverage
// with the engine never falls below coverage without it.

#include <cstdint>
#include <iosfwd>
#include <vector>

#include "searchnet/evolution.hpp"
#include "searchnet/graph.hpp"

namespace searchnet {

enum class ExposureModel { PrevalenceScaled, TopicMediated };

const char* exposure_model_name(ExposureModel m) noexcept;
ExposureModel parse_exposure_model(const std::string& name);

struct SirConfig {
    double lambda = 0.7;             // per-contact infection probability
    double mu = 0.07;                // per-step recovery probability
    double xi = 0.7;                 // search channel exposure probability
    double initial_fraction = 0.01;  // l0 / n
    std::uint32_t max_steps = 200;
    bool engine_enabled = true;
    ExposureModel exposure_model = ExposureModel::PrevalenceScaled;
    /// TopicMediated only: activation probability of a search and the
    /// ranking that decides which topics it lands on.
    double search_probability = 0.1;
    SearchPolicy search_policy;
    std::uint64_t seed = 0;

    void validate() const;
    friend bool operator==(const SirConfig&, const SirConfig&) = default;
};

enum class Health : std::uint8_t { Susceptible, Infectious, Recovered };

struct SirState {
    std::vector<Health> status;
    std::vector<std::uint32_t> infected_at;  // step of infection; meaningful unless Susceptible
    std::uint32_t time = 0;
    std::uint64_t aware = 0;  // infectious + recovered
    std::uint64_t infectious = 0;

    std::size_t size() const noexcept { return status.size(); }
    std::uint64_t susceptible() const noexcept { return status.size() - aware; }
    std::uint64_t recovered() const noexcept { return aware - infectious; }
};

/// ceil(initial_fraction * n) distinct uniform users infectious (at least
/// one), the rest susceptible, time 0. Throws ParameterError if the graph
/// has no users.
SirState sir_init(const BipartiteGraph& graph, const SirConfig& config);

/// One synchronous slot: contact infections, then search exposures, then
/// recovery of users that were infectious at the start of the slot.
SirState sir_step(SirState state, const BipartiteGraph& graph, const SirConfig& config);

/// m_t / n, zero for an empty state.
double rumor_coverage(const SirState& state) noexcept;

struct SirSample {
    std::uint32_t t = 0;
    std::uint64_t susceptible = 0;
    std::uint64_t infectious = 0;
    std::uint64_t recovered = 0;
    double coverage = 0.0;

    friend bool operator==(const SirSample&, const SirSample&) = default;
};

struct SirTrace {
    std::vector<SirSample> series;  // t = 0 .. last executed step
    SirState final_state;
    std::uint32_t steps_to_stability = 0;
};

/// Runs until max_steps or until nobody is infectious.
SirTrace run_sir(const BipartiteGraph& graph, const SirConfig& config);

/// Coverage at step t, holding the last value once the run has absorbed.
double coverage_at(const SirTrace& trace, std::uint32_t t) noexcept;

/// CSV: t,susceptible,infectious,recovered,coverage
void write_sir_csv(std::ostream& os, const SirTrace& trace);

}  // namespace searchnet
