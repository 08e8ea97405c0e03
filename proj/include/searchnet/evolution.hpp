#pragma once

// Growth process for the user/topic graph: per step one node arrives, copies
// edges from a preferentially chosen prototype on its own side, and with
// probability p_search the search engine adds further edges to nodes on the
// opposite side.

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <vector>

#include "searchnet/graph.hpp"
#include "searchnet/rng.hpp"

namespace searchnet {

struct SearchPolicy {
    enum class Kind { UniformRandom, DegreeRanked, SimilarityRanked };

    // Uniform by default: degree-proportional picks are extra preferential
    // attachment and leave the tail exponent where it was.
    Kind kind = Kind::UniformRandom;
    /// DegreeRanked: candidate weight is degree^exponent.
    double exponent = 1.0;
    /// SimilarityRanked: added to every Jaccard score so the weights always normalize.
    double smoothing = 0.01;

    void validate() const;
    friend bool operator==(const SearchPolicy&, const SearchPolicy&) = default;
};

const char* policy_name(SearchPolicy::Kind k) noexcept;
SearchPolicy::Kind parse_policy_kind(const std::string& name);

struct EvolutionConfig {
    double beta = 0.5;      // probability that the arrival is a user
    double p_search = 0.1;  // per-arrival search engine activation probability
    std::uint32_t c_u = 2;  // edges copied by a new user
    std::uint32_t c_t = 2;  // edges copied by a new topic
    /// Extra edges per activation; unset means c_u for users and c_t for topics.
    std::optional<std::uint32_t> search_edges_per_activation;
    SearchPolicy search_policy;
    std::uint64_t steps = 0;
    std::uint64_t seed = 0;

    void validate() const;
    std::uint32_t copy_count(Side side) const noexcept { return side == Side::User ? c_u : c_t; }
    std::uint32_t search_edge_count(Side side) const noexcept {
        return search_edges_per_activation.value_or(copy_count(side));
    }
    friend bool operator==(const EvolutionConfig&, const EvolutionConfig&) = default;
};

struct StepReport {
    std::uint64_t time = 0;
    Side arrival_side = Side::User;
    NodeRef new_node;
    NodeRef prototype;
    /// Opposite-side indices linked by copying, in draw order.
    std::vector<std::uint32_t> copied_edges;
    /// Opposite-side indices linked by the search engine, in draw order.
    std::vector<std::uint32_t> search_edges;
    bool search_fired = false;

    friend bool operator==(const StepReport&, const StepReport&) = default;
};

/// Per-step random streams. The arrival stream feeds, in order: the side
/// coin, the prototype draw, then the copy choices. The search stream feeds
/// the activation gate and then the search choices. Both depend only on
/// (seed, time), so runs that differ only in p_search see identical arrival
/// draws at every step.
struct StepStreams {
    Rng arrival;
    Rng search;

    static StepStreams for_step(std::uint64_t seed, std::uint64_t time) noexcept;
};

/// One arrival. Does not validate `config` (tests drive degenerate values
/// such as beta = 1 through here). Throws SamplingError if the arrival side
/// has no degree mass.
StepReport evolve_step(BipartiteGraph& graph, const EvolutionConfig& config, StepStreams& streams,
                       std::uint64_t time);

inline StepReport evolve_step(BipartiteGraph& graph, const EvolutionConfig& config, std::uint64_t time) {
    StepStreams streams = StepStreams::for_step(config.seed, time);
    return evolve_step(graph, config, streams, time);
}

using StepObserver = std::function<void(const StepReport&, const BipartiteGraph&)>;

struct EvolutionTrace {
    std::vector<StepReport> steps;
};

/// Applies config.steps arrivals at times first_time, first_time + 1, ...
/// Observers see every report after it is applied. An observer exception
/// aborts the run with an EvolutionError naming the step.
EvolutionTrace run_evolution(BipartiteGraph& graph, const EvolutionConfig& config,
                             const std::vector<StepObserver>& observers = {}, std::uint64_t first_time = 1);

/// One JSON object per line.
void write_trace_jsonl(std::ostream& os, const EvolutionTrace& trace);

}  // namespace searchnet
