#include "searchnet/evolution.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <string>

#include <json.hpp>

#include "searchnet/error.hpp"

namespace searchnet {

const char* policy_name(SearchPolicy::Kind k) noexcept {
    switch (k) {
    case SearchPolicy::Kind::UniformRandom:
        return "UniformRandom";
    case SearchPolicy::Kind::DegreeRanked:
        return "DegreeRanked";
    case SearchPolicy::Kind::SimilarityRanked:
        return "SimilarityRanked";
    }
    return "?";
}

SearchPolicy::Kind parse_policy_kind(const std::string& name) {
    for (auto k : {SearchPolicy::Kind::UniformRandom, SearchPolicy::Kind::DegreeRanked,
                   SearchPolicy::Kind::SimilarityRanked})
        if (name == policy_name(k)) return k;
    throw ParameterError("unknown search policy: " + name);
}

void SearchPolicy::validate() const {
    if (!std::isfinite(exponent) || exponent < 0.0) throw ParameterError("search policy exponent must be finite and >= 0");
    if (!std::isfinite(smoothing) || smoothing < 0.0) throw ParameterError("search policy smoothing must be finite and >= 0");
    if (kind == Kind::SimilarityRanked && smoothing == 0.0)
        throw ParameterError("SimilarityRanked needs smoothing > 0 to stay normalizable");
}

void EvolutionConfig::validate() const {
    if (!(beta > 0.0 && beta < 1.0)) throw ParameterError("beta must lie in (0, 1)");
    if (!(p_search >= 0.0 && p_search < 1.0)) throw ParameterError("p_search must lie in [0, 1)");
    if (c_u < 1 || c_t < 1) throw ParameterError("c_u and c_t must be >= 1");
    if (search_edges_per_activation && *search_edges_per_activation < 1)
        throw ParameterError("search_edges_per_activation must be >= 1");
    search_policy.validate();
}

StepStreams StepStreams::for_step(std::uint64_t seed, std::uint64_t time) noexcept {
    return {Rng(mix_seed(mix_seed(seed, 1), time)), Rng(mix_seed(mix_seed(seed, 2), time))};
}

namespace {

// Robert Floyd's sampling of k distinct positions in [0, n), in draw order.
std::vector<std::uint32_t> floyd_sample(std::uint32_t n, std::uint32_t k, Rng& rng) {
    std::vector<std::uint32_t> picked;
    picked.reserve(k);
    for (std::uint32_t j = n - k; j < n; ++j) {
        const auto r = static_cast<std::uint32_t>(rng.below(std::uint64_t{j} + 1));
        if (std::find(picked.begin(), picked.end(), r) == picked.end())
            picked.push_back(r);
        else
            picked.push_back(j);
    }
    return picked;
}

bool linked(const BipartiteGraph& g, NodeRef node, std::uint32_t other) {
    return node.side == Side::User ? g.has_edge(node.index, other) : g.has_edge(other, node.index);
}

void connect(BipartiteGraph& g, NodeRef node, std::uint32_t other) {
    if (node.side == Side::User)
        g.add_edge(node, topic(other));
    else
        g.add_edge(user(other), node);
}

// Weighted draws without replacement by linear scan. Zero weights are never picked.
void draw_weighted(std::vector<double> weights, std::uint32_t want, Rng& rng, std::vector<std::uint32_t>& out) {
    for (std::uint32_t k = 0; k < want; ++k) {
        double total = 0.0;
        for (double w : weights) total += w;
        if (!(total > 0.0)) return;
        const double target = rng.uniform() * total;
        double acc = 0.0;
        std::size_t pick = weights.size();
        for (std::size_t i = 0; i < weights.size(); ++i) {
            if (weights[i] <= 0.0) continue;
            acc += weights[i];
            pick = i;
            if (target < acc) break;
        }
        out.push_back(static_cast<std::uint32_t>(pick));
        weights[pick] = 0.0;
    }
}

// Weight of every opposite-side candidate for `node` under `policy`;
// existing neighbors of `node` get zero.
std::vector<double> policy_weights(const BipartiteGraph& g, NodeRef node, const SearchPolicy& policy) {
    const Side other = opposite(node.side);
    const std::size_t count = g.node_count(other);
    std::vector<double> w(count, 0.0);
    switch (policy.kind) {
    case SearchPolicy::Kind::UniformRandom:
        std::fill(w.begin(), w.end(), 1.0);
        break;
    case SearchPolicy::Kind::DegreeRanked:
        for (std::uint32_t i = 0; i < count; ++i) {
            const double d = g.degree({other, i});
            w[i] = d > 0.0 ? std::pow(d, policy.exponent) : 0.0;
        }
        break;
    case SearchPolicy::Kind::SimilarityRanked: {
        // Jaccard overlap between a candidate's neighbors and the nodes that
        // already share a neighbor with `node`.
        std::vector<char> near(g.node_count(node.side), 0);
        std::size_t near_count = 0;
        for (std::uint32_t j : g.neighbors(node))
            for (std::uint32_t peer : g.neighbors({other, j}))
                if (peer != node.index && !near[peer]) {
                    near[peer] = 1;
                    ++near_count;
                }
        for (std::uint32_t i = 0; i < count; ++i) {
            auto nb = g.neighbors({other, i});
            std::size_t inter = 0;
            for (std::uint32_t peer : nb) inter += near[peer] ? 1 : 0;
            const std::size_t uni = nb.size() + near_count - inter;
            w[i] = (uni > 0 ? static_cast<double>(inter) / static_cast<double>(uni) : 0.0) + policy.smoothing;
        }
        break;
    }
    }
    for (std::uint32_t j : g.neighbors(node)) w[j] = 0.0;
    return w;
}

// Draws up to `want` distinct non-neighbors of `node` from the policy.
std::vector<std::uint32_t> search_candidates(const BipartiteGraph& g, NodeRef node, const SearchPolicy& policy,
                                             std::uint32_t want, Rng& rng) {
    std::vector<std::uint32_t> chosen;
    const Side other = opposite(node.side);
    const bool fast_uniform = policy.kind == SearchPolicy::Kind::UniformRandom;
    const bool fast_degree = policy.kind == SearchPolicy::Kind::DegreeRanked && policy.exponent == 1.0;

    if (fast_uniform || fast_degree) {
        // Rejection against neighbors and earlier picks; falls back to an
        // explicit weighted scan if candidates run thin.
        const DegreeIndex& index = g.degree_index(other);
        const std::size_t limit = 64 * std::size_t{want} + 64;
        for (std::size_t attempt = 0; attempt < limit && chosen.size() < want; ++attempt) {
            std::uint32_t c;
            if (fast_uniform) {
                c = static_cast<std::uint32_t>(rng.below(g.node_count(other)));
            } else {
                if (index.total() == 0) break;
                c = static_cast<std::uint32_t>(index.find(rng.below(index.total())));
            }
            if (linked(g, node, c) || std::find(chosen.begin(), chosen.end(), c) != chosen.end()) continue;
            chosen.push_back(c);
        }
        if (chosen.size() == want) return chosen;
    }

    std::vector<double> w = policy_weights(g, node, policy);
    for (std::uint32_t c : chosen) w[c] = 0.0;
    draw_weighted(std::move(w), want - static_cast<std::uint32_t>(chosen.size()), rng, chosen);
    return chosen;
}

}  // namespace

StepReport evolve_step(BipartiteGraph& graph, const EvolutionConfig& config, StepStreams& streams,
                       std::uint64_t time) {
    StepReport report;
    report.time = time;
    report.arrival_side = streams.arrival.uniform() < config.beta ? Side::User : Side::Topic;
    const Side side = report.arrival_side;
    const Side other = opposite(side);

    report.prototype = graph.sample_preferential(side, streams.arrival);
    report.new_node = graph.add_node(side);

    auto proto_nb = graph.neighbors(report.prototype);
    const std::vector<std::uint32_t> pool(proto_nb.begin(), proto_nb.end());
    const auto k = std::min<std::uint32_t>(config.copy_count(side), static_cast<std::uint32_t>(pool.size()));
    for (std::uint32_t pos : floyd_sample(static_cast<std::uint32_t>(pool.size()), k, streams.arrival)) {
        connect(graph, report.new_node, pool[pos]);
        report.copied_edges.push_back(pool[pos]);
    }

    report.search_fired = streams.search.uniform() < config.p_search;
    if (report.search_fired) {
        const std::uint32_t want = std::min<std::uint32_t>(
            config.search_edge_count(side), static_cast<std::uint32_t>(graph.node_count(other)));
        for (std::uint32_t c : search_candidates(graph, report.new_node, config.search_policy, want, streams.search)) {
            connect(graph, report.new_node, c);
            report.search_edges.push_back(c);
        }
    }
    return report;
}

EvolutionTrace run_evolution(BipartiteGraph& graph, const EvolutionConfig& config,
                             const std::vector<StepObserver>& observers, std::uint64_t first_time) {
    config.validate();
    EvolutionTrace trace;
    trace.steps.reserve(config.steps);
    for (std::uint64_t i = 0; i < config.steps; ++i) {
        const std::uint64_t t = first_time + i;
        trace.steps.push_back(evolve_step(graph, config, t));
        for (const auto& observer : observers) {
            try {
                observer(trace.steps.back(), graph);
            } catch (const std::exception& e) {
                throw EvolutionError(std::string("observer failed: ") + e.what(), t);
            }
        }
    }
    return trace;
}

void write_trace_jsonl(std::ostream& os, const EvolutionTrace& trace) {
    for (const StepReport& r : trace.steps) {
        nlohmann::json j;
        j["t"] = r.time;
        j["side"] = side_name(r.arrival_side);
        j["node"] = r.new_node.index;
        j["prototype"] = r.prototype.index;
        j["copied"] = r.copied_edges;
        j["search"] = r.search_edges;
        j["search_fired"] = r.search_fired;
        os << j.dump() << '\n';
    }
}

}  // namespace searchnet
