#pragma once

// Graphs and checks shared by the unit tests and the acceptance run.

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "searchnet/graph.hpp"
#include "searchnet/rng.hpp"

namespace fixtures {

using namespace searchnet;

/// 25 users and 25 topics with a spread of degrees (1 to 25 on the topic side).
inline BipartiteGraph fixed_50_node_graph() {
    BipartiteGraph g(25, 25);
    for (std::uint32_t t = 0; t < 25; ++t)
        for (std::uint32_t u = 0; u <= t; ++u) g.add_edge(user((u * 7 + t) % 25), topic(t));
    return g;
}

struct SamplerCheck {
    std::uint64_t draws = 0;
    std::size_t nodes = 0;
    std::size_t outside_band = 0;
    double worst_z = 0.0;
};

/// Draws `draws` preferential samples from `side` and compares each node's
/// frequency with degree / total using a 3-sigma binomial band.
inline SamplerCheck check_preferential(const BipartiteGraph& g, Side side, std::uint64_t draws, std::uint64_t seed) {
    std::vector<std::uint64_t> hits(g.node_count(side), 0);
    Rng rng(seed);
    for (std::uint64_t i = 0; i < draws; ++i) ++hits[g.sample_preferential(side, rng).index];
    double total = 0;
    for (std::uint32_t i = 0; i < hits.size(); ++i) total += g.degree({side, i});
    SamplerCheck out;
    out.draws = draws;
    out.nodes = hits.size();
    for (std::uint32_t i = 0; i < hits.size(); ++i) {
        const double p = g.degree({side, i}) / total;
        const double n = static_cast<double>(draws);
        const double sd = std::sqrt(p * (1 - p) / n);
        const double freq = hits[i] / n;
        if (p == 0.0) {
            if (hits[i] != 0) ++out.outside_band;
            continue;
        }
        const double z = std::abs(freq - p) / sd;
        out.worst_z = std::max(out.worst_z, z);
        if (z > 3.0) ++out.outside_band;
    }
    return out;
}

/// Random connected-ish graph: a spanning walk plus `extra` random edges.
inline BipartiteGraph random_graph(std::uint32_t users, std::uint32_t topics, std::uint32_t extra, std::uint64_t seed) {
    Rng rng(seed);
    BipartiteGraph g(users, topics);
    for (std::uint32_t u = 1; u < users; ++u) g.add_edge(user(u), topic(static_cast<std::uint32_t>(rng.below(topics))));
    for (std::uint32_t t = 0; t < topics; ++t) g.add_edge(user(static_cast<std::uint32_t>(rng.below(users))), topic(t));
    for (std::uint32_t i = 0; i < extra; ++i)
        g.add_edge(user(static_cast<std::uint32_t>(rng.below(users))), topic(static_cast<std::uint32_t>(rng.below(topics))));
    return g;
}

}  // namespace fixtures
