#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "searchnet/error.hpp"
#include "searchnet/evolution.hpp"
#include "searchnet/graph.hpp"
#include "searchnet/rng.hpp"

using namespace searchnet;

namespace {

// Straight-line model without any sampling index: preferential and
// degree-ranked draws scan cumulative degree, everything else is a list
// operation. Consumes the per-step streams in the documented order.
struct Reference {
    std::vector<std::vector<std::uint32_t>> adj[2];  // [0] users, [1] topics

    explicit Reference(const BipartiteGraph& g) {
        for (Side s : {Side::User, Side::Topic})
            for (std::uint32_t i = 0; i < g.node_count(s); ++i) {
                auto nb = g.neighbors({s, i});
                adj[int(s)].emplace_back(nb.begin(), nb.end());
            }
    }

    bool linked(Side side, std::uint32_t node, std::uint32_t other) const {
        const auto& nb = adj[int(side)][node];
        return std::find(nb.begin(), nb.end(), other) != nb.end();
    }

    std::uint32_t scan(const std::vector<double>& w, double target) const {
        double acc = 0.0;
        std::uint32_t pick = static_cast<std::uint32_t>(w.size());
        for (std::uint32_t i = 0; i < w.size(); ++i) {
            if (w[i] <= 0.0) continue;
            acc += w[i];
            pick = i;
            if (target < acc) break;
        }
        return pick;
    }

    std::uint32_t by_degree(Side side, std::uint64_t target) const {
        std::uint64_t acc = 0;
        for (std::uint32_t i = 0; i < adj[int(side)].size(); ++i) {
            acc += adj[int(side)][i].size();
            if (acc > target) return i;
        }
        FAIL("target beyond total degree");
        return 0;
    }

    std::uint64_t total(Side side) const {
        std::uint64_t t = 0;
        for (const auto& nb : adj[int(side)]) t += nb.size();
        return t;
    }

    void connect(Side side, std::uint32_t node, std::uint32_t other) {
        adj[int(side)][node].push_back(other);
        adj[int(opposite(side))][other].push_back(node);
    }

    StepReport step(const EvolutionConfig& cfg, std::uint64_t t) {
        Rng arrival(mix_seed(mix_seed(cfg.seed, 1), t));
        Rng search(mix_seed(mix_seed(cfg.seed, 2), t));
        StepReport r;
        r.time = t;
        const Side side = arrival.uniform() < cfg.beta ? Side::User : Side::Topic;
        const Side other = opposite(side);
        r.arrival_side = side;
        const std::uint32_t proto = by_degree(side, arrival.below(total(side)));
        r.prototype = {side, proto};
        const auto node = static_cast<std::uint32_t>(adj[int(side)].size());
        adj[int(side)].emplace_back();
        r.new_node = {side, node};

        const std::vector<std::uint32_t> pool = adj[int(side)][proto];
        const auto n = static_cast<std::uint32_t>(pool.size());
        const std::uint32_t k = std::min(cfg.copy_count(side), n);
        std::vector<std::uint32_t> picked;
        for (std::uint32_t j = n - k; j < n; ++j) {
            auto x = static_cast<std::uint32_t>(arrival.below(j + 1));
            picked.push_back(std::find(picked.begin(), picked.end(), x) == picked.end() ? x : j);
        }
        for (auto pos : picked) {
            connect(side, node, pool[pos]);
            r.copied_edges.push_back(pool[pos]);
        }

        r.search_fired = search.uniform() < cfg.p_search;
        if (!r.search_fired) return r;
        const auto count = static_cast<std::uint32_t>(adj[int(other)].size());
        const std::uint32_t want = std::min(cfg.search_edge_count(side), count);
        std::vector<std::uint32_t> chosen;
        const auto kind = cfg.search_policy.kind;
        const bool fast = kind == SearchPolicy::Kind::UniformRandom ||
                          (kind == SearchPolicy::Kind::DegreeRanked && cfg.search_policy.exponent == 1.0);
        if (fast) {
            for (std::uint32_t attempt = 0; attempt < 64 * want + 64 && chosen.size() < want; ++attempt) {
                std::uint32_t c = kind == SearchPolicy::Kind::UniformRandom
                                      ? static_cast<std::uint32_t>(search.below(count))
                                      : by_degree(other, search.below(total(other)));
                if (linked(side, node, c) || std::find(chosen.begin(), chosen.end(), c) != chosen.end()) continue;
                chosen.push_back(c);
            }
        }
        if (chosen.size() < want) {
            std::vector<double> w(count);
            for (std::uint32_t i = 0; i < count; ++i) {
                const double d = static_cast<double>(adj[int(other)][i].size());
                if (kind == SearchPolicy::Kind::UniformRandom) w[i] = 1.0;
                else if (kind == SearchPolicy::Kind::DegreeRanked) w[i] = d > 0 ? std::pow(d, cfg.search_policy.exponent) : 0.0;
                if (linked(side, node, i) || std::find(chosen.begin(), chosen.end(), i) != chosen.end()) w[i] = 0.0;
            }
            while (chosen.size() < want) {
                double tot = 0.0;
                for (double x : w) tot += x;
                if (!(tot > 0.0)) break;
                auto pick = scan(w, search.uniform() * tot);
                chosen.push_back(pick);
                w[pick] = 0.0;
            }
        }
        for (auto c : chosen) {
            connect(side, node, c);
            r.search_edges.push_back(c);
        }
        return r;
    }
};

BipartiteGraph seed_10x10(std::uint64_t seed) {
    Rng rng(seed);
    return new_seed_graph({10, 10, 2, 2, true}, rng);
}

EvolutionConfig base_config(std::uint64_t seed, std::uint64_t steps) {
    EvolutionConfig c;
    c.beta = 0.5;
    c.p_search = 0.1;
    c.c_u = 2;
    c.c_t = 2;
    c.seed = seed;
    c.steps = steps;
    return c;
}

void compare_with_reference(EvolutionConfig cfg) {
    BipartiteGraph g = seed_10x10(cfg.seed);
    Reference ref(g);
    EvolutionTrace trace = run_evolution(g, cfg);
    REQUIRE(trace.steps.size() == cfg.steps);
    for (std::uint64_t i = 0; i < cfg.steps; ++i) {
        CAPTURE(i);
        REQUIRE(trace.steps[i] == ref.step(cfg, i + 1));
    }
    for (Side s : {Side::User, Side::Topic})
        for (std::uint32_t i = 0; i < g.node_count(s); ++i) {
            auto nb = g.neighbors({s, i});
            REQUIRE(std::vector<std::uint32_t>(nb.begin(), nb.end()) == ref.adj[int(s)][i]);
        }
}

}  // namespace

TEST_CASE("trace matches the straight-line reference") {
    SUBCASE("default policy, seed 42") { compare_with_reference(base_config(42, 1000)); }
    SUBCASE("degree-ranked search") {
        auto cfg = base_config(42, 1000);
        cfg.search_policy.kind = SearchPolicy::Kind::DegreeRanked;
        compare_with_reference(cfg);
    }
    SUBCASE("degree-ranked with exponent 2 uses the weighted scan") {
        auto cfg = base_config(7, 400);
        cfg.p_search = 0.5;
        cfg.search_policy.kind = SearchPolicy::Kind::DegreeRanked;
        cfg.search_policy.exponent = 2.0;
        compare_with_reference(cfg);
    }
    SUBCASE("unequal copy counts") {
        auto cfg = base_config(3, 1000);
        cfg.c_u = 3;
        cfg.c_t = 1;
        cfg.beta = 0.3;
        cfg.search_edges_per_activation = 4;
        compare_with_reference(cfg);
    }
}

TEST_CASE("beta of one only adds users") {
    BipartiteGraph g = seed_10x10(1);
    EvolutionConfig cfg = base_config(1, 0);
    cfg.beta = 1.0;
    for (std::uint64_t t = 1; t <= 300; ++t) CHECK(evolve_step(g, cfg, t).arrival_side == Side::User);
    CHECK(g.topic_count() == 10);
    CHECK(g.user_count() == 310);
}

TEST_CASE("no search without the engine") {
    BipartiteGraph g = seed_10x10(2);
    EvolutionConfig cfg = base_config(2, 2000);
    cfg.p_search = 0.0;
    run_evolution(g, cfg, {[](const StepReport& r, const BipartiteGraph& graph) {
        REQUIRE(r.search_edges.empty());
        REQUIRE_FALSE(r.search_fired);
        const auto expected = std::min<std::uint32_t>(2, graph.degree(r.prototype));
        REQUIRE(graph.degree(r.new_node) == expected);
    }});
}

TEST_CASE("zero steps leaves the graph alone") {
    BipartiteGraph g = seed_10x10(3);
    const BipartiteGraph before = g;
    auto trace = run_evolution(g, base_config(3, 0));
    CHECK(trace.steps.empty());
    CHECK(g == before);
}

TEST_CASE("user arrivals are binomial") {
    const double mean = 2500, band = 3 * std::sqrt(5000 * 0.25);
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        BipartiteGraph g = seed_10x10(seed);
        run_evolution(g, base_config(seed, 5000));
        const double added = static_cast<double>(g.user_count()) - 10.0;
        CHECK(std::abs(added - mean) <= band);
    }
}

TEST_CASE("paired runs: the engine only adds edges") {
    for (std::uint64_t seed = 100; seed < 110; ++seed) {
        EvolutionConfig on = base_config(seed, 3000), off = on;
        off.p_search = 0.0;
        BipartiteGraph g_on = seed_10x10(seed), g_off = g_on;
        std::vector<std::size_t> edges_on, edges_off;
        run_evolution(g_on, on, {[&](const StepReport&, const BipartiteGraph& g) { edges_on.push_back(g.edge_count()); }});
        run_evolution(g_off, off, {[&](const StepReport&, const BipartiteGraph& g) { edges_off.push_back(g.edge_count()); }});
        for (std::size_t t = 0; t < edges_on.size(); ++t) REQUIRE(edges_on[t] >= edges_off[t]);
        CHECK(g_on.edge_count() > g_off.edge_count());
        CHECK(g_on.user_count() == g_off.user_count());
    }
}

TEST_CASE("step properties hold throughout a run") {
    EvolutionConfig cfg = base_config(77, 20000);
    cfg.search_edges_per_activation = 3;
    BipartiteGraph g = seed_10x10(77);
    std::size_t fired = 0, nodes = 20, edges = g.edge_count();
    run_evolution(g, cfg, {[&](const StepReport& r, const BipartiteGraph& graph) {
        // growth by exactly one node, edges never shrink
        REQUIRE(graph.user_count() + graph.topic_count() == ++nodes);
        REQUIRE(graph.edge_count() >= edges);
        edges = graph.edge_count();
        // new-node degree bounds
        const std::uint32_t c = cfg.copy_count(r.arrival_side);
        const std::uint32_t deg = graph.degree(r.new_node);
        REQUIRE(deg >= std::min<std::uint32_t>(1, c));
        REQUIRE(deg <= c + 3);
        REQUIRE(r.copied_edges.size() <= c);
        if (!r.search_fired) REQUIRE(r.search_edges.empty());
        // copied endpoints are neighbors of the prototype
        auto nb = graph.neighbors(r.prototype);
        for (auto x : r.copied_edges) REQUIRE(std::find(nb.begin(), nb.end(), x) != nb.end());
        if (!r.search_edges.empty()) ++fired;
    }});
    const double n = 20000, p = 0.1;
    CHECK(std::abs(fired - n * p) <= 3 * std::sqrt(n * p * (1 - p)));
    CHECK(check_invariants(g, 1, 1).empty());
}

TEST_CASE("every policy keeps the graph well formed") {
    for (auto kind : {SearchPolicy::Kind::UniformRandom, SearchPolicy::Kind::DegreeRanked,
                      SearchPolicy::Kind::SimilarityRanked}) {
        CAPTURE(policy_name(kind));
        EvolutionConfig cfg = base_config(5, 1500);
        cfg.p_search = 0.5;
        cfg.search_policy.kind = kind;
        BipartiteGraph g = seed_10x10(5);
        auto trace = run_evolution(g, cfg);
        CHECK(check_invariants(g, 2, 2).empty());
        std::size_t search_edges = 0;
        for (const auto& r : trace.steps) search_edges += r.search_edges.size();
        CHECK(search_edges > 0);
    }
}

TEST_CASE("similarity ranking prefers overlapping candidates") {
    // User 0 links topic 0; topic 1 shares every user with topic 0, topic 2 none.
    BipartiteGraph g(4, 3);
    for (std::uint32_t u = 0; u < 3; ++u) g.add_edge(user(u), topic(0));
    for (std::uint32_t u = 1; u < 3; ++u) g.add_edge(user(u), topic(1));
    g.add_edge(user(3), topic(2));
    EvolutionConfig cfg = base_config(0, 0);
    cfg.beta = 1.0;
    cfg.p_search = 0.999;
    cfg.c_u = 1;
    cfg.search_edges_per_activation = 1;
    cfg.search_policy.kind = SearchPolicy::Kind::SimilarityRanked;
    int overlap = 0, other = 0;
    for (std::uint64_t t = 1; t <= 400; ++t) {
        BipartiteGraph h = g;
        auto r = evolve_step(h, cfg, t);
        if (r.search_edges.empty() || r.copied_edges[0] != 0) continue;
        (r.search_edges[0] == 1 ? overlap : other)++;
    }
    CHECK(overlap > 10 * other);
}

TEST_CASE("identical configs give identical traces") {
    auto cfg = base_config(9, 2000);
    BipartiteGraph a = seed_10x10(9), b = a;
    CHECK(run_evolution(a, cfg).steps == run_evolution(b, cfg).steps);
    CHECK(a == b);
}

TEST_CASE("observer failures name the step") {
    BipartiteGraph g = seed_10x10(1);
    auto cfg = base_config(1, 20);
    try {
        run_evolution(g, cfg, {[](const StepReport& r, const BipartiteGraph&) {
            if (r.time == 7) throw std::runtime_error("disk full");
        }});
        FAIL("expected an EvolutionError");
    } catch (const EvolutionError& e) {
        CHECK(e.step() == 7);
        CHECK(std::string(e.what()).find("step 7") != std::string::npos);
        CHECK(std::string(e.what()).find("disk full") != std::string::npos);
    }
}

TEST_CASE("invalid configurations are rejected") {
    BipartiteGraph g = seed_10x10(1);
    auto cfg = base_config(1, 10);
    cfg.beta = 1.0;
    CHECK_THROWS_AS(run_evolution(g, cfg), ParameterError);
    cfg = base_config(1, 10);
    cfg.p_search = 1.0;
    CHECK_THROWS_AS(run_evolution(g, cfg), ParameterError);
    cfg = base_config(1, 10);
    cfg.c_u = 0;
    CHECK_THROWS_AS(run_evolution(g, cfg), ParameterError);
    cfg = base_config(1, 10);
    cfg.search_policy.exponent = -1;
    CHECK_THROWS_AS(run_evolution(g, cfg), ParameterError);
}
