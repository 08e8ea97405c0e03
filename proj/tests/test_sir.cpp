#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <sstream>

#include "fixtures.hpp"
#include "searchnet/error.hpp"
#include "searchnet/evolution.hpp"
#include "searchnet/sir.hpp"

using namespace searchnet;

namespace {

BipartiteGraph evolved(std::uint64_t seed, std::uint64_t steps) {
    Rng rng(seed);
    BipartiteGraph g = new_seed_graph({10, 10, 2, 2, true}, rng);
    EvolutionConfig cfg;
    cfg.seed = seed;
    cfg.steps = steps;
    run_evolution(g, cfg);
    return g;
}

// u0 - t0 - u1 - t1 - u2
BipartiteGraph path5() {
    BipartiteGraph g(3, 2);
    g.add_edge(user(0), topic(0));
    g.add_edge(user(1), topic(0));
    g.add_edge(user(1), topic(1));
    g.add_edge(user(2), topic(1));
    return g;
}

SirState only_infectious(std::size_t n, std::uint32_t v) {
    SirState s;
    s.status.assign(n, Health::Susceptible);
    s.infected_at.assign(n, 0);
    s.status[v] = Health::Infectious;
    s.aware = s.infectious = 1;
    return s;
}

void check_partition(const SirState& s) {
    std::uint64_t S = 0, I = 0, R = 0;
    for (Health h : s.status) (h == Health::Susceptible ? S : h == Health::Infectious ? I : R)++;
    REQUIRE(S + I + R == s.size());
    REQUIRE(I == s.infectious);
    REQUIRE(I + R == s.aware);
    REQUIRE(S == s.susceptible());
}

}  // namespace

TEST_CASE("initial infections") {
    BipartiteGraph g(100, 1);
    SirConfig c;
    c.initial_fraction = 0.01;
    c.seed = 4;
    auto s = sir_init(g, c);
    CHECK(s.infectious == 1);
    CHECK(std::count(s.status.begin(), s.status.end(), Health::Infectious) == 1);
    check_partition(s);

    c.initial_fraction = 1.0;
    auto all = sir_init(g, c);
    CHECK(all.infectious == 100);
    CHECK(rumor_coverage(all) == 1.0);

    BipartiteGraph big(250, 1);
    c.initial_fraction = 0.01;
    CHECK(sir_init(big, c).infectious == 3);  // ceil(2.5)
    c.initial_fraction = 1e-9;
    CHECK(sir_init(big, c).infectious == 1);

    c.initial_fraction = 0.3;
    CHECK(sir_init(big, c).status == sir_init(big, c).status);
    CHECK_THROWS_AS(sir_init(BipartiteGraph(0, 3), c), ParameterError);
}

TEST_CASE("seed choice is uniform") {
    BipartiteGraph g(10, 1);
    SirConfig c;
    c.initial_fraction = 0.2;
    std::vector<int> hits(10, 0);
    const int runs = 20000;
    for (int s = 0; s < runs; ++s) {
        c.seed = s;
        auto st = sir_init(g, c);
        for (std::uint32_t v = 0; v < 10; ++v) hits[v] += st.status[v] == Health::Infectious;
    }
    const double p = 0.2, sd = std::sqrt(runs * p * (1 - p));
    for (int h : hits) CHECK(std::abs(h - runs * p) < 4 * sd);
}

TEST_CASE("absorbing state only advances time") {
    BipartiteGraph g = path5();
    SirState s;
    s.status = {Health::Recovered, Health::Susceptible, Health::Susceptible};
    s.infected_at = {0, 0, 0};
    s.aware = 1;
    SirConfig c;
    auto next = sir_step(s, g, c);
    CHECK(next.status == s.status);
    CHECK(next.time == 1);
    CHECK(next.aware == 1);
}

TEST_CASE("certain contact on a complete graph infects everyone in one step") {
    BipartiteGraph g(30, 4);
    for (std::uint32_t u = 0; u < 30; ++u)
        for (std::uint32_t t = 0; t < 4; ++t) g.add_edge(user(u), topic(t));
    SirConfig c;
    c.lambda = 1.0;
    c.mu = 0.0;
    c.engine_enabled = false;
    c.initial_fraction = 0.01;
    auto s = sir_step(sir_init(g, c), g, c);
    CHECK(s.infectious == 30);
    CHECK(rumor_coverage(s) == 1.0);
}

TEST_CASE("one step on a path matches enumeration") {
    // Only u1 shares a topic with u0: P(u1) = lambda, P(u2) = 0.
    BipartiteGraph g = path5();
    SirConfig c;
    c.lambda = 0.7;
    c.mu = 0.0;
    c.engine_enabled = false;
    const int trials = 100000;
    int u1 = 0, u2 = 0;
    for (int i = 0; i < trials; ++i) {
        c.seed = static_cast<std::uint64_t>(i);
        auto s = sir_step(only_infectious(3, 0), g, c);
        u1 += s.status[1] == Health::Infectious;
        u2 += s.status[2] != Health::Susceptible;
        REQUIRE(s.status[0] == Health::Infectious);
    }
    CHECK(std::abs(u1 / double(trials) - 0.7) <= 0.01);
    CHECK(u2 == 0);
}

TEST_CASE("multiple infectious contacts combine independently") {
    // u0 and u1 infectious, both share a topic with u2: P = 1 - 0.3^2.
    BipartiteGraph g(3, 2);
    g.add_edge(user(0), topic(0));
    g.add_edge(user(2), topic(0));
    g.add_edge(user(1), topic(1));
    g.add_edge(user(2), topic(1));
    SirConfig c;
    c.lambda = 0.7;
    c.mu = 0.0;
    c.engine_enabled = false;
    const int trials = 100000;
    int hit = 0;
    for (int i = 0; i < trials; ++i) {
        c.seed = static_cast<std::uint64_t>(i);
        SirState s = only_infectious(3, 0);
        s.status[1] = Health::Infectious;
        s.aware = s.infectious = 2;
        hit += sir_step(s, g, c).status[2] == Health::Infectious;
    }
    const double p = 1 - 0.3 * 0.3;
    CHECK(std::abs(hit / double(trials) - p) <= 4 * std::sqrt(p * (1 - p) / trials));
}

TEST_CASE("partition and monotone awareness on evolved graphs") {
    for (auto model : {ExposureModel::PrevalenceScaled, ExposureModel::TopicMediated}) {
        for (std::uint64_t seed = 0; seed < 5; ++seed) {
            BipartiteGraph g = evolved(seed, 3000);
            SirConfig c;
            c.seed = seed;
            c.lambda = 0.2;
            c.exposure_model = model;
            SirState s = sir_init(g, c);
            check_partition(s);
            for (int t = 0; t < 60; ++t) {
                auto next = sir_step(s, g, c);
                check_partition(next);
                REQUIRE(next.aware >= s.aware);
                REQUIRE(next.time == s.time + 1);
                s = std::move(next);
            }
        }
    }
}

TEST_CASE("engine coverage dominates on the same graph") {
    for (auto model : {ExposureModel::PrevalenceScaled, ExposureModel::TopicMediated}) {
        for (std::uint64_t seed = 0; seed < 10; ++seed) {
            BipartiteGraph g = evolved(seed + 50, 2000);
            SirConfig on;
            on.seed = seed;
            on.lambda = 0.1;
            on.mu = 0.2;
            on.exposure_model = model;
            on.search_probability = 0.5;
            SirConfig off = on;
            off.engine_enabled = false;
            auto a = run_sir(g, on), b = run_sir(g, off);
            for (std::uint32_t t = 0; t <= on.max_steps; ++t) REQUIRE(coverage_at(a, t) >= coverage_at(b, t));
        }
    }
}

TEST_CASE("identical inputs give identical traces") {
    BipartiteGraph g = evolved(3, 2000);
    SirConfig c;
    c.seed = 12;
    auto a = run_sir(g, c), b = run_sir(g, c);
    CHECK(a.series == b.series);
    CHECK(a.final_state.status == b.final_state.status);
}

TEST_CASE("degenerate rates") {
    BipartiteGraph g = evolved(8, 1000);
    SirConfig c;
    c.seed = 2;
    c.lambda = 0.0;
    c.xi = 0.0;
    c.mu = 1.0;
    auto t = run_sir(g, c);
    const double i0 = t.series.front().coverage;
    REQUIRE(t.series.size() == 2);
    CHECK(t.series[1].coverage == i0);
    CHECK(t.series[1].infectious == 0);
    CHECK(t.series[1].recovered == t.series[0].infectious);

    c.mu = 0.07;
    c.max_steps = 100;
    auto slow = run_sir(g, c);
    for (const auto& s : slow.series) CHECK(s.coverage == i0);
    CHECK(coverage_at(slow, 100) == i0);
}

TEST_CASE("coverage definition") {
    SirState s;
    s.status.assign(100, Health::Susceptible);
    s.infected_at.assign(100, 0);
    CHECK(rumor_coverage(s) == 0.0);
    s.aware = 37;
    CHECK(rumor_coverage(s) == 0.37);
    s.aware = 100;
    CHECK(rumor_coverage(s) == 1.0);
}

TEST_CASE("config validation") {
    SirConfig c;
    c.lambda = 1.5;
    CHECK_THROWS_AS(c.validate(), ParameterError);
    c = SirConfig{};
    c.initial_fraction = 0.0;
    CHECK_THROWS_AS(c.validate(), ParameterError);
    c = SirConfig{};
    c.exposure_model = ExposureModel::TopicMediated;
    c.search_policy.kind = SearchPolicy::Kind::SimilarityRanked;
    CHECK_THROWS_AS(c.validate(), ParameterError);
}

TEST_CASE("csv output") {
    BipartiteGraph g = path5();
    SirConfig c;
    c.max_steps = 3;
    c.mu = 0.0;
    std::ostringstream os;
    write_sir_csv(os, run_sir(g, c));
    std::string text = os.str();
    CHECK(text.rfind("t,susceptible,infectious,recovered,coverage\n0,", 0) == 0);
    CHECK(std::count(text.begin(), text.end(), '\n') == 5);
}
