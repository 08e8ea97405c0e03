#include <doctest.h>

#include <cmath>
#include <limits>

#include "searchnet/error.hpp"
#include "searchnet/metrics.hpp"
#include "searchnet/rng.hpp"

using namespace searchnet;

namespace {

EvolutionConfig cfg(double beta, double p, std::uint32_t cu, std::uint32_t ct) {
    EvolutionConfig c;
    c.beta = beta;
    c.p_search = p;
    c.c_u = cu;
    c.c_t = ct;
    return c;
}

}  // namespace

TEST_CASE("model exponent") {
    CHECK(model_exponent(cfg(0.5, 0.0, 2, 2)) == -3.0);
    CHECK(model_exponent(cfg(0.75, 0.0, 1, 3)) == doctest::Approx(-3.0));
    CHECK(model_exponent(cfg(0.5, 0.0, 4, 2)) == doctest::Approx(-4.0));
}

TEST_CASE("degree fraction without the engine") {
    SUBCASE("i = c_u") {
        for (double beta : {0.2, 0.5, 0.8}) {
            auto c = cfg(beta, 0.0, 2, 3);
            const double a = 2 * beta + 3 * (1 - beta);
            CHECK(theoretical_degree_fraction(2, c, 1.0) == doctest::Approx(beta * a / (a + (1 - beta) * 6)));
        }
    }
    SUBCASE("i > c_u follows the model exponent") {
        auto c = cfg(0.5, 0.0, 2, 2);
        const double alpha = model_exponent(c);
        for (std::uint32_t i = 3; i <= 500; i += 7) {
            const double ratio = theoretical_degree_fraction(i, c, 1.0) / theoretical_degree_fraction(2 * i, c, 1.0);
            CHECK(std::log(ratio) / std::log(2.0) == doctest::Approx(-alpha).epsilon(1e-12));
        }
    }
    CHECK_THROWS_AS(theoretical_degree_fraction(1, cfg(0.5, 0.0, 2, 2), 1.0), DomainError);
}

TEST_CASE("degree fraction with the engine, retyped") {
    // p = 0.1, u = 1, c_u = c_t = 2, beta = 0.5, i = 10:
    // r = 1, so i^-3 + 0.1 * 1 * 2 * 2 * sum_{k=2..10} k^-4
    double tail = 0;
    for (int k = 2; k <= 10; ++k) tail += 1.0 / (double(k) * k * k * k);
    const double expected = 1.0 / 1000.0 + 0.4 * tail;
    CHECK(theoretical_degree_fraction(10, cfg(0.5, 0.1, 2, 2), 1.0) == doctest::Approx(expected).epsilon(1e-14));
    // i = c_u: (0.5 - 0.2) * 2 / (2 + 0.5 * 4)
    CHECK(theoretical_degree_fraction(2, cfg(0.5, 0.1, 2, 2), 1.0) == doctest::Approx(0.15).epsilon(1e-14));
}

TEST_CASE("route expectation, hand evaluated") {
    // e0=5, n=10, u=10, D=100, beta=0.5, p=0.1, c=2:
    // base = 5 + 100 * (45 - 5) = 4005
    // without = 4005 - 99 * 2 = 3807
    // with    = 4005 - 99 * (2 + 0.1 * 10 * 2) = 3609
    auto r = expected_route(5, 10, 10, 100, cfg(0.5, 0.1, 2, 2));
    CHECK(r.value_without_engine == doctest::Approx(3807).epsilon(1e-15));
    CHECK(r.value_with_engine == doctest::Approx(3609).epsilon(1e-15));
    auto z = expected_route(5, 10, 10, 100, cfg(0.5, 0.0, 2, 2));
    CHECK(z.value_with_engine == z.value_without_engine);
    CHECK_THROWS_AS(expected_route(5, 10, 10, 1.0, cfg(0.5, 0.1, 2, 2)), DomainError);
    CHECK_THROWS_AS(expected_route(5, 1, 10, 100, cfg(0.5, 0.1, 2, 2)), DomainError);
}

TEST_CASE("route difference identity on random parameters") {
    Rng rng(17);
    for (int i = 0; i < 1000; ++i) {
        const double n = 2 + rng.below(1000);
        const double e0 = rng.below(static_cast<std::uint64_t>(n * (n - 1) / 2) + 1);
        const double u = 1 + rng.below(500);
        const double d_max = 1.0 + 1e-3 + rng.uniform() * 1000;
        auto c = cfg(0.01 + 0.98 * rng.uniform(), 0.999 * rng.uniform(), 1 + rng.below(10), 1 + rng.below(10));
        auto r = expected_route(e0, n, u, d_max, c);
        const double diff = r.engine_saving;
        // The totals themselves agree to rounding at their own scale.
        const double spread = std::abs(r.value_without_engine - r.value_with_engine - diff);
        const double expected = (d_max - 1) * c.p_search * u * c.c_t;
        if (expected == 0.0)
            CHECK(diff == 0.0);
        else
            CHECK(std::abs(diff - expected) / expected <= 1e-12);
        if (c.p_search > 0) CHECK(diff > 0);
        CHECK(spread <= 4 * std::numeric_limits<double>::epsilon() * (e0 + d_max * n * (n - 1) / 2));
        CHECK(r.value_with_engine <= r.value_without_engine);
    }
}

TEST_CASE("worst-case diameters") {
    CHECK(worst_case_diameter(10, 0.1, false) == 11);
    CHECK(worst_case_diameter(10, 0.1, true) == doctest::Approx(10).epsilon(1e-15));
    CHECK(worst_case_diameter(10, 0.0, true) == worst_case_diameter(10, 0.0, false));
    CHECK(worst_case_diameter(7, 0.3, true) <= worst_case_diameter(7, 0.3, false));
    CHECK_THROWS_AS(worst_case_diameter(0, 0.1, true), DomainError);
}

TEST_CASE("averaging recursion limit") {
    SUBCASE("constant coefficients") {
        double v = iterate_lemma1_recursion([](std::uint64_t) { return 1.0; }, [](std::uint64_t) { return 2.0; }, 2, 0.0,
                                            1000000);
        CHECK(std::abs(v - 1.0) <= 1e-3);
    }
    SUBCASE("no input") {
        double v = iterate_lemma1_recursion([](std::uint64_t) { return 1.0; }, [](std::uint64_t) { return 0.0; }, 2, 5.0,
                                            100000);
        CHECK(std::abs(v) < 1e-9);
    }
    SUBCASE("converging coefficients against a long double iteration") {
        auto b = [](std::uint64_t t) { return 1.0 + 1.0 / std::log(double(t)); };
        auto c = [](std::uint64_t t) { return 3.0 - 1.0 / double(t); };
        auto oracle = [](std::uint64_t horizon) {
            long double a = 0.0L;
            for (std::uint64_t t = 3; t < horizon; ++t) {
                const long double td = t;
                a = (1.0L - (1.0L + 1.0L / std::log(td)) / td) * a + (3.0L - 1.0L / td);
            }
            return static_cast<double>(a / horizon);
        };
        double prev_gap = 1.0;
        for (std::uint64_t horizon : {10000ull, 100000ull, 1000000ull}) {
            double v = iterate_lemma1_recursion(b, c, 3, 0.0, horizon);
            CHECK(v == doctest::Approx(oracle(horizon)).epsilon(1e-9));
            // approaches c / (1 + b) = 3/2 from below, slowly (the 1/ln t term)
            const double gap = 1.5 - v;
            CHECK(gap > 0);
            CHECK(gap < prev_gap);
            prev_gap = gap;
        }
        CHECK(prev_gap < 0.06);
    }
    SUBCASE("divergent input") {
        CHECK_THROWS_AS(iterate_lemma1_recursion([](std::uint64_t) { return -1.0; }, [](std::uint64_t) { return 1.0; }, 1,
                                                 0.0, 10),
                        DomainError);
        CHECK_THROWS_AS(iterate_lemma1_recursion([](std::uint64_t) { return 1.0; }, [](std::uint64_t) { return 1.0; }, 1,
                                                 0.0, 10),
                        DomainError);
    }
}
