#include <doctest.h>

#include <bit>
#include <cstring>
#include <vector>

#include "searchnet/error.hpp"
#include "searchnet/kernels.hpp"
#include "searchnet/rng.hpp"

using namespace searchnet;
namespace k = searchnet::kernels;

namespace {

struct IsaGuard {
    ~IsaGuard() { k::reset_isa(); }
};

std::vector<double> random_doubles(std::size_t n, std::uint64_t seed) {
    Rng rng(seed);
    std::vector<double> v(n);
    for (auto& x : v) x = (rng.uniform() - 0.5) * 1e3 * (1 + rng.below(7));
    return v;
}

std::vector<std::uint32_t> random_ids(std::size_t n, std::uint64_t seed) {
    Rng rng(seed);
    std::vector<std::uint32_t> v(n);
    for (auto& x : v) x = static_cast<std::uint32_t>(rng.next());
    return v;
}

bool same_bits(double a, double b) { return std::bit_cast<std::uint64_t>(a) == std::bit_cast<std::uint64_t>(b); }

// Plain loops in the documented striped order.
double striped_dot(const std::vector<double>& a, const std::vector<double>& b) {
    double lane[4] = {0, 0, 0, 0};
    for (std::size_t i = 0; i < a.size(); ++i) lane[i % 4] += a[i] * b[i];
    return (lane[0] + lane[1]) + (lane[2] + lane[3]);
}

}  // namespace

TEST_CASE("scalar variant is always available and listed first") {
    auto isas = k::available_isas();
    REQUIRE(!isas.empty());
    CHECK(isas.front() == k::Isa::Scalar);
}

TEST_CASE("scalar kernels match hand-written loops") {
    IsaGuard guard;
    k::force_isa(k::Isa::Scalar);
    for (std::size_t n : {0u, 1u, 5u, 64u}) {
        auto ids = random_ids(n, n + 1);
        std::vector<std::uint8_t> mask(n);
        std::vector<double> u(n);
        k::bernoulli_mask(77, ids, 0.3, mask);
        k::uniforms(77, ids, u);
        for (std::size_t i = 0; i < n; ++i) {
            CHECK(u[i] == counter_uniform(77, ids[i]));
            CHECK(mask[i] == (counter_uniform(77, ids[i]) < 0.3 ? 1 : 0));
        }
        auto a = random_doubles(n, 3), b = random_doubles(n, 4);
        CHECK(same_bits(k::dot(a, b), striped_dot(a, b)));
    }
}

TEST_CASE("every available variant is bit-identical to scalar") {
    IsaGuard guard;
    for (k::Isa isa : k::available_isas()) {
        CAPTURE(k::isa_name(isa));
        for (std::size_t n = 0; n <= 67; ++n) {
            CAPTURE(n);
            auto ids = random_ids(n, 100 + n);
            auto x = random_doubles(n, 200 + n), y = random_doubles(n, 300 + n);
            const double p = 0.05 + 0.9 * (n % 10) / 10.0;

            k::force_isa(k::Isa::Scalar);
            std::vector<std::uint8_t> mask_ref(n);
            std::vector<double> u_ref(n), sum_ref(n, 1.5), sq_ref(n, 2.5);
            k::bernoulli_mask(n * 31 + 7, ids, p, mask_ref);
            k::uniforms(n * 31 + 7, ids, u_ref);
            double dot_ref = k::dot(x, y);
            k::Moments m_ref = k::regression_moments(x, y);
            k::accumulate_columns(x, sum_ref, sq_ref);

            k::force_isa(isa);
            REQUIRE(k::active_isa() == isa);
            std::vector<std::uint8_t> mask(n);
            std::vector<double> u(n), sum(n, 1.5), sq(n, 2.5);
            k::bernoulli_mask(n * 31 + 7, ids, p, mask);
            k::uniforms(n * 31 + 7, ids, u);
            double d = k::dot(x, y);
            k::Moments m = k::regression_moments(x, y);
            k::accumulate_columns(x, sum, sq);

            CHECK(mask == mask_ref);
            CHECK(std::memcmp(u.data(), u_ref.data(), n * sizeof(double)) == 0);
            CHECK(same_bits(d, dot_ref));
            CHECK(same_bits(m.sum_x, m_ref.sum_x));
            CHECK(same_bits(m.sum_y, m_ref.sum_y));
            CHECK(same_bits(m.sum_xx, m_ref.sum_xx));
            CHECK(same_bits(m.sum_xy, m_ref.sum_xy));
            CHECK(same_bits(m.sum_yy, m_ref.sum_yy));
            CHECK(m.n == n);
            CHECK(std::memcmp(sum.data(), sum_ref.data(), n * sizeof(double)) == 0);
            CHECK(std::memcmp(sq.data(), sq_ref.data(), n * sizeof(double)) == 0);
        }
    }
}

TEST_CASE("size mismatches are rejected") {
    std::vector<std::uint32_t> ids(4);
    std::vector<std::uint8_t> mask(3);
    std::vector<double> a(4), b(5);
    CHECK_THROWS_AS(k::bernoulli_mask(1, ids, 0.5, mask), ParameterError);
    CHECK_THROWS_AS(k::dot(a, b), ParameterError);
    CHECK_THROWS_AS(k::regression_moments(a, b), ParameterError);
}

TEST_CASE("unsupported variants cannot be forced") {
    IsaGuard guard;
    auto isas = k::available_isas();
    for (k::Isa isa : {k::Isa::Avx2, k::Isa::Neon}) {
        if (std::find(isas.begin(), isas.end(), isa) == isas.end()) CHECK_THROWS_AS(k::force_isa(isa), ParameterError);
    }
}
