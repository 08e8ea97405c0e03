#include <cmath>

#include "searchnet/error.hpp"
#include "searchnet/metrics.hpp"

namespace searchnet {

double model_exponent(const EvolutionConfig& c) {
    return -2.0 - (c.c_u * c.beta) / (c.c_t * (1.0 - c.beta));
}

double theoretical_degree_fraction(std::uint32_t i, const EvolutionConfig& c, double u_term) {
    if (i < c.c_u) throw DomainError("degree " + std::to_string(i) + " below c_u=" + std::to_string(c.c_u));
    const double beta = c.beta;
    const double cu = c.c_u;
    const double ct = c.c_t;
    const double search_mass = c.p_search * u_term * ct;
    if (i == c.c_u) {
        const double arrivals = cu * beta + ct * (1.0 - beta);
        return (beta - search_mass) * arrivals / (arrivals + (1.0 - beta) * cu * ct);
    }
    const double r = (cu * beta) / (ct * (1.0 - beta));
    double series = 0.0;
    for (std::uint32_t k = c.c_t; k <= i; ++k) series += std::pow(static_cast<double>(k), -(3.0 + r));
    return std::pow(static_cast<double>(i), -(2.0 + r)) + search_mass * (r + 1.0) * series;
}

RouteExpectation expected_route(double e0, double n, double u, double d_max, const EvolutionConfig& c) {
    if (!(d_max > 1.0)) throw DomainError("d_max must exceed 1");
    if (!(n >= 2.0)) throw DomainError("n must be >= 2");
    RouteExpectation r{e0, n, u, d_max, 0.0, 0.0, 0.0};
    const double arrivals = c.c_u * c.beta + c.c_t * (1.0 - c.beta);
    const double base = e0 + d_max * (n * (n - 1.0) / 2.0 - e0);
    r.value_without_engine = base - (d_max - 1.0) * arrivals;
    r.engine_saving = (d_max - 1.0) * c.p_search * u * c.c_t;
    r.value_with_engine = r.value_without_engine - r.engine_saving;
    return r;
}

double worst_case_diameter(double u, double p_t, bool with_engine) {
    if (!(u >= 1.0)) throw DomainError("u must be >= 1");
    return with_engine ? u - p_t * u + 1.0 : u + 1.0;
}

double iterate_lemma1_recursion(const std::function<double(std::uint64_t)>& b_seq,
                                const std::function<double(std::uint64_t)>& c_seq, std::uint64_t t0, double a0,
                                std::uint64_t horizon) {
    if (t0 < 1 || horizon <= t0) throw DomainError("need horizon > t0 >= 1");
    if (b_seq(horizon) <= -1.0) throw DomainError("b <= -1: the recursion diverges");
    double a = a0;
    for (std::uint64_t t = t0; t < horizon; ++t) {
        const double td = static_cast<double>(t);
        const double ratio = b_seq(t) / td;
        if (ratio >= 1.0) throw DomainError("b_t / t >= 1 at t=" + std::to_string(t));
        a = (1.0 - ratio) * a + c_seq(t);
    }
    return a / static_cast<double>(horizon);
}

}  // namespace searchnet
