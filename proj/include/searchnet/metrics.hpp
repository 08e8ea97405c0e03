#pragma once

// Empirical measurements over a BipartiteGraph and the closed-form model
// quantities they are compared against.

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "searchnet/evolution.hpp"
#include "searchnet/graph.hpp"
#include "searchnet/rng.hpp"

namespace searchnet {

// ---------------------------------------------------------------------------
// Degree distribution

struct DegreeHistogram {
    Side side = Side::User;
    std::map<std::uint32_t, std::uint64_t> counts;  // degree -> node count
    std::uint64_t total_nodes = 0;                  // nodes with degree >= d_floor
    std::uint64_t recorded_at = 0;
    std::uint32_t d_floor = 1;
};

/// Counts nodes of `side` by degree, keeping degrees >= d_floor.
/// Degree-reproduction figures use d_floor = 11.
DegreeHistogram degree_histogram(const BipartiteGraph& graph, Side side, std::uint32_t d_floor = 1,
                                 std::uint64_t recorded_at = 0);

enum class FitMethod { LogLogRegression, DiscreteMLE };

const char* fit_method_name(FitMethod m) noexcept;
FitMethod parse_fit_method(const std::string& name);

/// Exponent of P(d) ~ d^alpha. `alpha` keeps the model's sign (negative for
/// a decaying distribution); magnitude() is the conventional positive value.
struct PowerLawFit {
    double alpha = 0.0;
    std::uint32_t d_min = 1;
    FitMethod method = FitMethod::LogLogRegression;
    /// r^2 of the regression, or the standard error of the MLE.
    double quality = 0.0;
    std::uint64_t n_tail = 0;
    /// Distinct degrees used (regression points).
    std::size_t points = 0;

    double magnitude() const noexcept { return -alpha; }
};

/// LogLogRegression: least-squares slope of (ln d, ln count) over degrees
/// >= d_min with non-zero count; needs >= 10 such degrees.
/// DiscreteMLE: 1 + n / sum(ln(d / (d_min - 0.5))) over the tail; needs
/// n_tail >= 10. Throws FitError otherwise.
PowerLawFit fit_power_law(const DegreeHistogram& hist, std::uint32_t d_min, FitMethod method);

/// CSV with header `degree,count`.
void write_histogram_csv(std::ostream& os, const DegreeHistogram& hist);

/// Single-line JSON fit record.
std::string fit_to_json(const PowerLawFit& fit);

// ---------------------------------------------------------------------------
// Diameter

enum class DiameterMethod { ExactBFS, DoubleSweepBounds };

struct DiameterReport {
    std::uint32_t lower = 0;
    std::uint32_t upper = 0;
    std::size_t component_size = 0;
    DiameterMethod method = DiameterMethod::ExactBFS;
    bool is_exact = true;

    std::uint32_t value() const noexcept { return lower; }
};

inline constexpr std::size_t kDefaultExactDiameterLimit = 5000;

/// Nodes of the largest connected component, as unified ids (users first,
/// then topics offset by user_count). Ties go to the component containing
/// the smallest id.
std::vector<std::uint32_t> largest_component(const BipartiteGraph& graph);

/// Exact diameter of the largest component. Eccentricity bounds prune most
/// BFS sources; the answer equals the all-sources maximum. Throws SizeError
/// when the component exceeds `max_component` nodes.
DiameterReport diameter_exact(const BipartiteGraph& graph, std::size_t max_component = kDefaultExactDiameterLimit);

/// Repeated double sweeps from uniform random starts in the largest
/// component. lower = largest eccentricity seen, upper = 2 * smallest.
DiameterReport diameter_approx(const BipartiteGraph& graph, std::uint32_t sweeps, Rng& rng);

// ---------------------------------------------------------------------------
// Closed-form model quantities

/// Degree exponent of the engine-free model: -2 - c_u*beta / (c_t*(1-beta)).
double model_exponent(const EvolutionConfig& config);

/// Limit of the expected fraction of users with degree i per unit time.
/// For i == c_u:
///   (beta - p*u*c_t)(c_u*beta + c_t*(1-beta)) / (c_u*beta + c_t*(1-beta) + (1-beta)*c_u*c_t)
/// For i > c_u (up to proportionality), with r = c_u*beta / (c_t*(1-beta)):
///   i^-(2+r) + p*u*c_t*(r+1) * sum_{k=c_t..i} k^-(3+r)
/// where p = config.p_search and u = u_term. Qualitative overlay only: the
/// i == c_u value can go negative when p*u*c_t > beta. Throws DomainError for
/// i < c_u.
double theoretical_degree_fraction(std::uint32_t i, const EvolutionConfig& config, double u_term);

struct RouteExpectation {
    double e0 = 0.0;
    double n = 0.0;
    double u = 0.0;
    double d_max = 0.0;
    double value_with_engine = 0.0;
    double value_without_engine = 0.0;
    /// value_without_engine - value_with_engine, evaluated directly so small
    /// savings keep full relative precision next to large totals.
    double engine_saving = 0.0;
};

/// Expected total route length with and without search edges:
///   E0 + Dmax*(n(n-1)/2 - E0) - (Dmax - 1)*(c_u*beta + c_t*(1-beta) [+ p*u*c_t]).
/// Requires d_max > 1 and n >= 2.
RouteExpectation expected_route(double e0, double n, double u, double d_max, const EvolutionConfig& config);

/// Worst-case diameter bound: u + 1 without the engine, u - p_t*u + 1 with it.
double worst_case_diameter(double u, double p_t, bool with_engine);

/// Iterates a_{t+1} = (1 - b_t/t) a_t + c_t from t0 to horizon and returns
/// a_horizon / horizon. Throws DomainError if b at the horizon is <= -1 or
/// b_t / t >= 1 anywhere on the path.
double iterate_lemma1_recursion(const std::function<double(std::uint64_t)>& b_seq,
                                const std::function<double(std::uint64_t)>& c_seq, std::uint64_t t0, double a0,
                                std::uint64_t horizon);

}  // namespace searchnet
