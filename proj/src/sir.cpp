#include "searchnet/sir.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>

#include "searchnet/csv.hpp"
#include "searchnet/error.hpp"
#include "searchnet/kernels.hpp"
#include "searchnet/rng.hpp"

namespace searchnet {
namespace {

enum Channel : std::uint64_t { kInit = 11, kContact = 12, kRecover = 13, kSearch = 14 };

std::uint64_t draw_key(std::uint64_t seed, Channel channel, std::uint64_t a, std::uint64_t b = 0) {
    return mix_seed(mix_seed(mix_seed(seed, channel), a), b);
}

bool probability(double p) { return p >= 0.0 && p <= 1.0; }

}  // namespace

const char* exposure_model_name(ExposureModel m) noexcept {
    return m == ExposureModel::PrevalenceScaled ? "PrevalenceScaled" : "TopicMediated";
}

ExposureModel parse_exposure_model(const std::string& name) {
    if (name == "PrevalenceScaled") return ExposureModel::PrevalenceScaled;
    if (name == "TopicMediated") return ExposureModel::TopicMediated;
    throw ParameterError("unknown exposure model: " + name);
}

void SirConfig::validate() const {
    if (!probability(lambda) || !probability(mu) || !probability(xi) || !probability(search_probability))
        throw ParameterError("SIR probabilities must lie in [0, 1]");
    if (!(initial_fraction > 0.0 && initial_fraction <= 1.0))
        throw ParameterError("initial_fraction must lie in (0, 1]");
    if (exposure_model == ExposureModel::TopicMediated) {
        search_policy.validate();
        if (search_policy.kind == SearchPolicy::Kind::SimilarityRanked)
            throw ParameterError("TopicMediated exposure needs a static ranking (UniformRandom or DegreeRanked)");
    }
}

SirState sir_init(const BipartiteGraph& graph, const SirConfig& config) {
    config.validate();
    const std::size_t n = graph.user_count();
    if (n == 0) throw ParameterError("SIR needs at least one user");
    SirState s;
    s.status.assign(n, Health::Susceptible);
    s.infected_at.assign(n, 0);

    auto seeds = static_cast<std::size_t>(std::ceil(config.initial_fraction * static_cast<double>(n)));
    seeds = std::clamp<std::size_t>(seeds, 1, n);
    // Floyd's algorithm: `seeds` distinct users uniformly at random.
    Rng rng(mix_seed(config.seed, kInit));
    for (std::size_t j = n - seeds; j < n; ++j) {
        const auto r = static_cast<std::size_t>(rng.below(j + 1));
        const std::size_t pick = s.status[r] == Health::Susceptible ? r : j;
        s.status[pick] = Health::Infectious;
    }
    s.aware = s.infectious = seeds;
    return s;
}

SirState sir_step(SirState state, const BipartiteGraph& graph, const SirConfig& config) {
    const std::size_t n = state.size();
    if (n != graph.user_count()) throw ParameterError("SIR state does not match the graph's user count");
    const std::uint32_t now = state.time + 1;
    if (state.infectious == 0) {
        state.time = now;
        return state;
    }

    std::vector<std::uint8_t> fresh(n, 0);
    std::uint64_t fresh_count = 0;

    // Topics with no susceptible member cannot produce an infection.
    std::vector<std::uint32_t> open(graph.topic_count(), 0);
    for (std::uint32_t t = 0; t < graph.topic_count(); ++t)
        for (std::uint32_t w : graph.neighbors(topic(t))) open[t] += state.status[w] == Health::Susceptible ? 1 : 0;

    auto infect = [&](std::uint32_t w) {
        fresh[w] = 1;
        ++fresh_count;
        for (std::uint32_t t : graph.neighbors(user(w))) --open[t];
    };

    std::vector<std::uint8_t> mask;
    if (config.lambda > 0.0) {
        for (std::uint32_t v = 0; v < n; ++v) {
            if (state.status[v] != Health::Infectious) continue;
            const std::uint64_t key = draw_key(config.seed, kContact, v, now - state.infected_at[v]);
            for (std::uint32_t t : graph.neighbors(user(v))) {
                if (open[t] == 0) continue;
                auto members = graph.neighbors(topic(t));
                mask.resize(members.size());
                kernels::bernoulli_mask(key, members, config.lambda, mask);
                for (std::size_t i = 0; i < members.size(); ++i) {
                    const std::uint32_t w = members[i];
                    if (mask[i] && state.status[w] == Health::Susceptible && !fresh[w]) infect(w);
                }
            }
        }
    }

    if (config.engine_enabled && config.xi > 0.0) {
        double p = 0.0;
        if (config.exposure_model == ExposureModel::PrevalenceScaled) {
            p = config.xi * static_cast<double>(state.aware) / static_cast<double>(n);
        } else {
            // Share of search hits, weighted by the ranking, that land on a
            // topic with an infectious member.
            double hit = 0.0, total = 0.0;
            for (std::uint32_t t = 0; t < graph.topic_count(); ++t) {
                const double d = graph.degree(topic(t));
                double w = 1.0;
                if (config.search_policy.kind == SearchPolicy::Kind::DegreeRanked)
                    w = d > 0.0 ? std::pow(d, config.search_policy.exponent) : 0.0;
                total += w;
                auto members = graph.neighbors(topic(t));
                if (std::any_of(members.begin(), members.end(),
                                [&](std::uint32_t u) { return state.status[u] == Health::Infectious; }))
                    hit += w;
            }
            p = total > 0.0 ? config.xi * config.search_probability * hit / total : 0.0;
        }
        std::vector<std::uint32_t> candidates;
        for (std::uint32_t w = 0; w < n; ++w)
            if (state.status[w] == Health::Susceptible && !fresh[w]) candidates.push_back(w);
        mask.resize(candidates.size());
        kernels::bernoulli_mask(draw_key(config.seed, kSearch, now), candidates, p, mask);
        for (std::size_t i = 0; i < candidates.size(); ++i)
            if (mask[i]) infect(candidates[i]);
    }

    for (std::uint32_t v = 0; v < n; ++v) {
        if (state.status[v] != Health::Infectious) continue;
        if (counter_uniform(draw_key(config.seed, kRecover, now - state.infected_at[v]), v) < config.mu) {
            state.status[v] = Health::Recovered;
            --state.infectious;
        }
    }
    for (std::uint32_t w = 0; w < n; ++w) {
        if (!fresh[w]) continue;
        state.status[w] = Health::Infectious;
        state.infected_at[w] = now;
    }
    state.infectious += fresh_count;
    state.aware += fresh_count;
    state.time = now;
    return state;
}

double rumor_coverage(const SirState& state) noexcept {
    return state.size() == 0 ? 0.0 : static_cast<double>(state.aware) / static_cast<double>(state.size());
}

namespace {

SirSample sample_of(const SirState& s) {
    return {s.time, s.susceptible(), s.infectious, s.recovered(), rumor_coverage(s)};
}

}  // namespace

SirTrace run_sir(const BipartiteGraph& graph, const SirConfig& config) {
    SirTrace trace;
    SirState state = sir_init(graph, config);
    trace.series.push_back(sample_of(state));
    while (state.time < config.max_steps && state.infectious > 0) {
        state = sir_step(std::move(state), graph, config);
        trace.series.push_back(sample_of(state));
    }
    std::size_t stable = trace.series.size() - 1;
    while (stable > 0 && trace.series[stable - 1].coverage == trace.series.back().coverage) --stable;
    trace.steps_to_stability = trace.series[stable].t;
    trace.final_state = std::move(state);
    return trace;
}

double coverage_at(const SirTrace& trace, std::uint32_t t) noexcept {
    if (trace.series.empty()) return 0.0;
    if (t >= trace.series.size()) return trace.series.back().coverage;
    return trace.series[t].coverage;
}

void write_sir_csv(std::ostream& os, const SirTrace& trace) {
    os << "t,susceptible,infectious,recovered,coverage\n";
    for (const SirSample& s : trace.series)
        os << s.t << ',' << s.susceptible << ',' << s.infectious << ',' << s.recovered << ','
           << format_double(s.coverage) << '\n';
}

}  // namespace searchnet
