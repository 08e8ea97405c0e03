#include <algorithm>
#include <limits>
#include <vector>

#include "searchnet/error.hpp"
#include "searchnet/metrics.hpp"

namespace searchnet {
namespace {

constexpr std::uint32_t kUnreached = std::numeric_limits<std::uint32_t>::max();

// Unified view: users are [0, U), topics are [U, U + T).
class UnifiedGraph {
public:
    explicit UnifiedGraph(const BipartiteGraph& g) : g_(g), users_(static_cast<std::uint32_t>(g.user_count())) {}

    std::uint32_t size() const noexcept { return users_ + static_cast<std::uint32_t>(g_.topic_count()); }

    template <class F>
    void for_each_neighbor(std::uint32_t v, F&& f) const {
        if (v < users_) {
            for (std::uint32_t t : g_.neighbors(user(v))) f(users_ + t);
        } else {
            for (std::uint32_t u : g_.neighbors(topic(v - users_))) f(u);
        }
    }

    std::uint32_t degree(std::uint32_t v) const {
        return v < users_ ? g_.degree(user(v)) : g_.degree(topic(v - users_));
    }

private:
    const BipartiteGraph& g_;
    std::uint32_t users_;
};

struct Bfs {
    std::vector<std::uint32_t> dist;
    std::vector<std::uint32_t> queue;

    explicit Bfs(std::size_t n) : dist(n, kUnreached) { queue.reserve(n); }

    // Returns the eccentricity of `source`; `far` receives the farthest node
    // (first reached at the maximum distance).
    std::uint32_t run(const UnifiedGraph& g, std::uint32_t source, std::uint32_t* far = nullptr) {
        for (std::uint32_t v : queue) dist[v] = kUnreached;
        queue.clear();
        dist[source] = 0;
        queue.push_back(source);
        for (std::size_t head = 0; head < queue.size(); ++head) {
            const std::uint32_t v = queue[head];
            const std::uint32_t next = dist[v] + 1;
            g.for_each_neighbor(v, [&](std::uint32_t w) {
                if (dist[w] == kUnreached) {
                    dist[w] = next;
                    queue.push_back(w);
                }
            });
        }
        const std::uint32_t last = queue.back();
        if (far) {
            // queue is in nondecreasing distance order; take the first at max distance.
            const std::uint32_t ecc = dist[last];
            auto it = std::find_if(queue.begin(), queue.end(), [&](std::uint32_t v) { return dist[v] == ecc; });
            *far = *it;
        }
        return dist[last];
    }
};

}  // namespace

std::vector<std::uint32_t> largest_component(const BipartiteGraph& graph) {
    const UnifiedGraph g(graph);
    const std::uint32_t n = g.size();
    std::vector<std::uint32_t> label(n, kUnreached);
    std::vector<std::uint32_t> best, current;
    for (std::uint32_t s = 0; s < n; ++s) {
        if (label[s] != kUnreached) continue;
        current.clear();
        label[s] = s;
        current.push_back(s);
        for (std::size_t head = 0; head < current.size(); ++head) {
            g.for_each_neighbor(current[head], [&](std::uint32_t w) {
                if (label[w] == kUnreached) {
                    label[w] = s;
                    current.push_back(w);
                }
            });
        }
        if (current.size() > best.size()) best = current;
    }
    std::sort(best.begin(), best.end());
    return best;
}

DiameterReport diameter_exact(const BipartiteGraph& graph, std::size_t max_component) {
    DiameterReport report;
    report.method = DiameterMethod::ExactBFS;
    report.is_exact = true;
    const std::vector<std::uint32_t> comp = largest_component(graph);
    report.component_size = comp.size();
    if (comp.size() > max_component)
        throw SizeError("largest component has " + std::to_string(comp.size()) + " nodes, above the exact limit of " +
                            std::to_string(max_component) + "; use diameter_approx",
                        comp.size());
    if (comp.size() <= 1) return report;

    const UnifiedGraph g(graph);
    Bfs bfs(g.size());
    const std::size_t m = comp.size();
    std::vector<std::uint32_t> ecc_lo(m, 0), ecc_hi(m, kUnreached);
    std::vector<char> active(m, 1);
    std::size_t remaining = m;
    std::uint32_t diam_lo = 0;
    bool pick_high = true;

    std::vector<std::uint32_t> position(g.size(), kUnreached);
    for (std::size_t i = 0; i < m; ++i) position[comp[i]] = static_cast<std::uint32_t>(i);

    while (remaining > 0) {
        // Alternate between the largest upper bound and the smallest lower
        // bound; higher degree breaks ties.
        std::size_t pick = m;
        for (std::size_t i = 0; i < m; ++i) {
            if (!active[i]) continue;
            if (pick == m) {
                pick = i;
                continue;
            }
            const bool better = pick_high ? ecc_hi[i] > ecc_hi[pick] : ecc_lo[i] < ecc_lo[pick];
            const bool tie = pick_high ? ecc_hi[i] == ecc_hi[pick] : ecc_lo[i] == ecc_lo[pick];
            if (better || (tie && g.degree(comp[i]) > g.degree(comp[pick]))) pick = i;
        }
        pick_high = !pick_high;

        const std::uint32_t ecc = bfs.run(g, comp[pick]);
        diam_lo = std::max(diam_lo, ecc);
        ecc_lo[pick] = ecc_hi[pick] = ecc;

        for (std::uint32_t v : bfs.queue) {
            const std::uint32_t i = position[v];
            if (!active[i]) continue;
            const std::uint32_t d = bfs.dist[v];
            ecc_lo[i] = std::max({ecc_lo[i], d, ecc - d});
            ecc_hi[i] = std::min(ecc_hi[i], ecc + d);
            diam_lo = std::max(diam_lo, ecc_lo[i]);
        }
        for (std::size_t i = 0; i < m; ++i) {
            if (active[i] && (ecc_hi[i] <= diam_lo || ecc_lo[i] == ecc_hi[i])) {
                active[i] = 0;
                --remaining;
            }
        }
    }
    report.lower = report.upper = diam_lo;
    return report;
}

DiameterReport diameter_approx(const BipartiteGraph& graph, std::uint32_t sweeps, Rng& rng) {
    if (sweeps == 0) throw ParameterError("diameter_approx needs at least one sweep");
    DiameterReport report;
    report.method = DiameterMethod::DoubleSweepBounds;
    const std::vector<std::uint32_t> comp = largest_component(graph);
    report.component_size = comp.size();
    if (comp.size() <= 1) {
        report.is_exact = true;
        return report;
    }
    const UnifiedGraph g(graph);
    Bfs bfs(g.size());
    std::uint32_t lower = 0;
    std::uint32_t min_ecc = kUnreached;
    for (std::uint32_t s = 0; s < sweeps; ++s) {
        const std::uint32_t start = comp[rng.below(comp.size())];
        std::uint32_t far = start;
        const std::uint32_t e0 = bfs.run(g, start, &far);
        const std::uint32_t e1 = bfs.run(g, far);
        lower = std::max({lower, e0, e1});
        min_ecc = std::min({min_ecc, e0, e1});
    }
    report.lower = lower;
    report.upper = 2 * min_ecc;
    report.is_exact = report.lower == report.upper;
    return report;
}

}  // namespace searchnet
