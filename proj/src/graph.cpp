#include "searchnet/graph.hpp"

#include <algorithm>
#include <bit>

#include "searchnet/error.hpp"

namespace searchnet {

const char* side_name(Side s) noexcept { return s == Side::User ? "user" : "topic"; }

// ---------------------------------------------------------------------------
// DegreeIndex

void DegreeIndex::push_back(std::uint64_t mass) {
    if (tree_.empty()) tree_.push_back(0);
    const std::size_t i = mass_.size() + 1;  // 1-based slot
    const std::size_t low = i & (~i + 1);
    // Slot i covers (i - low, i]; everything but the new element is already indexed.
    tree_.push_back(mass + prefix(i - 1) - prefix(i - low));
    mass_.push_back(mass);
    total_ += mass;
}

void DegreeIndex::add(std::size_t i, std::int64_t delta) {
    if (i >= mass_.size()) throw IndexError("degree index slot out of range");
    if (delta < 0 && static_cast<std::uint64_t>(-delta) > mass_[i])
        throw ParameterError("degree index mass would become negative");
    mass_[i] += static_cast<std::uint64_t>(delta);
    total_ += static_cast<std::uint64_t>(delta);
    for (std::size_t j = i + 1; j < tree_.size(); j += j & (~j + 1)) tree_[j] += static_cast<std::uint64_t>(delta);
}

std::uint64_t DegreeIndex::prefix(std::size_t count) const noexcept {
    std::uint64_t s = 0;
    for (std::size_t j = count; j > 0; j -= j & (~j + 1)) s += tree_[j];
    return s;
}

std::size_t DegreeIndex::find(std::uint64_t target) const {
    if (target >= total_) throw SamplingError("degree index target beyond total mass");
    const std::size_t n = mass_.size();
    std::size_t pos = 0;
    std::size_t step = std::bit_floor(n);
    for (; step != 0; step >>= 1) {
        const std::size_t next = pos + step;
        if (next <= n && tree_[next] <= target) {
            pos = next;
            target -= tree_[next];
        }
    }
    return pos;  // 0-based index of the slot containing target
}

// ---------------------------------------------------------------------------
// BipartiteGraph

BipartiteGraph::BipartiteGraph(std::size_t users, std::size_t topics) {
    for (std::size_t i = 0; i < users; ++i) add_node(Side::User);
    for (std::size_t i = 0; i < topics; ++i) add_node(Side::Topic);
}

NodeRef BipartiteGraph::add_node(Side side) {
    auto& adj = side == Side::User ? users_ : topics_;
    auto& index = side == Side::User ? user_index_ : topic_index_;
    if (adj.size() >= UINT32_MAX) throw ParameterError("node count exceeds 32-bit ids");
    adj.emplace_back();
    index.push_back(0);
    return {side, static_cast<std::uint32_t>(adj.size() - 1)};
}

void BipartiteGraph::check_ref(NodeRef n, Side expected) const {
    if (n.side != expected)
        throw IndexError(std::string("expected a ") + side_name(expected) + " node, got a " + side_name(n.side));
    if (!valid(n))
        throw IndexError(std::string(side_name(n.side)) + " index " + std::to_string(n.index) + " out of range");
}

bool BipartiteGraph::has_edge(std::uint32_t u, std::uint32_t t) const {
    if (u >= users_.size() || t >= topics_.size()) return false;
    const auto& ul = users_[u];
    const auto& tl = topics_[t];
    if (ul.size() <= tl.size()) return std::find(ul.begin(), ul.end(), t) != ul.end();
    return std::find(tl.begin(), tl.end(), u) != tl.end();
}

bool BipartiteGraph::add_edge(NodeRef u, NodeRef t) {
    check_ref(u, Side::User);
    check_ref(t, Side::Topic);
    if (has_edge(u.index, t.index)) return false;
    users_[u.index].push_back(t.index);
    topics_[t.index].push_back(u.index);
    user_index_.add(u.index, 1);
    topic_index_.add(t.index, 1);
    ++edge_count_;
    return true;
}

std::uint32_t BipartiteGraph::degree(NodeRef n) const {
    check_ref(n, n.side);
    return static_cast<std::uint32_t>(adjacency(n.side)[n.index].size());
}

std::span<const std::uint32_t> BipartiteGraph::neighbors(NodeRef n) const {
    check_ref(n, n.side);
    return adjacency(n.side)[n.index];
}

NodeRef BipartiteGraph::sample_preferential(Side side, Rng& rng) const {
    const DegreeIndex& index = degree_index(side);
    if (index.size() == 0) throw SamplingError(std::string("no ") + side_name(side) + " nodes to sample");
    if (index.total() == 0) throw SamplingError(std::string("all ") + side_name(side) + " degrees are zero");
    return {side, static_cast<std::uint32_t>(index.find(rng.below(index.total())))};
}

// ---------------------------------------------------------------------------

std::vector<std::string> check_invariants(const BipartiteGraph& g, std::uint32_t min_user_degree,
                                          std::uint32_t min_topic_degree) {
    std::vector<std::string> problems;
    std::uint64_t degree_sum[2] = {0, 0};

    for (Side side : {Side::User, Side::Topic}) {
        const Side other = opposite(side);
        const std::uint32_t min_degree = side == Side::User ? min_user_degree : min_topic_degree;
        const DegreeIndex& index = g.degree_index(side);
        if (index.size() != g.node_count(side)) problems.push_back(std::string(side_name(side)) + ": index size mismatch");
        for (std::uint32_t i = 0; i < g.node_count(side); ++i) {
            const NodeRef n{side, i};
            auto nb = g.neighbors(n);
            const std::string name = std::string(side_name(side)) + " " + std::to_string(i);
            degree_sum[side == Side::User ? 0 : 1] += nb.size();
            if (i < index.size() && index.mass(i) != nb.size()) problems.push_back(name + ": index mass differs from degree");
            if (nb.size() < min_degree) problems.push_back(name + ": degree below minimum " + std::to_string(min_degree));
            std::vector<std::uint32_t> sorted(nb.begin(), nb.end());
            std::sort(sorted.begin(), sorted.end());
            if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end()) problems.push_back(name + ": parallel edge");
            for (std::uint32_t j : nb) {
                if (j >= g.node_count(other)) {
                    problems.push_back(name + ": neighbor out of range");
                    continue;
                }
                auto back = g.neighbors({other, j});
                if (std::find(back.begin(), back.end(), i) == back.end()) problems.push_back(name + ": asymmetric adjacency");
            }
        }
        if (index.total() != degree_sum[side == Side::User ? 0 : 1])
            problems.push_back(std::string(side_name(side)) + ": index total differs from degree sum");
    }
    if (degree_sum[0] != g.edge_count()) problems.push_back("user degree sum differs from edge count");
    if (degree_sum[1] != g.edge_count()) problems.push_back("topic degree sum differs from edge count");
    return problems;
}

namespace {

// Uniform non-neighbor of `n` on the opposite side. Caller guarantees one exists.
std::uint32_t random_non_neighbor(const BipartiteGraph& g, NodeRef n, Rng& rng) {
    const Side other = opposite(n.side);
    const std::size_t pool = g.node_count(other);
    const std::size_t deg = g.degree(n);
    // Rejection is fast while the node is far from saturated.
    if (deg * 2 < pool) {
        for (;;) {
            const auto c = static_cast<std::uint32_t>(rng.below(pool));
            const bool present = n.side == Side::User ? g.has_edge(n.index, c) : g.has_edge(c, n.index);
            if (!present) return c;
        }
    }
    std::vector<char> taken(pool, 0);
    for (std::uint32_t j : g.neighbors(n)) taken[j] = 1;
    std::vector<std::uint32_t> free;
    free.reserve(pool - deg);
    for (std::uint32_t j = 0; j < pool; ++j)
        if (!taken[j]) free.push_back(j);
    return free[rng.below(free.size())];
}

}  // namespace

std::size_t top_up_min_degrees(BipartiteGraph& g, std::uint32_t c_u, std::uint32_t c_t, Rng& rng) {
    if (c_u > 0 && c_u > g.topic_count())
        throw ParameterError("c_u=" + std::to_string(c_u) + " exceeds topic count " + std::to_string(g.topic_count()));
    if (c_t > 0 && c_t > g.user_count())
        throw ParameterError("c_t=" + std::to_string(c_t) + " exceeds user count " + std::to_string(g.user_count()));
    std::size_t added = 0;
    for (std::uint32_t u = 0; u < g.user_count(); ++u) {
        while (g.degree(user(u)) < c_u) {
            g.add_edge(user(u), topic(random_non_neighbor(g, user(u), rng)));
            ++added;
        }
    }
    for (std::uint32_t t = 0; t < g.topic_count(); ++t) {
        while (g.degree(topic(t)) < c_t) {
            g.add_edge(user(random_non_neighbor(g, topic(t), rng)), topic(t));
            ++added;
        }
    }
    return added;
}

BipartiteGraph new_seed_graph(const SeedGraphOptions& opts, Rng& rng) {
    if (opts.users == 0 || opts.topics == 0) throw ParameterError("seed graph needs at least one user and one topic");
    if (opts.c_u > opts.topics)
        throw ParameterError("infeasible c_u=" + std::to_string(opts.c_u) + " with " + std::to_string(opts.topics) + " topics");
    if (opts.c_t > opts.users)
        throw ParameterError("infeasible c_t=" + std::to_string(opts.c_t) + " with " + std::to_string(opts.users) + " users");

    BipartiteGraph g(opts.users, opts.topics);
    if (opts.connected) {
        // Walk u0 t0 u1 t1 ... wrapping indices; consecutive nodes are joined,
        // so every node sits on one connected walk.
        const std::size_t rounds = std::max(opts.users, opts.topics);
        for (std::size_t i = 0; i < rounds; ++i) {
            const auto t = static_cast<std::uint32_t>(i % opts.topics);
            g.add_edge(user(static_cast<std::uint32_t>(i % opts.users)), topic(t));
            if (i + 1 < rounds || opts.users > 1)
                g.add_edge(user(static_cast<std::uint32_t>((i + 1) % opts.users)), topic(t));
        }
    }
    top_up_min_degrees(g, opts.c_u, opts.c_t, rng);
    return g;
}

}  // namespace searchnet
