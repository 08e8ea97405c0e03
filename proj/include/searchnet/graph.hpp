#pragma once

// The user/topic affiliation graph and its degree-proportional sampler.

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "searchnet/rng.hpp"

namespace searchnet {

enum class Side : std::uint8_t { User, Topic };

constexpr Side opposite(Side s) noexcept { return s == Side::User ? Side::Topic : Side::User; }

const char* side_name(Side s) noexcept;

struct NodeRef {
    Side side = Side::User;
    std::uint32_t index = 0;

    friend bool operator==(const NodeRef&, const NodeRef&) = default;
};

constexpr NodeRef user(std::uint32_t i) noexcept { return {Side::User, i}; }
constexpr NodeRef topic(std::uint32_t i) noexcept { return {Side::Topic, i}; }

/// Binary indexed tree over non-negative integer masses. Supports appending
/// new slots, O(log n) point updates and O(log n) inverse-prefix search.
class DegreeIndex {
public:
    std::size_t size() const noexcept { return mass_.size(); }
    std::uint64_t total() const noexcept { return total_; }
    std::uint64_t mass(std::size_t i) const { return mass_.at(i); }

    void push_back(std::uint64_t mass);
    void add(std::size_t i, std::int64_t delta);

    /// Smallest index whose inclusive prefix sum exceeds `target`.
    /// Requires target < total().
    std::size_t find(std::uint64_t target) const;

    std::uint64_t prefix(std::size_t count) const noexcept;

private:
    std::vector<std::uint64_t> tree_;  // 1-based Fenwick array, tree_[0] unused
    std::vector<std::uint64_t> mass_;
    std::uint64_t total_ = 0;
};

class BipartiteGraph {
public:
    BipartiteGraph() = default;
    BipartiteGraph(std::size_t users, std::size_t topics);

    NodeRef add_node(Side side);
    NodeRef add_user() { return add_node(Side::User); }
    NodeRef add_topic() { return add_node(Side::Topic); }

    /// Inserts user-topic edge. Returns false (and changes nothing) if the
    /// edge already exists. Throws IndexError on a bad NodeRef.
    bool add_edge(NodeRef u, NodeRef t);

    bool has_edge(std::uint32_t u, std::uint32_t t) const;

    std::size_t node_count(Side side) const noexcept { return adjacency(side).size(); }
    std::size_t user_count() const noexcept { return users_.size(); }
    std::size_t topic_count() const noexcept { return topics_.size(); }
    std::size_t edge_count() const noexcept { return edge_count_; }

    std::uint32_t degree(NodeRef n) const;
    std::span<const std::uint32_t> neighbors(NodeRef n) const;

    const DegreeIndex& degree_index(Side side) const noexcept {
        return side == Side::User ? user_index_ : topic_index_;
    }

    /// Draws a node of `side` with probability degree / total degree.
    /// Throws SamplingError when the side has no degree mass.
    NodeRef sample_preferential(Side side, Rng& rng) const;

    bool valid(NodeRef n) const noexcept { return n.index < node_count(n.side); }

    friend bool operator==(const BipartiteGraph& a, const BipartiteGraph& b) {
        return a.users_ == b.users_ && a.topics_ == b.topics_;
    }

private:
    const std::vector<std::vector<std::uint32_t>>& adjacency(Side s) const noexcept {
        return s == Side::User ? users_ : topics_;
    }
    void check_ref(NodeRef n, Side expected) const;

    std::vector<std::vector<std::uint32_t>> users_;
    std::vector<std::vector<std::uint32_t>> topics_;
    DegreeIndex user_index_;
    DegreeIndex topic_index_;
    std::size_t edge_count_ = 0;
};

/// Structural invariant check. Returns one message per violation; empty
/// means the graph is well formed and meets the requested minimum degrees.
std::vector<std::string> check_invariants(const BipartiteGraph& g, std::uint32_t min_user_degree = 0,
                                          std::uint32_t min_topic_degree = 0);

struct SeedGraphOptions {
    std::size_t users = 10;
    std::size_t topics = 10;
    std::uint32_t c_u = 1;
    std::uint32_t c_t = 1;
    bool connected = true;
};

/// Builds the time-0 graph. With `connected`, an alternating walk
/// u0 t0 u1 t1 ... (indices wrapping) first covers every node; then nodes
/// below their minimum degree receive uniformly random non-duplicate edges.
BipartiteGraph new_seed_graph(const SeedGraphOptions& opts, Rng& rng);

/// Adds uniformly random edges until every user has degree >= c_u and every
/// topic degree >= c_t. Users are filled first, in index order. Returns the
/// number of edges added.
std::size_t top_up_min_degrees(BipartiteGraph& g, std::uint32_t c_u, std::uint32_t c_t, Rng& rng);

}  // namespace searchnet
