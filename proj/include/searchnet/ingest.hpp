#pragma once

// Loading real-world edge lists and turning them into bipartite seed graphs.
//
// Plain format: one edge per line as two whitespace-separated integers;
// lines starting with '#' are comments.
// Bipartite format: the first non-comment line is the word BIPARTITE; each
// following line is `user-id topic-id` with an optional third integer
// column (weight or timestamp) that is accepted and ignored.

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "searchnet/graph.hpp"

namespace searchnet {

struct RawGraph {
    bool bipartite = false;
    bool directed = false;
    /// Dense index -> original id, ascending. Users in bipartite files.
    std::vector<std::int64_t> node_ids;
    /// Bipartite files only: topic dense index -> original id.
    std::vector<std::int64_t> topic_ids;
    /// Dense endpoints; (user, topic) for bipartite files.
    std::vector<std::pair<std::uint32_t, std::uint32_t>> edges;
    std::string source_path;
    std::uint64_t self_loops_dropped = 0;
    std::uint64_t duplicates_dropped = 0;
    std::uint64_t lines_read = 0;

    std::size_t node_count() const noexcept { return node_ids.size() + topic_ids.size(); }
};

struct LoadOptions {
    bool directed = false;
    std::string source_path;
};

/// Throws ParseError (with line number) on a malformed line and
/// EmptyGraphError when no edge survives.
RawGraph load_edge_list(std::istream& in, const LoadOptions& options = {});
RawGraph load_edge_list_file(const std::filesystem::path& path, LoadOptions options = {});

/// Writes `raw` back in its own format using the original ids.
void write_edge_list(std::ostream& os, const RawGraph& raw);

struct BipartizeStrategy {
    enum class Kind { DirectBipartite, DoubleCover, RandomSplit };

    Kind kind = Kind::DoubleCover;
    double split_fraction = 0.5;  // RandomSplit: probability a node becomes a user
    std::uint64_t seed = 0;

    void validate() const;
};

const char* strategy_name(BipartizeStrategy::Kind k) noexcept;
BipartizeStrategy::Kind parse_strategy_kind(const std::string& name);

struct BipartizeResult {
    BipartiteGraph graph;
    /// Original ids of each user / topic index.
    std::vector<std::int64_t> user_ids;
    std::vector<std::int64_t> topic_ids;
    /// RandomSplit: edges whose endpoints landed on the same side.
    std::uint64_t dropped_edges = 0;
    /// Raw edges that mapped onto an already present bipartite edge.
    std::uint64_t merged_edges = 0;
};

/// DirectBipartite keeps a bipartite file as is. DoubleCover makes every
/// raw node both a user and a topic and maps edge (a, b) to user a - topic b
/// (plus user b - topic a when undirected). RandomSplit sends node i (in
/// dense order) to the user side when the i-th uniform of
/// Rng(mix_seed(seed, kRandomSplitStream)) is below split_fraction; edges
/// inside one side are dropped. Throws BipartizeError if a side ends up
/// empty or the strategy does not fit the input.
BipartizeResult bipartize(const RawGraph& raw, const BipartizeStrategy& strategy);

inline constexpr std::uint64_t kRandomSplitStream = 21;
inline constexpr std::uint64_t kTopUpStream = 22;

struct SeedResult {
    BipartizeResult bipartite;
    std::uint64_t topped_up_edges = 0;
};

/// bipartize, then add uniform random edges until every user has degree
/// >= c_u and every topic >= c_t (stream mix_seed(strategy.seed, kTopUpStream)).
SeedResult seed_from_dataset(const RawGraph& raw, const BipartizeStrategy& strategy, std::uint32_t c_u,
                             std::uint32_t c_t);

/// JSON sidecar describing where a seed graph came from.
std::string provenance_json(const RawGraph& raw, const BipartizeStrategy& strategy, const SeedResult& seed);

/// Writes a BipartiteGraph in the bipartite format with dense ids.
void write_bipartite(std::ostream& os, const BipartiteGraph& graph);

/// Reads a bipartite-format file back into a graph (ids sorted ascending).
BipartiteGraph load_bipartite_file(const std::filesystem::path& path);

}  // namespace searchnet
