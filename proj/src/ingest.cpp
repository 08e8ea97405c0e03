#include "searchnet/ingest.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <istream>
#include <ostream>
#include <string_view>
#include <unordered_map>
#include <unordered_set>

#include <json.hpp>

#include "searchnet/error.hpp"
#include "searchnet/rng.hpp"

namespace searchnet {
namespace {

std::string_view trim(std::string_view s) {
    const auto first = s.find_first_not_of(" \t\r\n");
    if (first == std::string_view::npos) return {};
    const auto last = s.find_last_not_of(" \t\r\n");
    return s.substr(first, last - first + 1);
}

// Splits on whitespace and parses every token as a signed 64-bit integer.
std::vector<std::int64_t> parse_integers(std::string_view line, std::size_t line_no) {
    std::vector<std::int64_t> out;
    std::size_t pos = 0;
    while (pos < line.size()) {
        while (pos < line.size() && (line[pos] == ' ' || line[pos] == '\t')) ++pos;
        if (pos >= line.size()) break;
        std::size_t end = pos;
        while (end < line.size() && line[end] != ' ' && line[end] != '\t') ++end;
        const std::string_view token = line.substr(pos, end - pos);
        std::int64_t value = 0;
        auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), value);
        if (ec != std::errc() || ptr != token.data() + token.size())
            throw ParseError("not an integer: '" + std::string(token) + "'", line_no);
        out.push_back(value);
        pos = end;
    }
    return out;
}

// Dense ascending remap of `ids`; returns the sorted unique ids.
std::vector<std::int64_t> dense_ids(std::vector<std::int64_t> ids) {
    std::sort(ids.begin(), ids.end());
    ids.erase(std::unique(ids.begin(), ids.end()), ids.end());
    return ids;
}

std::uint32_t index_of(const std::vector<std::int64_t>& sorted, std::int64_t id) {
    return static_cast<std::uint32_t>(std::lower_bound(sorted.begin(), sorted.end(), id) - sorted.begin());
}

}  // namespace

RawGraph load_edge_list(std::istream& in, const LoadOptions& options) {
    RawGraph raw;
    raw.directed = options.directed;
    raw.source_path = options.source_path;

    std::vector<std::pair<std::int64_t, std::int64_t>> pairs;
    std::vector<std::int64_t> left_ids, right_ids;
    bool header_seen = false;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        const std::string_view body = trim(line);
        if (body.empty() || body.front() == '#') continue;
        if (!header_seen && pairs.empty() && !raw.bipartite && body == "BIPARTITE") {
            raw.bipartite = true;
            header_seen = true;
            continue;
        }
        const auto values = parse_integers(body, line_no);
        const std::size_t max_cols = raw.bipartite ? 3 : 2;
        if (values.size() < 2 || values.size() > max_cols)
            throw ParseError("expected " + std::string(raw.bipartite ? "2 or 3" : "2") + " columns, found " +
                                 std::to_string(values.size()),
                             line_no);
        ++raw.lines_read;
        left_ids.push_back(values[0]);
        (raw.bipartite ? right_ids : left_ids).push_back(values[1]);
        if (!raw.bipartite && values[0] == values[1]) {
            ++raw.self_loops_dropped;
            continue;
        }
        pairs.emplace_back(values[0], values[1]);
    }

    raw.node_ids = dense_ids(std::move(left_ids));
    if (raw.bipartite) raw.topic_ids = dense_ids(std::move(right_ids));
    const auto& right_space = raw.bipartite ? raw.topic_ids : raw.node_ids;

    std::unordered_set<std::uint64_t> seen;
    seen.reserve(pairs.size() * 2);
    for (auto [a, b] : pairs) {
        std::uint32_t ia = index_of(raw.node_ids, a);
        std::uint32_t ib = index_of(right_space, b);
        std::uint32_t ka = ia, kb = ib;
        if (!raw.bipartite && !raw.directed && ka > kb) std::swap(ka, kb);
        if (!seen.insert((std::uint64_t{ka} << 32) | kb).second) {
            ++raw.duplicates_dropped;
            continue;
        }
        raw.edges.emplace_back(ia, ib);
    }
    if (raw.edges.empty()) throw EmptyGraphError("edge list has no usable edges");
    return raw;
}

RawGraph load_edge_list_file(const std::filesystem::path& path, LoadOptions options) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open " + path.string());
    if (options.source_path.empty()) options.source_path = path.string();
    return load_edge_list(in, options);
}

void write_edge_list(std::ostream& os, const RawGraph& raw) {
    if (raw.bipartite) os << "BIPARTITE\n";
    const auto& right = raw.bipartite ? raw.topic_ids : raw.node_ids;
    for (auto [a, b] : raw.edges) os << raw.node_ids[a] << ' ' << right[b] << '\n';
}

const char* strategy_name(BipartizeStrategy::Kind k) noexcept {
    switch (k) {
    case BipartizeStrategy::Kind::DirectBipartite:
        return "DirectBipartite";
    case BipartizeStrategy::Kind::DoubleCover:
        return "DoubleCover";
    case BipartizeStrategy::Kind::RandomSplit:
        return "RandomSplit";
    }
    return "?";
}

BipartizeStrategy::Kind parse_strategy_kind(const std::string& name) {
    for (auto k : {BipartizeStrategy::Kind::DirectBipartite, BipartizeStrategy::Kind::DoubleCover,
                   BipartizeStrategy::Kind::RandomSplit})
        if (name == strategy_name(k)) return k;
    throw ParameterError("unknown bipartize strategy: " + name);
}

void BipartizeStrategy::validate() const {
    if (kind == Kind::RandomSplit && !(split_fraction > 0.0 && split_fraction < 1.0))
        throw ParameterError("split_fraction must lie in (0, 1)");
}

BipartizeResult bipartize(const RawGraph& raw, const BipartizeStrategy& strategy) {
    strategy.validate();
    if (raw.edges.empty()) throw EmptyGraphError("cannot bipartize an empty graph");
    BipartizeResult out;
    auto link = [&](std::uint32_t u, std::uint32_t t) {
        if (!out.graph.add_edge(user(u), topic(t))) ++out.merged_edges;
    };

    switch (strategy.kind) {
    case BipartizeStrategy::Kind::DirectBipartite:
        if (!raw.bipartite) throw BipartizeError("DirectBipartite needs a BIPARTITE input");
        out.graph = BipartiteGraph(raw.node_ids.size(), raw.topic_ids.size());
        out.user_ids = raw.node_ids;
        out.topic_ids = raw.topic_ids;
        for (auto [u, t] : raw.edges) link(u, t);
        break;
    case BipartizeStrategy::Kind::DoubleCover:
        if (raw.bipartite) throw BipartizeError("DoubleCover applies to unipartite inputs");
        out.graph = BipartiteGraph(raw.node_ids.size(), raw.node_ids.size());
        out.user_ids = out.topic_ids = raw.node_ids;
        for (auto [a, b] : raw.edges) {
            link(a, b);
            if (!raw.directed) link(b, a);
        }
        break;
    case BipartizeStrategy::Kind::RandomSplit: {
        if (raw.bipartite) throw BipartizeError("RandomSplit applies to unipartite inputs");
        Rng rng(mix_seed(strategy.seed, kRandomSplitStream));
        std::vector<std::uint32_t> slot(raw.node_ids.size());
        std::vector<char> is_user(raw.node_ids.size());
        for (std::size_t i = 0; i < raw.node_ids.size(); ++i) {
            is_user[i] = rng.uniform() < strategy.split_fraction;
            auto& ids = is_user[i] ? out.user_ids : out.topic_ids;
            slot[i] = static_cast<std::uint32_t>(ids.size());
            ids.push_back(raw.node_ids[i]);
        }
        if (out.user_ids.empty() || out.topic_ids.empty())
            throw BipartizeError("RandomSplit left one side empty");
        out.graph = BipartiteGraph(out.user_ids.size(), out.topic_ids.size());
        for (auto [a, b] : raw.edges) {
            if (is_user[a] == is_user[b]) {
                ++out.dropped_edges;
                continue;
            }
            if (is_user[a])
                link(slot[a], slot[b]);
            else
                link(slot[b], slot[a]);
        }
        break;
    }
    }
    if (out.graph.user_count() == 0 || out.graph.topic_count() == 0)
        throw BipartizeError("bipartize produced an empty side");
    return out;
}

SeedResult seed_from_dataset(const RawGraph& raw, const BipartizeStrategy& strategy, std::uint32_t c_u,
                             std::uint32_t c_t) {
    SeedResult out;
    out.bipartite = bipartize(raw, strategy);
    Rng rng(mix_seed(strategy.seed, kTopUpStream));
    out.topped_up_edges = top_up_min_degrees(out.bipartite.graph, c_u, c_t, rng);
    return out;
}

std::string provenance_json(const RawGraph& raw, const BipartizeStrategy& strategy, const SeedResult& seed) {
    nlohmann::json j;
    j["source_path"] = raw.source_path;
    j["directed"] = raw.directed;
    j["bipartite_input"] = raw.bipartite;
    j["raw_nodes"] = raw.node_count();
    j["raw_edges"] = raw.edges.size();
    j["self_loops_dropped"] = raw.self_loops_dropped;
    j["duplicates_dropped"] = raw.duplicates_dropped;
    j["strategy"] = strategy_name(strategy.kind);
    j["split_fraction"] = strategy.split_fraction;
    j["seed"] = strategy.seed;
    j["users"] = seed.bipartite.graph.user_count();
    j["topics"] = seed.bipartite.graph.topic_count();
    j["edges"] = seed.bipartite.graph.edge_count();
    j["dropped_edges"] = seed.bipartite.dropped_edges;
    j["merged_edges"] = seed.bipartite.merged_edges;
    j["topped_up_edges"] = seed.topped_up_edges;
    return j.dump(2);
}

void write_bipartite(std::ostream& os, const BipartiteGraph& graph) {
    os << "BIPARTITE\n";
    for (std::uint32_t u = 0; u < graph.user_count(); ++u)
        for (std::uint32_t t : graph.neighbors(user(u))) os << u << ' ' << t << '\n';
}

BipartiteGraph load_bipartite_file(const std::filesystem::path& path) {
    RawGraph raw = load_edge_list_file(path);
    if (!raw.bipartite) throw BipartizeError(path.string() + " is not a BIPARTITE graph file");
    return bipartize(raw, {BipartizeStrategy::Kind::DirectBipartite, 0.5, 0}).graph;
}

}  // namespace searchnet
