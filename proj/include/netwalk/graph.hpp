#pragma once

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace netwalk {

using NodeId = std::int32_t;
using Edge = std::pair<NodeId, NodeId>;

// Undirected simple graph stored as sorted adjacency lists. Immutable after
// construction; safe to share read-only across threads.
class Graph {
public:
    Graph() = default;
    explicit Graph(NodeId n) : adj_(static_cast<std::size_t>(n)) {}

    // Builds a simple graph from an edge list: symmetrizes, drops self-loops,
    // merges duplicates. Indices must lie in [0, n).
    static Graph from_edges(NodeId n, const std::vector<Edge>& edges);

    NodeId num_nodes() const { return static_cast<NodeId>(adj_.size()); }
    std::int64_t num_edges() const { return m_; }

    const std::vector<NodeId>& neighbors(NodeId u) const { return adj_[static_cast<std::size_t>(u)]; }
    NodeId degree(NodeId u) const { return static_cast<NodeId>(adj_[static_cast<std::size_t>(u)].size()); }
    bool has_edge(NodeId u, NodeId v) const;

    // All undirected edges as (u, v) with u < v, sorted.
    std::vector<Edge> edges() const;

    std::vector<NodeId> degrees() const;
    bool is_connected() const;

private:
    std::vector<std::vector<NodeId>> adj_;
    std::int64_t m_ = 0;
};

// Edge-list ingestion result: node ids in the file may be arbitrary
// nonnegative integers and are relabeled densely; original_ids[v] is the id
// the file used for dense node v.
struct LoadedGraph {
    Graph graph;
    std::vector<std::int64_t> original_ids;
};

// Reads "u<TAB>v" (or space-separated) lines. Throws on parse failure with
// the offending line number, and on empty input.
LoadedGraph load_edge_list(const std::string& path);

void save_edge_list(const Graph& g, const std::string& path);

struct LccResult {
    Graph graph;
    std::vector<NodeId> old_to_new;  // -1 for nodes outside the component
    std::vector<NodeId> new_to_old;
};

// Node-induced subgraph of the largest connected component, relabeled densely.
LccResult largest_connected_component(const Graph& g);

// Connectivity-preserving holdout split. val/test nonedges are sampled
// uniformly from pairs absent in the original graph.
struct EdgeSplit {
    Graph train;
    std::vector<Edge> val_edges;
    std::vector<Edge> test_edges;
    std::vector<Edge> val_nonedges;
    std::vector<Edge> test_nonedges;
    std::uint64_t seed = 0;
};

EdgeSplit split_edges(const Graph& g, double val_frac, double test_frac, std::uint64_t seed);

// |E(reference) ∩ E(candidate)| / |E(reference)|.
double edge_overlap(const Graph& reference, const Graph& candidate);

void save_split(const EdgeSplit& split, const std::string& path);
// Rebuilds the split against the graph it was made from.
EdgeSplit load_split(const Graph& original, const std::string& path);

}  // namespace netwalk
