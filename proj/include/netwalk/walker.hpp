#pragma once

#include <cstdint>
#include <vector>

#include "netwalk/assembler.hpp"
#include "netwalk/graph.hpp"

namespace netwalk {

// Second-order biased walk parameters: return parameter p, in-out parameter q.
struct WalkConfig {
    int walk_len = 16;
    double p = 1.0;
    double q = 1.0;
    int batch_size = 128;
};

struct WalkBatch {
    std::vector<std::vector<NodeId>> walks;  // batch_size x walk_len
};

// Samples batch_size walks. Start nodes uniform over nodes, first step
// uniform over neighbors, later steps weighted 1/p toward the previous node,
// 1 toward its neighbors, 1/q otherwise, normalized over neighbors of the
// current node. Requires a connected graph with at least 2 nodes.
WalkBatch sample_walks(const Graph& g, const WalkConfig& cfg, std::uint64_t seed);

// Exact next-step law from state (prev, cur), indexed like neighbors(cur).
std::vector<double> step_distribution(const Graph& g, NodeId prev, NodeId cur, double p, double q);

// Directed transition counts; no symmetrization.
ScoreMatrix transition_counts(const WalkBatch& walks, NodeId n);

}  // namespace netwalk
