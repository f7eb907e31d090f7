#pragma once

#include <cstdint>
#include <string>
#include <unordered_map>
#include <vector>

#include "netwalk/graph.hpp"

namespace netwalk {

// Sparse nonnegative transition-count matrix over node pairs.
class ScoreMatrix {
public:
    ScoreMatrix() = default;
    explicit ScoreMatrix(NodeId n) : n_(n) {}

    NodeId n() const { return n_; }
    void add(NodeId i, NodeId j, double w = 1.0);
    double get(NodeId i, NodeId j) const;
    double total() const;
    std::size_t nnz() const { return entries_.size(); }

    void merge(const ScoreMatrix& other);

    const std::unordered_map<std::int64_t, double>& entries() const { return entries_; }
    std::int64_t key(NodeId i, NodeId j) const {
        return static_cast<std::int64_t>(i) * n_ + j;
    }

private:
    NodeId n_ = 0;
    std::unordered_map<std::int64_t, double> entries_;
};

// s'_ij = s'_ji = max(s_ij, s_ji); diagonal dropped.
ScoreMatrix symmetrize(const ScoreMatrix& s);

// Binarization per the two-stage sampling scheme: every node first draws one
// neighbor from its row distribution, then edges are drawn without
// replacement from the global distribution until target_m edges exist.
// Requires a symmetric score matrix with a positive entry in every row.
Graph assemble_graph(const ScoreMatrix& s, std::int64_t target_m, std::uint64_t seed);

// Symmetrized score per queried pair (0 when absent).
std::vector<double> scores_for_pairs(const ScoreMatrix& s, const std::vector<Edge>& pairs);

// Text persistence: "i j count" rows sorted by (i, j).
void save_scores(const ScoreMatrix& s, const std::string& path);
ScoreMatrix load_scores(const std::string& path, NodeId n);

}  // namespace netwalk
