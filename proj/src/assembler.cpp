#include "netwalk/assembler.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <stdexcept>

#include "netwalk/rng.hpp"

namespace netwalk {

void ScoreMatrix::add(NodeId i, NodeId j, double w) {
    if (i < 0 || j < 0 || i >= n_ || j >= n_)
        throw std::out_of_range("ScoreMatrix::add: index out of range");
    entries_[key(i, j)] += w;
}

double ScoreMatrix::get(NodeId i, NodeId j) const {
    auto it = entries_.find(static_cast<std::int64_t>(i) * n_ + j);
    return it == entries_.end() ? 0.0 : it->second;
}

double ScoreMatrix::total() const {
    double t = 0.0;
    for (const auto& [k, v] : entries_) t += v;
    return t;
}

void ScoreMatrix::merge(const ScoreMatrix& other) {
    if (other.n_ != n_) throw std::invalid_argument("ScoreMatrix::merge: size mismatch");
    for (const auto& [k, v] : other.entries_) entries_[k] += v;
}

ScoreMatrix symmetrize(const ScoreMatrix& s) {
    ScoreMatrix out(s.n());
    for (const auto& [k, v] : s.entries()) {
        NodeId i = static_cast<NodeId>(k / s.n());
        NodeId j = static_cast<NodeId>(k % s.n());
        if (i == j) continue;
        NodeId a = std::min(i, j), b = std::max(i, j);
        if (out.get(a, b) > 0) continue;  // pair already emitted
        double m = std::max(s.get(a, b), s.get(b, a));
        if (m > 0) {
            out.add(a, b, m);
            out.add(b, a, m);
        }
    }
    return out;
}

namespace {

struct PairWeights {
    std::vector<Edge> pairs;       // i < j, sorted
    std::vector<double> cumsum;    // cumulative weights over pairs
    double total = 0.0;
};

PairWeights collect_pairs(const ScoreMatrix& s) {
    PairWeights pw;
    std::vector<std::pair<Edge, double>> items;
    for (const auto& [k, v] : s.entries()) {
        NodeId i = static_cast<NodeId>(k / s.n());
        NodeId j = static_cast<NodeId>(k % s.n());
        if (i < j && v > 0) items.push_back({{i, j}, v});
    }
    std::sort(items.begin(), items.end());
    pw.pairs.reserve(items.size());
    pw.cumsum.reserve(items.size());
    double acc = 0.0;
    for (const auto& [e, w] : items) {
        pw.pairs.push_back(e);
        acc += w;
        pw.cumsum.push_back(acc);
    }
    pw.total = acc;
    return pw;
}

}  // namespace

Graph assemble_graph(const ScoreMatrix& s, std::int64_t target_m, std::uint64_t seed) {
    NodeId n = s.n();
    if (n <= 0) throw std::invalid_argument("assemble_graph: empty score matrix");
    if (target_m < (n + 1) / 2)
        throw std::invalid_argument("assemble_graph: target_m too small to give every node an edge");

    // per-row positive entries and row sums (symmetrized input expected)
    std::vector<std::vector<std::pair<NodeId, double>>> rows(static_cast<std::size_t>(n));
    for (const auto& [k, v] : s.entries()) {
        if (v <= 0) continue;
        NodeId i = static_cast<NodeId>(k / n);
        NodeId j = static_cast<NodeId>(k % n);
        if (i != j) rows[static_cast<std::size_t>(i)].push_back({j, v});
    }
    for (auto& row : rows) std::sort(row.begin(), row.end());
    for (NodeId i = 0; i < n; ++i)
        if (rows[static_cast<std::size_t>(i)].empty())
            throw std::runtime_error("assemble_graph: node " + std::to_string(i) +
                                     " has no positive scores; cannot guarantee degree >= 1");

    Rng rng(seed);
    std::set<std::pair<NodeId, NodeId>> chosen;
    auto insert_edge = [&](NodeId a, NodeId b) {
        auto key = std::minmax(a, b);
        return chosen.insert({key.first, key.second}).second;
    };

    // stage one: every node draws a neighbor from its own row distribution;
    // an already-present draw is retried (bounded — a collision implies the
    // node is covered already)
    for (NodeId i = 0; i < n; ++i) {
        const auto& row = rows[static_cast<std::size_t>(i)];
        double row_total = 0.0;
        for (const auto& [j, w] : row) row_total += w;
        for (int attempt = 0; attempt < 1000; ++attempt) {
            double u = rng.uniform01() * row_total;
            double acc = 0.0;
            NodeId pick = row.back().first;
            for (const auto& [j, w] : row) {
                acc += w;
                if (u < acc) {
                    pick = j;
                    break;
                }
            }
            if (insert_edge(i, pick)) break;
            if (static_cast<std::int64_t>(chosen.size()) >= target_m) break;
        }
    }

    if (static_cast<std::int64_t>(chosen.size()) > target_m)
        throw std::runtime_error("assemble_graph: target_m below the minimum-degree stage output");

    // stage two: global sampling without replacement until target_m edges
    PairWeights pw = collect_pairs(s);
    if (static_cast<std::int64_t>(pw.pairs.size()) < target_m)
        throw std::runtime_error("assemble_graph: target_m exceeds the number of positive-score pairs");
    while (static_cast<std::int64_t>(chosen.size()) < target_m) {
        double u = rng.uniform01() * pw.total;
        std::size_t idx = static_cast<std::size_t>(
            std::lower_bound(pw.cumsum.begin(), pw.cumsum.end(), u) - pw.cumsum.begin());
        if (idx >= pw.pairs.size()) idx = pw.pairs.size() - 1;
        insert_edge(pw.pairs[idx].first, pw.pairs[idx].second);
    }

    std::vector<Edge> edges(chosen.begin(), chosen.end());
    return Graph::from_edges(n, edges);
}

std::vector<double> scores_for_pairs(const ScoreMatrix& s, const std::vector<Edge>& pairs) {
    std::vector<double> out;
    out.reserve(pairs.size());
    for (const auto& [u, v] : pairs) {
        if (u < 0 || v < 0 || u >= s.n() || v >= s.n())
            throw std::out_of_range("scores_for_pairs: index out of range");
        out.push_back(std::max(s.get(u, v), s.get(v, u)));
    }
    return out;
}

void save_scores(const ScoreMatrix& s, const std::string& path) {
    std::vector<std::pair<std::int64_t, double>> items(s.entries().begin(), s.entries().end());
    std::sort(items.begin(), items.end());
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write scores: " + path);
    out.precision(17);
    for (const auto& [k, v] : items)
        out << k / s.n() << ' ' << k % s.n() << ' ' << v << '\n';
}

ScoreMatrix load_scores(const std::string& path, NodeId n) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open scores: " + path);
    ScoreMatrix s(n);
    NodeId i, j;
    double v;
    while (in >> i >> j >> v) s.add(i, j, v);
    return s;
}

}  // namespace netwalk
