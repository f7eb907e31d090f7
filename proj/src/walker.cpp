#include "netwalk/walker.hpp"

#include <stdexcept>

#include "netwalk/rng.hpp"

namespace netwalk {

namespace {

void validate(const Graph& g, const WalkConfig& cfg) {
    if (cfg.walk_len < 2) throw std::invalid_argument("walk_len must be >= 2");
    if (cfg.p <= 0 || cfg.q <= 0) throw std::invalid_argument("p and q must be positive");
    if (cfg.batch_size < 1) throw std::invalid_argument("batch_size must be >= 1");
    if (g.num_nodes() < 2 || !g.is_connected())
        throw std::invalid_argument("sample_walks requires a connected graph with >= 2 nodes");
}

}  // namespace

std::vector<double> step_distribution(const Graph& g, NodeId prev, NodeId cur, double p, double q) {
    const auto& nbrs = g.neighbors(cur);
    std::vector<double> w(nbrs.size());
    double total = 0.0;
    for (std::size_t k = 0; k < nbrs.size(); ++k) {
        NodeId x = nbrs[k];
        double weight;
        if (x == prev)
            weight = 1.0 / p;
        else if (g.has_edge(prev, x))
            weight = 1.0;
        else
            weight = 1.0 / q;
        w[k] = weight;
        total += weight;
    }
    for (double& v : w) v /= total;
    return w;
}

WalkBatch sample_walks(const Graph& g, const WalkConfig& cfg, std::uint64_t seed) {
    validate(g, cfg);
    Rng rng(seed);
    const double inv_p = 1.0 / cfg.p;
    const double inv_q = 1.0 / cfg.q;

    WalkBatch batch;
    batch.walks.assign(static_cast<std::size_t>(cfg.batch_size), {});
    for (auto& walk : batch.walks) {
        walk.resize(static_cast<std::size_t>(cfg.walk_len));
        NodeId start = static_cast<NodeId>(rng.uniform_int(static_cast<std::uint64_t>(g.num_nodes())));
        walk[0] = start;
        const auto& first_nbrs = g.neighbors(start);
        if (first_nbrs.empty()) throw std::logic_error("sample_walks: degree-0 node encountered");
        walk[1] = first_nbrs[rng.uniform_int(first_nbrs.size())];
        for (int t = 2; t < cfg.walk_len; ++t) {
            NodeId prev = walk[static_cast<std::size_t>(t - 2)];
            NodeId cur = walk[static_cast<std::size_t>(t - 1)];
            const auto& nbrs = g.neighbors(cur);
            if (nbrs.empty()) throw std::logic_error("sample_walks: degree-0 node encountered");
            double total = 0.0;
            // first pass: total weight; second pass: CDF inversion
            for (NodeId x : nbrs)
                total += (x == prev) ? inv_p : (g.has_edge(prev, x) ? 1.0 : inv_q);
            double u = rng.uniform01() * total;
            double acc = 0.0;
            NodeId pick = nbrs.back();
            for (NodeId x : nbrs) {
                acc += (x == prev) ? inv_p : (g.has_edge(prev, x) ? 1.0 : inv_q);
                if (u < acc) {
                    pick = x;
                    break;
                }
            }
            walk[static_cast<std::size_t>(t)] = pick;
        }
    }
    return batch;
}

ScoreMatrix transition_counts(const WalkBatch& walks, NodeId n) {
    ScoreMatrix s(n);
    for (const auto& walk : walks.walks)
        for (std::size_t t = 0; t + 1 < walk.size(); ++t) {
            if (walk[t] >= n || walk[t + 1] >= n)
                throw std::out_of_range("transition_counts: node index >= n");
            s.add(walk[t], walk[t + 1]);
        }
    return s;
}

}  // namespace netwalk
