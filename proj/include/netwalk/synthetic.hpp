#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "netwalk/graph.hpp"

namespace netwalk {

// Degree-corrected stochastic blockmodel. theta is normalized to sum to 1
// within each block; omega holds expected edge weights between blocks.
struct DcSbmSpec {
    std::vector<int> block_of;                // node -> block, K blocks
    std::vector<std::vector<double>> omega;   // K x K, symmetric, nonnegative
    std::vector<double> theta;                // per node, positive

    int num_blocks() const;
    void validate() const;
    // Normalizes theta to sum to 1 per block.
    void normalize();

    static DcSbmSpec from_json_file(const std::string& path);
    void to_json_file(const std::string& path) const;
};

struct DcSbmSample {
    Graph graph;
    // Bernoulli probability per unordered pair, stored dense row-major with
    // zero diagonal: probs[u * n + v].
    std::vector<double> probs;
};

// Each unordered pair {u,v} is an edge independently with probability
// min(1, theta_u * theta_v * omega[b(u)][b(v)]).
DcSbmSample sample_dcsbm(const DcSbmSpec& spec, std::uint64_t seed);

// Degree-preserving rewiring: a uniform keep_frac share of edges is kept
// verbatim, the remaining stubs are rematched uniformly, and self-loops or
// duplicate edges are repaired by degree-preserving edge swaps.
Graph configuration_model(const Graph& g, double keep_frac, std::uint64_t seed);

}  // namespace netwalk
