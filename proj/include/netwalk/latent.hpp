#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "netwalk/graph.hpp"
#include "netwalk/graphstats.hpp"
#include "netwalk/model.hpp"

namespace netwalk {

// Standard normal CDF (via erf) and its inverse (rational approximation
// polished by Halley steps, accurate to machine precision).
double std_normal_cdf(double x);
double std_normal_quantile(double p);

// Equal-probability-mass grid over the latent space: per dimension B bins
// delimited by the quantiles Phi^-1(k/B), outer boundaries +/- infinity.
struct LatentGrid {
    int dims = 2;
    int bins_per_dim = 20;

    LatentGrid(int dims_, int bins_per_dim_);

    double lower(int bin) const;  // -inf for bin 0
    double upper(int bin) const;  // +inf for the last bin

private:
    std::vector<double> boundaries_;  // B+1 values
};

// Inverse-CDF stratified sampling: coordinate k drawn as Phi^-1(U) with U
// uniform on [bin/B, (bin+1)/B).
std::vector<std::vector<double>> sample_in_bin(const LatentGrid& grid,
                                               const std::vector<int>& bin, int count, Rng& rng);

// The B bins along `axis` with the other coordinate fixed, in boundary order.
std::vector<std::vector<int>> trajectory(const LatentGrid& grid, int axis, int fixed);

// Per-bin walk and graph metrics (one row per bin). Metric values are NaN
// when undefined (e.g. bin graph not assemblable).
struct BinRecord {
    std::vector<int> bin;
    std::map<std::string, double> metrics;
};

std::vector<BinRecord> bin_properties(const Checkpoint& ckpt, const LatentGrid& grid,
                                      const Graph& train, const EdgeSplit* split,
                                      const CommunityAssignment* comm, int walks_per_bin,
                                      std::uint64_t seed);

// One CSV per metric: bin_i,bin_j,metric,value rows.
void write_bin_csvs(const std::vector<BinRecord>& records, const std::string& out_dir);

}  // namespace netwalk
