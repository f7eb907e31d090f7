#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "netwalk/graph.hpp"

namespace netwalk {

struct CommunityAssignment {
    std::vector<int> label_of;  // node -> community in [0, K)
    int num_communities() const;
};

CommunityAssignment load_communities(const std::string& path, NodeId n);

// Topology statistics report. Optional fields are undefined for degenerate
// inputs (e.g. assortativity on regular graphs) rather than NaN.
struct StatsReport {
    std::int64_t max_degree = 0;
    std::optional<double> assortativity;
    std::int64_t triangle_count = 0;
    std::optional<double> power_law_exp;
    std::optional<double> inter_comm_density;
    std::optional<double> intra_comm_density;
    std::optional<double> clustering_coeff;  // global: 3*triangles/wedges
    std::optional<double> char_path_len;     // mean shortest path on the LCC
    std::int64_t wedge_count = 0;
    double rel_edge_entropy = 0.0;
    std::int64_t lcc_size = 0;
    std::int64_t claw_count = 0;
    double gini = 0.0;
    std::vector<double> community_distribution;  // empty without communities

    std::string to_json() const;
    static StatsReport from_json(const std::string& text);
};

StatsReport compute_stats(const Graph& g, const CommunityAssignment* comm = nullptr);

// Candidates ranked per statistic by absolute deviation from the reference
// (rank 1 = closest, ties share the average rank); statistics undefined for
// any participant are excluded for all.
struct RankingTable {
    std::vector<std::string> stat_names;
    std::vector<std::vector<double>> ranks;  // [candidate][stat]
    std::vector<double> mean_rank;           // per candidate
};

RankingTable compare_reports(const StatsReport& reference,
                             const std::vector<StatsReport>& candidates);

// CSV with Table-style column order; one row per report.
void write_comparison_csv(const StatsReport& reference,
                          const std::vector<std::string>& candidate_names,
                          const std::vector<StatsReport>& candidates, const std::string& path);

}  // namespace netwalk
