#pragma once

#include <functional>
#include <utility>
#include <vector>

#include "netwalk/graph.hpp"

namespace netwalk {

struct LabeledScores {
    std::vector<double> scores;
    std::vector<int> labels;  // 1 = held-out edge, 0 = held-out nonedge
};

// Mann-Whitney form: P(random positive outscores random negative), ties 1/2.
double roc_auc(const LabeledScores& ls);

// Mean precision at the rank of each positive, scores descending; ties keep
// input order (stable sort).
double average_precision(const LabeledScores& ls);

// sum over common neighbors w of 1 / ln(degree(w)).
std::vector<double> adamic_adar(const Graph& g, const std::vector<Edge>& pairs);

// Scores the held-out edges and nonedges of one side of the split.
std::pair<double, double> evaluate_link_prediction(
    const std::function<double(Edge)>& score_fn, const EdgeSplit& split, bool use_test);

// Spearman rho with average ranks for ties.
double rank_correlation(const std::vector<double>& a, const std::vector<double>& b);

}  // namespace netwalk
