#include "netwalk/evaluator.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace netwalk {

namespace {

void validate(const LabeledScores& ls) {
    if (ls.scores.size() != ls.labels.size())
        throw std::invalid_argument("labeled scores: length mismatch");
    if (ls.scores.size() < 2) throw std::invalid_argument("labeled scores: need at least 2 entries");
    bool pos = false, neg = false;
    for (int l : ls.labels) (l ? pos : neg) = true;
    if (!pos || !neg) throw std::invalid_argument("labeled scores: both classes required");
}

// average ranks (1-based) with ties sharing the mean rank
std::vector<double> average_ranks(const std::vector<double>& values) {
    std::vector<std::size_t> order(values.size());
    std::iota(order.begin(), order.end(), 0);
    std::sort(order.begin(), order.end(),
              [&](std::size_t a, std::size_t b) { return values[a] < values[b]; });
    std::vector<double> rank(values.size());
    std::size_t i = 0;
    while (i < order.size()) {
        std::size_t j = i;
        while (j + 1 < order.size() && values[order[j + 1]] == values[order[i]]) ++j;
        double avg = (static_cast<double>(i) + static_cast<double>(j)) / 2.0 + 1.0;
        for (std::size_t k = i; k <= j; ++k) rank[order[k]] = avg;
        i = j + 1;
    }
    return rank;
}

}  // namespace

double roc_auc(const LabeledScores& ls) {
    validate(ls);
    auto ranks = average_ranks(ls.scores);
    double rank_sum_pos = 0.0;
    std::int64_t n_pos = 0;
    for (std::size_t i = 0; i < ls.labels.size(); ++i) {
        if (ls.labels[i]) {
            rank_sum_pos += ranks[i];
            ++n_pos;
        }
    }
    std::int64_t n_neg = static_cast<std::int64_t>(ls.labels.size()) - n_pos;
    double u = rank_sum_pos - static_cast<double>(n_pos) * (n_pos + 1) / 2.0;
    return u / (static_cast<double>(n_pos) * static_cast<double>(n_neg));
}

double average_precision(const LabeledScores& ls) {
    validate(ls);
    std::vector<std::size_t> order(ls.scores.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return ls.scores[a] > ls.scores[b]; });
    double hits = 0.0, ap = 0.0;
    for (std::size_t r = 0; r < order.size(); ++r) {
        if (ls.labels[order[r]]) {
            hits += 1.0;
            ap += hits / static_cast<double>(r + 1);
        }
    }
    return ap / hits;
}

std::vector<double> adamic_adar(const Graph& g, const std::vector<Edge>& pairs) {
    std::vector<double> out;
    out.reserve(pairs.size());
    for (const auto& [u, v] : pairs) {
        const auto& nu = g.neighbors(u);
        const auto& nv = g.neighbors(v);
        double score = 0.0;
        auto iu = nu.begin();
        auto iv = nv.begin();
        while (iu != nu.end() && iv != nv.end()) {
            if (*iu < *iv)
                ++iu;
            else if (*iv < *iu)
                ++iv;
            else {
                score += 1.0 / std::log(static_cast<double>(g.degree(*iu)));
                ++iu;
                ++iv;
            }
        }
        out.push_back(score);
    }
    return out;
}

std::pair<double, double> evaluate_link_prediction(
    const std::function<double(Edge)>& score_fn, const EdgeSplit& split, bool use_test) {
    const auto& edges = use_test ? split.test_edges : split.val_edges;
    const auto& nonedges = use_test ? split.test_nonedges : split.val_nonedges;
    if (edges.empty() || nonedges.empty())
        throw std::invalid_argument("evaluate_link_prediction: empty holdout");
    LabeledScores ls;
    for (const auto& e : edges) {
        ls.scores.push_back(score_fn(e));
        ls.labels.push_back(1);
    }
    for (const auto& e : nonedges) {
        ls.scores.push_back(score_fn(e));
        ls.labels.push_back(0);
    }
    return {roc_auc(ls), average_precision(ls)};
}

double rank_correlation(const std::vector<double>& a, const std::vector<double>& b) {
    if (a.size() != b.size()) throw std::invalid_argument("rank_correlation: length mismatch");
    if (a.size() < 3) throw std::invalid_argument("rank_correlation: need at least 3 values");
    auto ra = average_ranks(a);
    auto rb = average_ranks(b);
    double n = static_cast<double>(a.size());
    double ma = 0, mb = 0;
    for (std::size_t i = 0; i < ra.size(); ++i) {
        ma += ra[i];
        mb += rb[i];
    }
    ma /= n;
    mb /= n;
    double cov = 0, va = 0, vb = 0;
    for (std::size_t i = 0; i < ra.size(); ++i) {
        cov += (ra[i] - ma) * (rb[i] - mb);
        va += (ra[i] - ma) * (ra[i] - ma);
        vb += (rb[i] - mb) * (rb[i] - mb);
    }
    if (va <= 0 || vb <= 0) throw std::invalid_argument("rank_correlation: zero rank variance");
    return cov / std::sqrt(va * vb);
}

}  // namespace netwalk
