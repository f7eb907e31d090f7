#include "netwalk/evaluator.hpp"

#include <cmath>

#include "doctest.h"
#include "netwalk/rng.hpp"
#include "test_helpers.hpp"

using namespace netwalk;

TEST_CASE("roc_auc hand-derived example") {
    // positives {0.9, 0.4}, negatives {0.6, 0.1}: 3 of 4 ordered pairs correct
    LabeledScores ls{{0.9, 0.4, 0.6, 0.1}, {1, 1, 0, 0}};
    CHECK(roc_auc(ls) == doctest::Approx(0.75).epsilon(1e-12));
}

TEST_CASE("roc_auc edge cases") {
    LabeledScores separated{{5, 4, 1, 0}, {1, 1, 0, 0}};
    CHECK(roc_auc(separated) == doctest::Approx(1.0).epsilon(1e-12));
    LabeledScores ties{{2, 2, 2, 2}, {1, 0, 1, 0}};
    CHECK(roc_auc(ties) == doctest::Approx(0.5).epsilon(1e-12));
    LabeledScores single{{1, 2}, {1, 1}};
    CHECK_THROWS_AS(roc_auc(single), std::invalid_argument);
}

TEST_CASE("auc is invariant under strictly increasing transforms") {
    Rng rng(5);
    LabeledScores ls;
    for (int i = 0; i < 200; ++i) {
        ls.scores.push_back(rng.uniform());
        ls.labels.push_back(static_cast<int>(rng.uniform_int(2)));
    }
    ls.labels[0] = 1;
    ls.labels[1] = 0;
    double base = roc_auc(ls);
    LabeledScores warped = ls;
    for (double& s : warped.scores) s = std::exp(3.0 * s) + 1.0;
    CHECK(roc_auc(warped) == doctest::Approx(base).epsilon(1e-12));
}

TEST_CASE("average_precision hand-derived example") {
    // ranks: 0.9(+) -> p=1, 0.4(+) at rank 3 -> 2/3; AP = (1 + 2/3)/2
    LabeledScores ls{{0.9, 0.6, 0.4, 0.1}, {1, 0, 1, 0}};
    CHECK(average_precision(ls) == doctest::Approx(5.0 / 6.0).epsilon(1e-12));
}

TEST_CASE("average_precision edge cases") {
    LabeledScores perfect{{9, 8, 7, 2, 1}, {1, 1, 1, 0, 0}};
    CHECK(average_precision(perfect) == doctest::Approx(1.0).epsilon(1e-12));
    LabeledScores last{{5, 4, 3, 2, 0}, {0, 0, 0, 0, 1}};
    CHECK(average_precision(last) == doctest::Approx(1.0 / 5.0).epsilon(1e-12));
}

TEST_CASE("average_precision approaches the positive rate under random scores") {
    Rng rng(17);
    const int n = 400, pos = 100;
    double acc = 0.0;
    const int shuffles = 1000;
    for (int s = 0; s < shuffles; ++s) {
        LabeledScores ls;
        for (int i = 0; i < n; ++i) {
            ls.scores.push_back(rng.uniform());
            ls.labels.push_back(i < pos ? 1 : 0);
        }
        acc += average_precision(ls);
    }
    CHECK(std::abs(acc / shuffles - static_cast<double>(pos) / n) < 0.02);
}

TEST_CASE("adamic_adar") {
    SUBCASE("single common neighbor of degree 2") {
        Graph g = Graph::from_edges(3, {{0, 1}, {1, 2}});
        auto s = adamic_adar(g, {{0, 2}});
        CHECK(s[0] == doctest::Approx(1.0 / std::log(2.0)).epsilon(1e-12));
    }
    SUBCASE("no common neighbors") {
        Graph g = Graph::from_edges(4, {{0, 1}, {2, 3}});
        auto s = adamic_adar(g, {{0, 2}});
        CHECK(s[0] == 0.0);
    }
    SUBCASE("two common neighbors of degrees 2 and 3") {
        // u=0, v=1; common neighbors 2 (degree 2) and 3 (degree 3)
        Graph g = Graph::from_edges(5, {{0, 2}, {1, 2}, {0, 3}, {1, 3}, {3, 4}});
        auto s = adamic_adar(g, {{0, 1}});
        CHECK(s[0] == doctest::Approx(1.0 / std::log(2.0) + 1.0 / std::log(3.0)).epsilon(1e-12));
    }
    SUBCASE("symmetric in the pair") {
        Graph g = testutil::erdos_renyi(20, 0.3, 9);
        auto a = adamic_adar(g, {{3, 11}});
        auto b = adamic_adar(g, {{11, 3}});
        CHECK(a[0] == b[0]);
    }
}

TEST_CASE("evaluate_link_prediction oracle and constant scorers") {
    Graph g = testutil::erdos_renyi(30, 0.3, 23);
    auto lcc = largest_connected_component(g);
    auto split = split_edges(lcc.graph, 0.15, 0.1, 3);

    auto oracle = [&](Edge e) { return lcc.graph.has_edge(e.first, e.second) ? 1.0 : 0.0; };
    auto [auc, ap] = evaluate_link_prediction(oracle, split, false);
    CHECK(auc == doctest::Approx(1.0));
    CHECK(ap == doctest::Approx(1.0));

    auto constant = [](Edge) { return 0.5; };
    auto [auc2, ap2] = evaluate_link_prediction(constant, split, true);
    CHECK(auc2 == doctest::Approx(0.5));

    EdgeSplit empty;
    CHECK_THROWS_AS(evaluate_link_prediction(constant, empty, false), std::invalid_argument);
}

TEST_CASE("rank_correlation") {
    std::vector<double> a{1, 2, 3};
    CHECK(rank_correlation(a, a) == doctest::Approx(1.0).epsilon(1e-12));
    std::vector<double> rev{3, 2, 1};
    CHECK(rank_correlation(a, rev) == doctest::Approx(-1.0).epsilon(1e-12));
    std::vector<double> b{1, 3, 2};
    CHECK(rank_correlation(a, b) == doctest::Approx(0.5).epsilon(1e-12));
    std::vector<double> flat{2, 2, 2};
    CHECK_THROWS_AS(rank_correlation(a, flat), std::invalid_argument);
    CHECK_THROWS_AS(rank_correlation({1, 2}, {2, 1}), std::invalid_argument);
}
