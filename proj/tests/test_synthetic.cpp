#include "netwalk/synthetic.hpp"

#include <cmath>
#include <numeric>

#include "doctest.h"
#include "netwalk/graph.hpp"
#include "test_helpers.hpp"

using namespace netwalk;

namespace {

DcSbmSpec uniform_single_block(int n, double omega) {
    DcSbmSpec spec;
    spec.block_of.assign(static_cast<std::size_t>(n), 0);
    spec.omega = {{omega}};
    spec.theta.assign(static_cast<std::size_t>(n), 1.0);
    spec.normalize();
    return spec;
}

DcSbmSpec two_block(int n_per, double win, double wout) {
    DcSbmSpec spec;
    for (int b = 0; b < 2; ++b)
        for (int i = 0; i < n_per; ++i) spec.block_of.push_back(b);
    spec.omega = {{win, wout}, {wout, win}};
    spec.theta.assign(static_cast<std::size_t>(2 * n_per), 1.0);
    spec.normalize();
    return spec;
}

}  // namespace

TEST_CASE("uniform single-block DC-SBM is Erdos-Renyi: density within 3 sigma") {
    // theta uniform, one block: p_uv = omega / n^2 for every pair
    const int n = 40;
    const double omega = 300.0;
    DcSbmSpec spec = uniform_single_block(n, omega);
    double pair_p = omega / (static_cast<double>(n) * n);
    std::int64_t pairs_per_graph = static_cast<std::int64_t>(n) * (n - 1) / 2;

    std::int64_t total_edges = 0;
    const int seeds = 100;
    for (int s = 0; s < seeds; ++s) {
        auto sample = sample_dcsbm(spec, 1000 + static_cast<std::uint64_t>(s));
        total_edges += sample.graph.num_edges();
        CHECK(sample.probs[1] == doctest::Approx(pair_p));
    }
    double trials = static_cast<double>(pairs_per_graph) * seeds;
    double expected = trials * pair_p;
    double sigma = std::sqrt(trials * pair_p * (1 - pair_p));
    CHECK(std::abs(static_cast<double>(total_edges) - expected) < 3 * sigma);
}

TEST_CASE("diagonal-dominant two-block model separates densities") {
    DcSbmSpec spec = two_block(30, 400.0, 40.0);
    auto sample = sample_dcsbm(spec, 5);
    std::int64_t intra = 0, inter = 0;
    for (const auto& [u, v] : sample.graph.edges())
        (spec.block_of[static_cast<std::size_t>(u)] == spec.block_of[static_cast<std::size_t>(v)] ? intra
                                                                                                  : inter)++;
    // intra pairs: 2 * C(30,2) = 870, inter pairs: 900
    double intra_density = static_cast<double>(intra) / 870.0;
    double inter_density = static_cast<double>(inter) / 900.0;
    CHECK(intra_density > inter_density);
}

TEST_CASE("probability matrix is symmetric with zero diagonal") {
    DcSbmSpec spec = two_block(10, 120.0, 30.0);
    auto sample = sample_dcsbm(spec, 9);
    int n = 20;
    for (int u = 0; u < n; ++u) {
        CHECK(sample.probs[static_cast<std::size_t>(u) * n + u] == 0.0);
        for (int v = 0; v < n; ++v)
            CHECK(sample.probs[static_cast<std::size_t>(u) * n + v] ==
                  sample.probs[static_cast<std::size_t>(v) * n + u]);
    }
}

TEST_CASE("dcsbm spec json round trip with default theta") {
    DcSbmSpec spec = two_block(5, 50, 10);
    std::string path = "/tmp/netwalk_dcsbm_spec_test.json";
    spec.to_json_file(path);
    DcSbmSpec loaded = DcSbmSpec::from_json_file(path);
    CHECK(loaded.block_of == spec.block_of);
    CHECK(loaded.omega == spec.omega);
    for (std::size_t i = 0; i < spec.theta.size(); ++i)
        CHECK(loaded.theta[i] == doctest::Approx(spec.theta[i]));
}

TEST_CASE("configuration model with keep_frac=1 returns the input") {
    Graph g = testutil::erdos_renyi(20, 0.3, 4);
    Graph out = configuration_model(g, 1.0, 7);
    CHECK(out.edges() == g.edges());
}

TEST_CASE("configuration model on K3 with keep_frac=0 is forced back to K3") {
    Graph k3 = Graph::from_edges(3, {{0, 1}, {1, 2}, {0, 2}});
    Graph out = configuration_model(k3, 0.0, 11);
    CHECK(out.edges() == k3.edges());
}

TEST_CASE("configuration model preserves the degree sequence exactly") {
    for (std::uint64_t seed = 0; seed < 10; ++seed) {
        Graph g = testutil::erdos_renyi(30, 0.2, 100 + seed);
        for (double keep : {0.0, 0.3, 0.7}) {
            Graph out = configuration_model(g, keep, seed);
            CHECK(out.degrees() == g.degrees());
            CHECK(out.num_edges() == g.num_edges());
        }
    }
}

TEST_CASE("edge overlap is at least keep_frac") {
    Graph g = testutil::erdos_renyi(40, 0.25, 21);
    for (double keep : {0.2, 0.5, 0.9}) {
        Graph out = configuration_model(g, keep, 13);
        CHECK(edge_overlap(g, out) >= keep - 1e-12);
    }
}

TEST_CASE("moderate keep_frac lands near the requested overlap on sparse graphs") {
    // on a sparse-ish graph random rematching rarely recreates original edges
    Graph g = testutil::erdos_renyi(200, 0.03, 8);
    Graph out = configuration_model(g, 0.52, 17);
    double eo = edge_overlap(g, out);
    CHECK(eo >= 0.52 - 1e-12);
    CHECK(eo < 0.62);
}

TEST_CASE("invalid specs are rejected") {
    DcSbmSpec spec = two_block(4, 10, 2);
    spec.omega[0][1] = 5.0;  // asymmetric
    CHECK_THROWS_AS(spec.validate(), std::invalid_argument);
    DcSbmSpec spec2 = two_block(4, 10, 2);
    spec2.theta[0] = -1.0;
    CHECK_THROWS_AS(spec2.validate(), std::invalid_argument);
    Graph g = testutil::erdos_renyi(10, 0.4, 2);
    CHECK_THROWS_AS(configuration_model(g, 1.5, 0), std::invalid_argument);
}
