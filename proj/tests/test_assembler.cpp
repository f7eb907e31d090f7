#include "netwalk/assembler.hpp"

#include <cstdio>
#include <set>

#include "doctest.h"
#include "netwalk/rng.hpp"
#include "test_helpers.hpp"

using namespace netwalk;

TEST_CASE("symmetrize takes the max of both directions and drops the diagonal") {
    ScoreMatrix s(3);
    s.add(1, 2, 3);
    s.add(2, 1, 5);
    s.add(0, 0, 7);
    ScoreMatrix sym = symmetrize(s);
    CHECK(sym.get(1, 2) == 5.0);
    CHECK(sym.get(2, 1) == 5.0);
    CHECK(sym.get(0, 0) == 0.0);
}

TEST_CASE("symmetrize leaves symmetric input unchanged and is idempotent") {
    ScoreMatrix s(4);
    s.add(0, 1, 2);
    s.add(1, 0, 2);
    s.add(2, 3, 7);
    s.add(3, 2, 7);
    ScoreMatrix once = symmetrize(s);
    CHECK(once.get(0, 1) == 2.0);
    CHECK(once.get(2, 3) == 7.0);
    ScoreMatrix twice = symmetrize(once);
    for (const auto& [k, v] : once.entries()) {
        NodeId i = static_cast<NodeId>(k / 4), j = static_cast<NodeId>(k % 4);
        CHECK(twice.get(i, j) == v);
    }
    CHECK(twice.nnz() == once.nnz());
}

TEST_CASE("assemble: a single positive neighbor is a forced edge") {
    ScoreMatrix s(8);
    // node 3 only connects to 7; give the rest a dense block among 0..2
    s.add(3, 7, 2);
    s.add(7, 3, 2);
    for (NodeId i = 0; i < 3; ++i)
        for (NodeId j = 0; j < 3; ++j)
            if (i != j) s.add(i, j, 5);
    for (NodeId v : {4, 5, 6}) {
        s.add(v, 0, 1);
        s.add(0, v, 1);
    }
    for (std::uint64_t seed = 0; seed < 50; ++seed) {
        Graph g = assemble_graph(s, 7, seed);
        CHECK(g.has_edge(3, 7));
    }
}

TEST_CASE("assemble: uniform scores over K3 pairs with target 3 gives K3") {
    ScoreMatrix s(3);
    for (NodeId i = 0; i < 3; ++i)
        for (NodeId j = 0; j < 3; ++j)
            if (i != j) s.add(i, j, 1);
    Graph g = assemble_graph(s, 3, 123);
    CHECK(g.num_edges() == 3);
    CHECK(g.has_edge(0, 1));
    CHECK(g.has_edge(1, 2));
    CHECK(g.has_edge(0, 2));
}

TEST_CASE("assemble: hub-heavy scores still give minimum degree 1") {
    // almost all mass concentrated on node 0's pairs
    const NodeId n = 12;
    ScoreMatrix s(n);
    for (NodeId v = 1; v < n; ++v) {
        s.add(0, v, 1000);
        s.add(v, 0, 1000);
    }
    for (NodeId v = 1; v + 1 < n; ++v) {
        s.add(v, v + 1, 0.01);
        s.add(v + 1, v, 0.01);
    }
    for (std::uint64_t seed = 0; seed < 1000; ++seed) {
        Graph g = assemble_graph(s, n, seed);
        CHECK(g.num_edges() == n);
        for (NodeId v = 0; v < n; ++v) CHECK(g.degree(v) >= 1);
    }
}

TEST_CASE("assemble errors") {
    ScoreMatrix s(4);
    s.add(0, 1, 1);
    s.add(1, 0, 1);
    s.add(2, 3, 1);
    s.add(3, 2, 1);
    SUBCASE("node with all-zero scores is named") {
        ScoreMatrix bad(3);
        bad.add(0, 1, 1);
        bad.add(1, 0, 1);
        CHECK_THROWS_WITH_AS(assemble_graph(bad, 2, 0), doctest::Contains("node 2"),
                             std::runtime_error);
    }
    SUBCASE("target_m beyond positive pairs") {
        CHECK_THROWS_AS(assemble_graph(s, 3, 0), std::runtime_error);
    }
    SUBCASE("target_m below n/2") {
        CHECK_THROWS_AS(assemble_graph(s, 1, 0), std::invalid_argument);
    }
}

TEST_CASE("scores_for_pairs symmetrizes on read") {
    ScoreMatrix s(4);
    s.add(1, 2, 3);
    s.add(2, 1, 5);
    s.add(0, 1, 5);
    auto out = scores_for_pairs(s, {{1, 2}, {2, 1}, {0, 1}, {0, 3}});
    CHECK(out[0] == 5.0);
    CHECK(out[1] == 5.0);
    CHECK(out[2] == 5.0);
    CHECK(out[3] == 0.0);
}

TEST_CASE("positive scaling leaves assembly output unchanged under a fixed seed") {
    Rng rng(55);
    for (int trial = 0; trial < 30; ++trial) {
        NodeId n = 5 + static_cast<NodeId>(rng.uniform_int(12));
        ScoreMatrix s(n);
        for (NodeId i = 0; i < n; ++i)
            for (NodeId j = 0; j < n; ++j)
                if (i != j && rng.uniform01() < 0.6) s.add(i, j, rng.uniform() * 10);
        ScoreMatrix sym = symmetrize(s);
        bool covered = true;
        for (NodeId i = 0; i < n && covered; ++i) {
            bool row = false;
            for (NodeId j = 0; j < n; ++j) row = row || sym.get(i, j) > 0;
            covered = row;
        }
        if (!covered) continue;
        std::int64_t target = n;
        for (double c : {2.0, 3.7, 1e6}) {
            ScoreMatrix scaled(n);
            for (const auto& [k, v] : sym.entries())
                scaled.add(static_cast<NodeId>(k / n), static_cast<NodeId>(k % n), v * c);
            Graph a = assemble_graph(sym, target, 42);
            Graph b = assemble_graph(scaled, target, 42);
            CHECK(a.edges() == b.edges());
        }
    }
}

TEST_CASE("score persistence round trip") {
    ScoreMatrix s(5);
    s.add(0, 1, 2.5);
    s.add(4, 2, 17);
    std::string path = "/tmp/netwalk_scores_test.txt";
    save_scores(s, path);
    ScoreMatrix loaded = load_scores(path, 5);
    CHECK(loaded.get(0, 1) == 2.5);
    CHECK(loaded.get(4, 2) == 17.0);
    CHECK(loaded.nnz() == 2);
    std::remove(path.c_str());
}
