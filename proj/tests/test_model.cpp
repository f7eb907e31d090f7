#include "netwalk/model.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>

#include "doctest.h"
#include "test_helpers.hpp"

using namespace netwalk;
using ad::Tensor;

namespace {

GeneratorParams tiny_gen(int n, Rng& rng) { return GeneratorParams::create(n, 4, 6, 5, rng); }
DiscriminatorParams tiny_dis(int n, Rng& rng) { return DiscriminatorParams::create(n, 5, 4, rng); }

}  // namespace

TEST_CASE("dominant logit wins with noise disabled") {
    // v = onehot(argmax softmax((p + 0)/tau)) must pick the 10
    Tensor p(1, 3, {10, 0, 0});
    Tensor soft = ad::softmax_rows(ad::scale(p, 1.0 / 0.7));
    Tensor hard = ad::onehot_argmax(soft);
    CHECK(hard(0, 0) == 1.0);
    CHECK(hard(0, 1) == 0.0);
    CHECK(hard(0, 2) == 0.0);
}

TEST_CASE("exact tie breaks to the lowest index") {
    Tensor p(1, 2, {0, 0});
    Tensor soft = ad::softmax_rows(p);
    CHECK(soft(0, 0) == doctest::Approx(0.5).epsilon(1e-15));
    CHECK(soft(0, 1) == doctest::Approx(0.5).epsilon(1e-15));
    auto idx = ad::argmax_rows(soft);
    CHECK(idx[0] == 0);
}

TEST_CASE("gumbel-argmax frequencies follow softmax(logits)") {
    // argmax of p + g is Categorical(softmax(p)) for any temperature
    Rng rng(2024);
    std::vector<double> logits{std::log(1.0), std::log(2.0), std::log(3.0)};
    std::vector<std::int64_t> counts(3, 0);
    const int samples = 10000;
    for (int s = 0; s < samples; ++s) {
        double best = -1e300;
        int arg = 0;
        for (int j = 0; j < 3; ++j) {
            double v = logits[static_cast<std::size_t>(j)] + rng.gumbel();
            if (v > best) {
                best = v;
                arg = j;
            }
        }
        counts[static_cast<std::size_t>(arg)]++;
    }
    double chi2 = 0;
    for (int j = 0; j < 3; ++j) {
        double expected = samples * (j + 1) / 6.0;
        double diff = counts[static_cast<std::size_t>(j)] - expected;
        chi2 += diff * diff / expected;
    }
    CHECK(testutil::chi2_pvalue(chi2, 2) > 0.01);
}

TEST_CASE("generated walks: exact one-hots, soft rows sum to 1") {
    Rng rng(5);
    GeneratorParams gp = tiny_gen(9, rng);
    Rng gen_rng(77);
    GeneratedWalks walks = generate_walks(gp, 6, 5, GumbelConfig{0.8, true}, gen_rng);
    REQUIRE(walks.straight_through.size() == 5);
    REQUIRE(walks.soft.size() == 5);
    for (std::size_t t = 0; t < 5; ++t) {
        const Tensor& st = walks.straight_through[t];
        const Tensor& soft = walks.soft[t];
        for (int i = 0; i < 6; ++i) {
            int ones = 0;
            double soft_sum = 0;
            for (int j = 0; j < 9; ++j) {
                CHECK((st(i, j) == 0.0 || st(i, j) == 1.0));
                if (st(i, j) == 1.0) ++ones;
                CHECK(soft(i, j) > 0.0);
                soft_sum += soft(i, j);
            }
            CHECK(ones == 1);
            CHECK(soft_sum == doctest::Approx(1.0).epsilon(1e-12));
            CHECK(st(i, walks.node_indices[static_cast<std::size_t>(i)][t]) == 1.0);
        }
    }
    // node indices structurally < N
    for (const auto& walk : walks.node_indices)
        for (int v : walk) {
            CHECK(v >= 0);
            CHECK(v < 9);
        }
}

TEST_CASE("generation is bitwise reproducible under a fixed seed") {
    Rng rng(8);
    GeneratorParams gp = tiny_gen(7, rng);
    Rng r1(123), r2(123);
    auto a = generate_walks(gp, 4, 6, GumbelConfig{1.0, true}, r1);
    auto b = generate_walks(gp, 4, 6, GumbelConfig{1.0, true}, r2);
    CHECK(a.node_indices == b.node_indices);
    for (std::size_t t = 0; t < a.soft.size(); ++t)
        for (std::int64_t i = 0; i < a.soft[t].size(); ++i)
            CHECK(a.soft[t].data()[i] == b.soft[t].data()[i]);
}

TEST_CASE("straight-through gradient equals the soft-path gradient") {
    // at large tau the loss gradient w.r.t. logits through the ST output must
    // match finite differences of the soft path (the hard path has none)
    Rng rng(9);
    const int n = 5;
    Tensor w(n, 1);
    for (int j = 0; j < n; ++j) w.at(j, 0) = 0.3 * j - 0.5;
    Tensor g_noise(1, n);
    for (int j = 0; j < n; ++j) g_noise.at(0, j) = rng.gumbel();
    const double tau = 4.0;

    auto soft_loss = [&](const std::vector<double>& flat) {
        Tensor p(1, n, flat);
        Tensor soft = ad::softmax_rows(ad::scale(ad::add(p, g_noise), 1.0 / tau));
        return ad::sum(ad::mul(soft, ad::transpose(w))).value();
    };

    std::vector<double> p0{0.2, -0.4, 0.9, 0.1, -0.2};
    ad::Tape tape;
    Tensor p = tape.watch(Tensor(1, n, p0));
    Tensor soft = ad::softmax_rows(ad::scale(ad::add(p, g_noise), 1.0 / tau));
    Tensor hard = ad::onehot_argmax(soft.detached());
    Tensor delta(1, n);
    for (int j = 0; j < n; ++j) delta.at(0, j) = hard(0, j) - soft(0, j);
    Tensor st = ad::add(soft, delta);
    Tensor loss = ad::sum(ad::mul(st, ad::transpose(w)));
    Tensor grad_p = ad::grad(tape, loss, {p})[0];

    auto fd = testutil::finite_difference(soft_loss, p0);
    for (int j = 0; j < n; ++j)
        CHECK(testutil::grad_rel_err(grad_p(0, j), fd[static_cast<std::size_t>(j)], 1e-4) < 1e-5);
}

TEST_CASE("discriminator with zero weights scores zero") {
    Rng rng(3);
    DiscriminatorParams dp = tiny_dis(6, rng);
    for (Tensor* t : dp.all_params())
        for (std::int64_t i = 0; i < t->size(); ++i) t->data()[i] = 0.0;
    auto walk = onehot_walks({{0, 1, 2}, {3, 4, 5}}, 6);
    Tensor scores = discriminate(dp, walk);
    CHECK(scores(0, 0) == 0.0);
    CHECK(scores(1, 0) == 0.0);
}

TEST_CASE("permuting the batch permutes the scores") {
    Rng rng(4);
    DiscriminatorParams dp = tiny_dis(5, rng);
    auto walk_a = onehot_walks({{0, 1, 2}, {3, 4, 0}, {2, 2, 2}}, 5);
    auto walk_b = onehot_walks({{2, 2, 2}, {0, 1, 2}, {3, 4, 0}}, 5);
    Tensor sa = discriminate(dp, walk_a);
    Tensor sb = discriminate(dp, walk_b);
    CHECK(sa(0, 0) == doctest::Approx(sb(1, 0)).epsilon(1e-15));
    CHECK(sa(1, 0) == doctest::Approx(sb(2, 0)).epsilon(1e-15));
    CHECK(sa(2, 0) == doctest::Approx(sb(0, 0)).epsilon(1e-15));
}

TEST_CASE("a linear scorer is affine in the interpolation coordinate") {
    // linear configuration: D(x) = sum_t x_t . w_t; on x̂ = eps real +
    // (1-eps) fake the score must equal the hand-computed affine map
    Rng rng(6);
    const int n = 4, T = 3;
    std::vector<Tensor> w;
    for (int t = 0; t < T; ++t) {
        Tensor wt(n, 1);
        for (int j = 0; j < n; ++j) wt.at(j, 0) = rng.uniform() - 0.5;
        w.push_back(wt);
    }
    auto real = onehot_walks({{0, 1, 2}}, n);
    auto fake = onehot_walks({{3, 0, 1}}, n);
    auto linear_score = [&](const std::vector<Tensor>& xs) {
        double s = 0;
        for (int t = 0; t < T; ++t)
            s += ad::sum(ad::mul(xs[static_cast<std::size_t>(t)],
                                 ad::transpose(w[static_cast<std::size_t>(t)])))
                     .value();
        return s;
    };
    double s_real = linear_score(real);
    double s_fake = linear_score(fake);
    for (double eps : {0.0, 0.25, 0.5, 0.8, 1.0}) {
        std::vector<Tensor> interp;
        for (int t = 0; t < T; ++t) {
            Tensor x(1, n);
            for (int j = 0; j < n; ++j)
                x.at(0, j) = eps * real[static_cast<std::size_t>(t)](0, j) +
                             (1 - eps) * fake[static_cast<std::size_t>(t)](0, j);
            interp.push_back(x);
        }
        CHECK(linear_score(interp) ==
              doctest::Approx(eps * s_real + (1 - eps) * s_fake).epsilon(1e-12));
    }
}

TEST_CASE("checkpoint round-trips bit-exactly") {
    Rng rng(31);
    Checkpoint ckpt;
    ckpt.gen = GeneratorParams::create(11, 4, 6, 5, rng);
    ckpt.dis = DiscriminatorParams::create(11, 5, 4, rng);
    ckpt.walk_len = 9;
    ckpt.tau = 0.87;
    ckpt.iteration = 1234;
    ckpt.train_edge_count = 55;

    std::string p1 = "/tmp/netwalk_ckpt_a.bin";
    std::string p2 = "/tmp/netwalk_ckpt_b.bin";
    ckpt.save(p1);
    Checkpoint loaded = Checkpoint::load(p1);
    loaded.save(p2);

    std::ifstream f1(p1, std::ios::binary), f2(p2, std::ios::binary);
    std::string b1((std::istreambuf_iterator<char>(f1)), std::istreambuf_iterator<char>());
    std::string b2((std::istreambuf_iterator<char>(f2)), std::istreambuf_iterator<char>());
    CHECK(b1 == b2);
    CHECK(!b1.empty());

    CHECK(loaded.walk_len == 9);
    CHECK(loaded.tau == 0.87);
    CHECK(loaded.iteration == 1234);
    CHECK(loaded.train_edge_count == 55);
    // loaded generator produces identical walks
    Rng r1(5), r2(5);
    auto a = generate_walks(ckpt.gen, 3, 4, GumbelConfig{1.0, true}, r1);
    auto b = generate_walks(loaded.gen, 3, 4, GumbelConfig{1.0, true}, r2);
    CHECK(a.node_indices == b.node_indices);
    std::remove(p1.c_str());
    std::remove(p2.c_str());
}
