#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "netwalk/autodiff.hpp"
#include "netwalk/rng.hpp"

namespace netwalk {

struct AffineParams {
    ad::Tensor w;  // [in, out]
    ad::Tensor b;  // [1, out]
};

struct LstmParams {
    ad::Tensor w;  // [in + hidden, 4*hidden], gate order i | f | g | o
    ad::Tensor b;  // [1, 4*hidden], forget block initialized to 1
    int input_dim = 0;
    int hidden = 0;
};

// Generator: latent init streams -> LSTM -> up-projection logits -> Gumbel
// straight-through node sampling, with the one-hot fed back through the
// down-projection.
struct GeneratorParams {
    AffineParams init_c1, init_c2;  // z -> C0 stream (two tanh layers)
    AffineParams init_h1, init_h2;  // z -> h0 stream
    LstmParams lstm;
    ad::Tensor w_down;  // [N, H_g]
    ad::Tensor w_up;    // [hidden, N]
    int n = 0, latent_dim = 16, hidden = 40, down_dim = 64;

    static GeneratorParams create(int n, int latent_dim, int hidden, int down_dim, Rng& rng);
    std::vector<ad::Tensor*> all_params();
    std::vector<ad::Tensor*> weight_params();  // L2 applies to these only
    // Registers every parameter on the tape (returns tracked handles in place).
    void watch(ad::Tape& tape);
};

struct DiscriminatorParams {
    ad::Tensor w_down;  // [N, H_d]
    LstmParams lstm;
    AffineParams readout;  // [hidden, 1]
    int n = 0, hidden = 30, down_dim = 32;

    static DiscriminatorParams create(int n, int hidden, int down_dim, Rng& rng);
    std::vector<ad::Tensor*> all_params();
    std::vector<ad::Tensor*> weight_params();
    void watch(ad::Tape& tape);
};

struct GumbelConfig {
    double tau = 1.0;
    bool noise = true;  // disabled only for deterministic tests
};

struct GeneratedWalks {
    // per step: value is the hard one-hot, gradient path runs through the
    // soft relaxation
    std::vector<ad::Tensor> straight_through;
    std::vector<ad::Tensor> soft;               // v* per step
    std::vector<std::vector<int>> node_indices;  // [batch][step]
};

// Samples `batch` walks of walk_len steps. Gradients flow iff the generator
// parameters are tape-tracked (see GeneratorParams::watch).
GeneratedWalks generate_walks(const GeneratorParams& gp, int batch, int walk_len,
                              const GumbelConfig& gumbel, Rng& rng);
// Same, with caller-supplied latent codes z [batch, latent_dim].
GeneratedWalks generate_walks_from(const GeneratorParams& gp, const ad::Tensor& z, int walk_len,
                                   const GumbelConfig& gumbel, Rng& rng);

// One unbounded score per walk, shape [batch, 1]. Inputs are per-step
// [batch, N] node encodings (one-hot or soft).
ad::Tensor discriminate(const DiscriminatorParams& dp, const std::vector<ad::Tensor>& walk);

// One-hot encoding of real walks: walk_len tensors of shape [batch, N].
std::vector<ad::Tensor> onehot_walks(const std::vector<std::vector<std::int32_t>>& walks, int n);

// Single-file checkpoint: one-line JSON header, then raw little-endian
// float64 arrays in declared order. Round-trips bit-exactly.
struct Checkpoint {
    GeneratorParams gen;
    DiscriminatorParams dis;
    int walk_len = 16;
    double tau = 1.0;
    std::int64_t iteration = 0;
    std::int64_t train_edge_count = 0;

    void save(const std::string& path) const;
    static Checkpoint load(const std::string& path);

    // Tensor copies share data; snapshots need an independent copy.
    Checkpoint clone() const;
};

}  // namespace netwalk
