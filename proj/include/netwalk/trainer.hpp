#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "netwalk/assembler.hpp"
#include "netwalk/graph.hpp"
#include "netwalk/model.hpp"
#include "netwalk/walker.hpp"

namespace netwalk {

enum class StopMode { Val, Eo };

struct TrainConfig {
    double lr = 1e-3;
    double l2 = 1e-6;
    int d_steps_per_g = 5;
    double gp_weight = 10.0;
    double tau_start = 1.0;
    double tau_min = 0.5;
    int tau_every = 500;
    double tau_decay = 0.995;
    int eval_every = 500;
    int patience = 5;
    StopMode stop_mode = StopMode::Val;
    double target_eo = 0.5;
    int window = 1000;  // iterations covered by the sliding transition window
    std::uint64_t seed = 0;

    // model / walk parameters
    int batch_size = 128;
    int walk_len = 16;
    double p = 1.0;
    double q = 1.0;
    int latent_dim = 16;
    int g_hidden = 40;
    int g_down = 64;
    int d_hidden = 30;
    int d_down = 32;

    // desk-scale evaluation budget; the full-scale reference value is 15e6
    std::int64_t eval_transitions = 150000;
    std::int64_t max_iters = 20000;
    double wallclock_budget_s = 0.0;  // 0 disables; breaks determinism when hit

    std::string to_json() const;
    static TrainConfig from_json(const std::string& text);
};

// Adam with beta1=0.9, beta2=0.999, eps=1e-8; one slot per parameter tensor.
class AdamState {
public:
    explicit AdamState(const std::vector<ad::Tensor*>& params, double lr);
    void step(const std::vector<ad::Tensor*>& params, const std::vector<ad::Tensor>& grads);
    std::int64_t steps_taken() const { return t_; }

    double beta1 = 0.9, beta2 = 0.999, eps = 1e-8;

private:
    double lr_;
    std::int64_t t_ = 0;
    std::vector<std::vector<double>> m_, v_;
};

// Sliding window of per-evaluation transition-count deltas.
class TransitionWindow {
public:
    TransitionWindow(NodeId n, int window_iters) : n_(n), window_(window_iters) {}
    void push(ScoreMatrix delta, std::int64_t iteration);
    ScoreMatrix merged() const;
    std::int64_t oldest_iteration() const;

private:
    NodeId n_;
    int window_;
    std::vector<std::pair<std::int64_t, ScoreMatrix>> deltas_;
};

struct CriticLossParts {
    double wasserstein = 0.0;
    double gradient_penalty = 0.0;
    double l2 = 0.0;
    double total() const;
};

// One critic update: loss = mean D(fake) - mean D(real) + gp_weight * GP(x̂)
// + l2 ‖θ_D‖², with x̂ = ε x_real + (1-ε) x_fake per sample. Applies one Adam
// step to the discriminator.
CriticLossParts critic_step(DiscriminatorParams& dp, const GeneratorParams& gp,
                            const WalkBatch& real, const TrainConfig& cfg, double tau,
                            AdamState& adam, Rng& rng);

// One generator update: loss = -mean D(fake) + l2 ‖θ_G‖², gradients through
// the straight-through path. Applies one Adam step to the generator.
double generator_step(const DiscriminatorParams& dp, GeneratorParams& gp, const TrainConfig& cfg,
                      double tau, AdamState& adam, Rng& rng);

struct EvalRecord {
    std::int64_t iter = 0;
    double d_loss = 0.0;
    double g_loss = 0.0;
    double tau = 0.0;
    double eo = 0.0;  // NaN while the window cannot be assembled yet
    double val_auc = 0.0;
    double val_ap = 0.0;
};

struct TrainResult {
    Checkpoint checkpoint;
    std::vector<EvalRecord> log;
    ScoreMatrix window_scores;  // symmetrized window counts at stop
    std::string stop_reason;    // val_plateau | eo_reached | max_iters | wallclock
    std::int64_t critic_steps = 0;
    std::int64_t generator_steps = 0;
    double best_val_auc = 0.0;  // metrics recorded at the returned checkpoint
    double best_val_ap = 0.0;
};

// Full adversarial loop on split.train. Writes one NDJSON record per
// evaluation to log_stream when given.
TrainResult train(const Graph& g, const EdgeSplit& split, const TrainConfig& cfg,
                  std::ostream* log_stream = nullptr);

}  // namespace netwalk
