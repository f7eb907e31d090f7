#include "netwalk/trainer.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "netwalk/evaluator.hpp"
#include "json.hpp"

namespace netwalk {

using ad::Tensor;

std::string TrainConfig::to_json() const {
    nlohmann::ordered_json j;
    j["lr"] = lr;
    j["l2"] = l2;
    j["d_steps_per_g"] = d_steps_per_g;
    j["gp_weight"] = gp_weight;
    j["tau_start"] = tau_start;
    j["tau_min"] = tau_min;
    j["tau_every"] = tau_every;
    j["tau_decay"] = tau_decay;
    j["eval_every"] = eval_every;
    j["patience"] = patience;
    j["stop_mode"] = stop_mode == StopMode::Val ? "val" : "eo";
    j["target_eo"] = target_eo;
    j["window"] = window;
    j["seed"] = seed;
    j["batch_size"] = batch_size;
    j["walk_len"] = walk_len;
    j["p"] = p;
    j["q"] = q;
    j["latent_dim"] = latent_dim;
    j["g_hidden"] = g_hidden;
    j["g_down"] = g_down;
    j["d_hidden"] = d_hidden;
    j["d_down"] = d_down;
    j["eval_transitions"] = eval_transitions;
    j["max_iters"] = max_iters;
    j["wallclock_budget_s"] = wallclock_budget_s;
    return j.dump(2);
}

TrainConfig TrainConfig::from_json(const std::string& text) {
    nlohmann::json j = nlohmann::json::parse(text);
    TrainConfig cfg;
    auto opt = [&](const char* k, auto& field) {
        if (j.contains(k)) field = j.at(k).get<std::decay_t<decltype(field)>>();
    };
    opt("lr", cfg.lr);
    opt("l2", cfg.l2);
    opt("d_steps_per_g", cfg.d_steps_per_g);
    opt("gp_weight", cfg.gp_weight);
    opt("tau_start", cfg.tau_start);
    opt("tau_min", cfg.tau_min);
    opt("tau_every", cfg.tau_every);
    opt("tau_decay", cfg.tau_decay);
    opt("eval_every", cfg.eval_every);
    opt("patience", cfg.patience);
    if (j.contains("stop_mode")) {
        std::string mode = j.at("stop_mode").get<std::string>();
        if (mode == "val")
            cfg.stop_mode = StopMode::Val;
        else if (mode == "eo")
            cfg.stop_mode = StopMode::Eo;
        else
            throw std::invalid_argument("stop_mode must be 'val' or 'eo'");
    }
    opt("target_eo", cfg.target_eo);
    opt("window", cfg.window);
    opt("seed", cfg.seed);
    opt("batch_size", cfg.batch_size);
    opt("walk_len", cfg.walk_len);
    opt("p", cfg.p);
    opt("q", cfg.q);
    opt("latent_dim", cfg.latent_dim);
    opt("g_hidden", cfg.g_hidden);
    opt("g_down", cfg.g_down);
    opt("d_hidden", cfg.d_hidden);
    opt("d_down", cfg.d_down);
    opt("eval_transitions", cfg.eval_transitions);
    opt("max_iters", cfg.max_iters);
    opt("wallclock_budget_s", cfg.wallclock_budget_s);
    return cfg;
}

// --- Adam ---------------------------------------------------------------------

AdamState::AdamState(const std::vector<Tensor*>& params, double lr) : lr_(lr) {
    for (const Tensor* p : params) {
        m_.emplace_back(static_cast<std::size_t>(p->size()), 0.0);
        v_.emplace_back(static_cast<std::size_t>(p->size()), 0.0);
    }
}

void AdamState::step(const std::vector<Tensor*>& params, const std::vector<Tensor>& grads) {
    if (params.size() != m_.size() || grads.size() != params.size())
        throw std::invalid_argument("AdamState::step: parameter count mismatch");
    ++t_;
    double bc1 = 1.0 - std::pow(beta1, static_cast<double>(t_));
    double bc2 = 1.0 - std::pow(beta2, static_cast<double>(t_));
    for (std::size_t k = 0; k < params.size(); ++k) {
        Tensor& p = *params[k];
        const Tensor& g = grads[k];
        if (g.size() != p.size()) throw std::invalid_argument("AdamState::step: gradient shape mismatch");
        for (std::int64_t i = 0; i < p.size(); ++i) {
            double gi = g.data()[i];
            m_[k][static_cast<std::size_t>(i)] =
                beta1 * m_[k][static_cast<std::size_t>(i)] + (1.0 - beta1) * gi;
            v_[k][static_cast<std::size_t>(i)] =
                beta2 * v_[k][static_cast<std::size_t>(i)] + (1.0 - beta2) * gi * gi;
            double mhat = m_[k][static_cast<std::size_t>(i)] / bc1;
            double vhat = v_[k][static_cast<std::size_t>(i)] / bc2;
            p.data()[i] -= lr_ * mhat / (std::sqrt(vhat) + eps);
        }
    }
}

// --- sliding window --------------------------------------------------------------

void TransitionWindow::push(ScoreMatrix delta, std::int64_t iteration) {
    deltas_.emplace_back(iteration, std::move(delta));
    while (!deltas_.empty() && deltas_.front().first <= iteration - window_)
        deltas_.erase(deltas_.begin());
}

ScoreMatrix TransitionWindow::merged() const {
    ScoreMatrix out(n_);
    for (const auto& [iter, delta] : deltas_) out.merge(delta);
    return out;
}

std::int64_t TransitionWindow::oldest_iteration() const {
    return deltas_.empty() ? -1 : deltas_.front().first;
}

// --- loss pieces -----------------------------------------------------------------

namespace {

Tensor l2_term(const std::vector<Tensor*>& weights, double coeff) {
    Tensor acc = Tensor::scalar(0.0);
    for (const Tensor* w : weights) acc = ad::add(acc, ad::sum(ad::square(*w)));
    return ad::scale(acc, coeff);
}

// mean over samples of (‖∇_{x̂_i} Σ D(x̂)‖ − 1)²; batch rows are independent,
// so the per-sample gradients stack into the batched grad tensors.
Tensor batch_gradient_penalty(ad::Tape& tape, const Tensor& score_sum,
                              const std::vector<Tensor>& interp_steps) {
    std::vector<Tensor> grads = ad::grad(tape, score_sum, interp_steps);
    Tensor sq_norms = ad::sum_rows(ad::square(grads[0]));
    for (std::size_t t = 1; t < grads.size(); ++t)
        sq_norms = ad::add(sq_norms, ad::sum_rows(ad::square(grads[t])));
    Tensor norms = ad::sqrt(ad::add_scalar(sq_norms, 1e-12));
    return ad::mean(ad::square(ad::add_scalar(norms, -1.0)));
}

std::string diagnostic_stats(const Tensor& t) {
    double lo = t.data()[0], hi = t.data()[0], sum = 0.0;
    for (std::int64_t i = 0; i < t.size(); ++i) {
        lo = std::min(lo, t.data()[i]);
        hi = std::max(hi, t.data()[i]);
        sum += t.data()[i];
    }
    std::ostringstream os;
    os << "min=" << lo << " max=" << hi << " mean=" << sum / static_cast<double>(t.size());
    return os.str();
}

}  // namespace

double CriticLossParts::total() const { return wasserstein + gradient_penalty + l2; }

namespace {

// primitives already abort on non-finite values; attach last-layer stats
[[noreturn]] void rethrow_with_stats(const char* where, const std::exception& e, const Tensor& last) {
    throw std::runtime_error(std::string(where) + ": " + e.what() + " [last layer " +
                             diagnostic_stats(last) + "]");
}

}  // namespace

CriticLossParts critic_step(DiscriminatorParams& dp, const GeneratorParams& gp,
                            const WalkBatch& real, const TrainConfig& cfg, double tau,
                            AdamState& adam, Rng& rng) try {
    const int batch = static_cast<int>(real.walks.size());
    ad::Tape tape;

    // fakes need no generator gradient here; plain values suffice
    GumbelConfig gumbel{tau, true};
    Rng gen_rng = rng.fork();
    GeneratedWalks fake = generate_walks(gp, batch, cfg.walk_len, gumbel, gen_rng);

    DiscriminatorParams d = dp;  // tensor handles; data shared with dp
    d.watch(tape);

    std::vector<Tensor> real_steps = onehot_walks(real.walks, gp.n);
    std::vector<Tensor> fake_steps;
    for (const Tensor& st : fake.straight_through) fake_steps.push_back(st.detached());

    Tensor real_scores = discriminate(d, real_steps);
    Tensor fake_scores = discriminate(d, fake_steps);
    Tensor wasserstein = ad::sub(ad::mean(fake_scores), ad::mean(real_scores));

    // per-sample interpolates, watched as gradient-penalty inputs
    std::vector<double> eps(static_cast<std::size_t>(batch));
    for (double& e : eps) e = rng.uniform01();
    std::vector<Tensor> interp;
    interp.reserve(real_steps.size());
    for (std::size_t t = 0; t < real_steps.size(); ++t) {
        Tensor x(batch, gp.n);
        for (int i = 0; i < batch; ++i)
            for (int j = 0; j < gp.n; ++j)
                x.at(i, j) = eps[static_cast<std::size_t>(i)] * real_steps[t](i, j) +
                             (1.0 - eps[static_cast<std::size_t>(i)]) * fake_steps[t](i, j);
        interp.push_back(tape.watch(x));
    }
    Tensor interp_scores = discriminate(d, interp);
    Tensor penalty = batch_gradient_penalty(tape, ad::sum(interp_scores), interp);

    Tensor l2 = l2_term(d.weight_params(), cfg.l2);
    Tensor loss =
        ad::add(ad::add(wasserstein, ad::scale(penalty, cfg.gp_weight)), l2);

    auto tracked = d.all_params();
    std::vector<Tensor> wrt(tracked.size());
    for (std::size_t i = 0; i < tracked.size(); ++i) wrt[i] = *tracked[i];
    std::vector<Tensor> grads = ad::grad(tape, loss, wrt);
    for (Tensor& g : grads) g = g.detached();

    adam.step(dp.all_params(), grads);
    return CriticLossParts{wasserstein.value(), cfg.gp_weight * penalty.value(), l2.value()};
} catch (const std::runtime_error& e) {
    rethrow_with_stats("critic_step", e, dp.readout.w);
}

double generator_step(const DiscriminatorParams& dp, GeneratorParams& gp, const TrainConfig& cfg,
                      double tau, AdamState& adam, Rng& rng) try {
    ad::Tape tape;
    GeneratorParams g = gp;  // shared data, tracked handles below
    g.watch(tape);

    GumbelConfig gumbel{tau, true};
    Rng gen_rng = rng.fork();
    GeneratedWalks fake = generate_walks(g, cfg.batch_size, cfg.walk_len, gumbel, gen_rng);

    Tensor scores = discriminate(dp, fake.straight_through);
    Tensor loss = ad::add(ad::scale(ad::mean(scores), -1.0), l2_term(g.weight_params(), cfg.l2));

    auto tracked = g.all_params();
    std::vector<Tensor> wrt(tracked.size());
    for (std::size_t i = 0; i < tracked.size(); ++i) wrt[i] = *tracked[i];
    std::vector<Tensor> grads = ad::grad(tape, loss, wrt);
    for (Tensor& gr : grads) gr = gr.detached();

    adam.step(gp.all_params(), grads);
    return loss.value();
} catch (const std::runtime_error& e) {
    rethrow_with_stats("generator_step", e, gp.w_up);
}

// --- training loop -----------------------------------------------------------------

namespace {

struct EvalOutcome {
    double eo = std::numeric_limits<double>::quiet_NaN();
    double val_auc = 0.0;
    double val_ap = 0.0;
};

EvalOutcome evaluate_window(const ScoreMatrix& merged, const Graph& train,
                            const EdgeSplit& split, Rng& rng) {
    EvalOutcome out;
    ScoreMatrix sym = symmetrize(merged);
    auto val_scores = [&sym](Edge e) { return std::max(sym.get(e.first, e.second),
                                                       sym.get(e.second, e.first)); };
    if (!split.val_edges.empty() && !split.val_nonedges.empty()) {
        auto [auc, ap] = evaluate_link_prediction(val_scores, split, false);
        out.val_auc = auc;
        out.val_ap = ap;
    }
    try {
        Graph assembled = assemble_graph(sym, train.num_edges(), rng.fork().next());
        out.eo = edge_overlap(train, assembled);
    } catch (const std::exception&) {
        // early windows may not cover every node yet
    }
    return out;
}

void append_log_line(std::ostream* stream, const EvalRecord& rec) {
    if (stream == nullptr) return;
    nlohmann::ordered_json j;
    j["iter"] = rec.iter;
    j["d_loss"] = rec.d_loss;
    j["g_loss"] = rec.g_loss;
    j["tau"] = rec.tau;
    if (std::isnan(rec.eo))
        j["eo"] = nullptr;
    else
        j["eo"] = rec.eo;
    j["val_auc"] = rec.val_auc;
    j["val_ap"] = rec.val_ap;
    (*stream) << j.dump() << '\n';
    stream->flush();
}

}  // namespace

TrainResult train(const Graph& g, const EdgeSplit& split, const TrainConfig& cfg,
                  std::ostream* log_stream) {
    if (!split.train.is_connected())
        throw std::invalid_argument("train: split.train must be connected");
    const Graph& train_graph = split.train;
    const int n = train_graph.num_nodes();
    if (g.num_nodes() != n) throw std::invalid_argument("train: graph/split node counts differ");

    auto start_time = std::chrono::steady_clock::now();
    Rng root(cfg.seed);
    Rng init_rng = root.fork();
    Rng walk_rng = root.fork();
    Rng step_rng = root.fork();
    Rng eval_rng = root.fork();

    Checkpoint ckpt;
    ckpt.gen = GeneratorParams::create(n, cfg.latent_dim, cfg.g_hidden, cfg.g_down, init_rng);
    ckpt.dis = DiscriminatorParams::create(n, cfg.d_hidden, cfg.d_down, init_rng);
    ckpt.walk_len = cfg.walk_len;
    ckpt.train_edge_count = train_graph.num_edges();

    AdamState adam_d(ckpt.dis.all_params(), cfg.lr);
    AdamState adam_g(ckpt.gen.all_params(), cfg.lr);

    WalkConfig wcfg{cfg.walk_len, cfg.p, cfg.q, cfg.batch_size};
    TransitionWindow window(n, cfg.window);

    TrainResult result;
    result.window_scores = ScoreMatrix(n);
    double tau = cfg.tau_start;
    double best_val = -1.0;
    int evals_since_best = 0;
    Checkpoint best_ckpt;
    double d_loss_acc = 0.0, g_loss_acc = 0.0;
    std::int64_t steps_since_eval = 0;
    std::string stop_reason;

    const std::int64_t walks_per_eval =
        std::max<std::int64_t>(1, cfg.eval_transitions / std::max(1, cfg.walk_len - 1));

    std::int64_t iter = 0;
    for (iter = 1; iter <= cfg.max_iters; ++iter) {
        for (int k = 0; k < cfg.d_steps_per_g; ++k) {
            WalkBatch real = sample_walks(train_graph, wcfg, walk_rng.next());
            d_loss_acc += critic_step(ckpt.dis, ckpt.gen, real, cfg, tau, adam_d, step_rng).total();
            ++result.critic_steps;
        }
        g_loss_acc += generator_step(ckpt.dis, ckpt.gen, cfg, tau, adam_g, step_rng);
        ++result.generator_steps;
        ++steps_since_eval;

        if (iter % cfg.tau_every == 0) tau = std::max(cfg.tau_min, tau * cfg.tau_decay);

        bool budget_hit = false;
        if (cfg.wallclock_budget_s > 0) {
            double elapsed =
                std::chrono::duration<double>(std::chrono::steady_clock::now() - start_time).count();
            budget_hit = elapsed > cfg.wallclock_budget_s;
        }

        if (iter % cfg.eval_every == 0 || iter == cfg.max_iters || budget_hit) {
            // fresh generation for the window delta
            ScoreMatrix delta(n);
            GumbelConfig gumbel{tau, true};
            std::int64_t remaining = walks_per_eval;
            while (remaining > 0) {
                int chunk = static_cast<int>(std::min<std::int64_t>(remaining, 512));
                Rng chunk_rng = eval_rng.fork();
                GeneratedWalks walks = generate_walks(ckpt.gen, chunk, cfg.walk_len, gumbel, chunk_rng);
                for (const auto& walk : walks.node_indices)
                    for (std::size_t t = 0; t + 1 < walk.size(); ++t)
                        delta.add(walk[t], walk[t + 1]);
                remaining -= chunk;
            }
            window.push(std::move(delta), iter);

            EvalOutcome eval = evaluate_window(window.merged(), train_graph, split, eval_rng);
            EvalRecord rec;
            rec.iter = iter;
            rec.d_loss = d_loss_acc / std::max<std::int64_t>(1, steps_since_eval * cfg.d_steps_per_g);
            rec.g_loss = g_loss_acc / std::max<std::int64_t>(1, steps_since_eval);
            rec.tau = tau;
            rec.eo = eval.eo;
            rec.val_auc = eval.val_auc;
            rec.val_ap = eval.val_ap;
            result.log.push_back(rec);
            append_log_line(log_stream, rec);
            d_loss_acc = g_loss_acc = 0.0;
            steps_since_eval = 0;

            ckpt.iteration = iter;
            ckpt.tau = tau;

            if (cfg.stop_mode == StopMode::Val) {
                double score = eval.val_auc + eval.val_ap;
                if (score > best_val) {
                    best_val = score;
                    evals_since_best = 0;
                    best_ckpt = ckpt.clone();
                    result.best_val_auc = eval.val_auc;
                    result.best_val_ap = eval.val_ap;
                } else if (++evals_since_best >= cfg.patience) {
                    stop_reason = "val_plateau";
                }
            } else {
                result.best_val_auc = std::max(result.best_val_auc, eval.val_auc);
                result.best_val_ap = std::max(result.best_val_ap, eval.val_ap);
                if (!std::isnan(eval.eo) && eval.eo >= cfg.target_eo) stop_reason = "eo_reached";
            }
        }

        if (budget_hit && stop_reason.empty()) stop_reason = "wallclock";
        if (!stop_reason.empty()) break;
    }
    if (stop_reason.empty()) stop_reason = "max_iters";

    result.stop_reason = stop_reason;
    result.checkpoint = (cfg.stop_mode == StopMode::Val && best_val >= 0) ? best_ckpt : ckpt;
    result.window_scores = symmetrize(window.merged());
    return result;
}

}  // namespace netwalk
