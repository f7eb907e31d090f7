#include "netwalk/model.hpp"

#include <cmath>
#include <cstring>
#include <fstream>
#include <stdexcept>

#include "json.hpp"

namespace netwalk {

using ad::Tensor;

namespace {

Tensor uniform_init(int rows, int cols, Rng& rng) {
    // uniform(-s, s) with s = 1/sqrt(fan_in); fan_in = rows of the matmul
    double s = 1.0 / std::sqrt(static_cast<double>(rows));
    Tensor t(rows, cols);
    for (int i = 0; i < rows; ++i)
        for (int j = 0; j < cols; ++j) t.at(i, j) = (2.0 * rng.uniform01() - 1.0) * s;
    return t;
}

LstmParams lstm_init(int input_dim, int hidden, Rng& rng) {
    LstmParams p;
    p.input_dim = input_dim;
    p.hidden = hidden;
    p.w = uniform_init(input_dim + hidden, 4 * hidden, rng);
    p.b = Tensor::zeros(1, 4 * hidden);
    for (int j = hidden; j < 2 * hidden; ++j) p.b.at(0, j) = 1.0;  // forget gate
    return p;
}

AffineParams affine_init(int in, int out, Rng& rng) {
    return AffineParams{uniform_init(in, out, rng), Tensor::zeros(1, out)};
}

Tensor affine(const AffineParams& p, const Tensor& x) {
    return ad::add(ad::matmul(x, p.w), ad::broadcast(p.b, x.rows(), p.b.cols()));
}

struct LstmState {
    Tensor c, h;
};

LstmState lstm_step(const LstmParams& p, const Tensor& x, const LstmState& prev) {
    Tensor gates = ad::add(ad::matmul(ad::concat_cols(x, prev.h), p.w),
                           ad::broadcast(p.b, x.rows(), 4 * p.hidden));
    Tensor in_g = ad::sigmoid(ad::slice_cols(gates, 0, p.hidden));
    Tensor forget_g = ad::sigmoid(ad::slice_cols(gates, p.hidden, 2 * p.hidden));
    Tensor cand = ad::tanh(ad::slice_cols(gates, 2 * p.hidden, 3 * p.hidden));
    Tensor out_g = ad::sigmoid(ad::slice_cols(gates, 3 * p.hidden, 4 * p.hidden));
    Tensor c = ad::add(ad::mul(forget_g, prev.c), ad::mul(in_g, cand));
    Tensor h = ad::mul(out_g, ad::tanh(c));
    return {c, h};
}

}  // namespace

GeneratorParams GeneratorParams::create(int n, int latent_dim, int hidden, int down_dim, Rng& rng) {
    GeneratorParams gp;
    gp.n = n;
    gp.latent_dim = latent_dim;
    gp.hidden = hidden;
    gp.down_dim = down_dim;
    gp.init_c1 = affine_init(latent_dim, hidden, rng);
    gp.init_c2 = affine_init(hidden, hidden, rng);
    gp.init_h1 = affine_init(latent_dim, hidden, rng);
    gp.init_h2 = affine_init(hidden, hidden, rng);
    gp.lstm = lstm_init(down_dim, hidden, rng);
    gp.w_down = uniform_init(n, down_dim, rng);
    gp.w_up = uniform_init(hidden, n, rng);
    return gp;
}

std::vector<Tensor*> GeneratorParams::all_params() {
    return {&init_c1.w, &init_c1.b, &init_c2.w, &init_c2.b, &init_h1.w, &init_h1.b,
            &init_h2.w, &init_h2.b, &lstm.w,    &lstm.b,    &w_down,    &w_up};
}

std::vector<Tensor*> GeneratorParams::weight_params() {
    return {&init_c1.w, &init_c2.w, &init_h1.w, &init_h2.w, &lstm.w, &w_down, &w_up};
}

void GeneratorParams::watch(ad::Tape& tape) {
    for (Tensor* t : all_params()) *t = tape.watch(*t);
}

DiscriminatorParams DiscriminatorParams::create(int n, int hidden, int down_dim, Rng& rng) {
    DiscriminatorParams dp;
    dp.n = n;
    dp.hidden = hidden;
    dp.down_dim = down_dim;
    dp.w_down = uniform_init(n, down_dim, rng);
    dp.lstm = lstm_init(down_dim, hidden, rng);
    dp.readout = affine_init(hidden, 1, rng);
    return dp;
}

std::vector<Tensor*> DiscriminatorParams::all_params() {
    return {&w_down, &lstm.w, &lstm.b, &readout.w, &readout.b};
}

std::vector<Tensor*> DiscriminatorParams::weight_params() { return {&w_down, &lstm.w, &readout.w}; }

void DiscriminatorParams::watch(ad::Tape& tape) {
    for (Tensor* t : all_params()) *t = tape.watch(*t);
}

GeneratedWalks generate_walks_from(const GeneratorParams& gp, const Tensor& z, int walk_len,
                                   const GumbelConfig& gumbel, Rng& rng) {
    if (z.cols() != gp.latent_dim) throw std::invalid_argument("generate_walks: latent dim mismatch");
    if (gumbel.tau <= 0) throw std::invalid_argument("generate_walks: tau must be positive");
    const int batch = z.rows();

    LstmState state{ad::tanh(affine(gp.init_c2, ad::tanh(affine(gp.init_c1, z)))),
                    ad::tanh(affine(gp.init_h2, ad::tanh(affine(gp.init_h1, z))))};

    GeneratedWalks out;
    out.node_indices.assign(static_cast<std::size_t>(batch), std::vector<int>());
    Tensor prev_input = Tensor::zeros(batch, gp.down_dim);  // v0 = 0 down-projects to 0

    for (int t = 0; t < walk_len; ++t) {
        state = lstm_step(gp.lstm, prev_input, state);
        Tensor logits = ad::matmul(state.h, gp.w_up);

        Tensor noise(batch, gp.n);
        if (gumbel.noise)
            for (int i = 0; i < batch; ++i)
                for (int j = 0; j < gp.n; ++j) noise.at(i, j) = rng.gumbel();
        Tensor soft =
            ad::softmax_rows(ad::scale(ad::add(logits, noise), 1.0 / gumbel.tau));

        Tensor hard = ad::onehot_argmax(soft.detached());
        auto idx = ad::argmax_rows(soft.detached());
        for (int i = 0; i < batch; ++i)
            out.node_indices[static_cast<std::size_t>(i)].push_back(idx[static_cast<std::size_t>(i)]);

        // straight-through: value equals the one-hot, gradient follows soft
        Tensor delta(batch, gp.n);
        for (int i = 0; i < batch; ++i)
            for (int j = 0; j < gp.n; ++j) delta.at(i, j) = hard(i, j) - soft(i, j);
        Tensor st = ad::add(soft, delta);

        out.soft.push_back(soft);
        out.straight_through.push_back(st);
        prev_input = ad::matmul(st, gp.w_down);
    }
    return out;
}

GeneratedWalks generate_walks(const GeneratorParams& gp, int batch, int walk_len,
                              const GumbelConfig& gumbel, Rng& rng) {
    Tensor z(batch, gp.latent_dim);
    for (int i = 0; i < batch; ++i)
        for (int j = 0; j < gp.latent_dim; ++j) z.at(i, j) = rng.normal();
    return generate_walks_from(gp, z, walk_len, gumbel, rng);
}

Tensor discriminate(const DiscriminatorParams& dp, const std::vector<Tensor>& walk) {
    if (walk.empty()) throw std::invalid_argument("discriminate: empty walk sequence");
    const int batch = walk.front().rows();
    LstmState state{Tensor::zeros(batch, dp.hidden), Tensor::zeros(batch, dp.hidden)};
    for (const Tensor& v : walk) {
        if (v.cols() != dp.n) throw std::invalid_argument("discriminate: node dimension mismatch");
        state = lstm_step(dp.lstm, ad::matmul(v, dp.w_down), state);
    }
    return affine(dp.readout, state.h);
}

std::vector<Tensor> onehot_walks(const std::vector<std::vector<std::int32_t>>& walks, int n) {
    if (walks.empty()) throw std::invalid_argument("onehot_walks: empty batch");
    const int batch = static_cast<int>(walks.size());
    const std::size_t len = walks.front().size();
    std::vector<Tensor> out;
    out.reserve(len);
    for (std::size_t t = 0; t < len; ++t) {
        Tensor step(batch, n);
        for (int i = 0; i < batch; ++i) {
            std::int32_t v = walks[static_cast<std::size_t>(i)][t];
            if (v < 0 || v >= n) throw std::out_of_range("onehot_walks: node index out of range");
            step.at(i, v) = 1.0;
        }
        out.push_back(step);
    }
    return out;
}

// --- checkpoint io ------------------------------------------------------------

namespace {

struct NamedTensor {
    std::string name;
    Tensor* tensor;
};

std::vector<NamedTensor> checkpoint_arrays(Checkpoint& c) {
    return {
        {"gen.init_c1.w", &c.gen.init_c1.w}, {"gen.init_c1.b", &c.gen.init_c1.b},
        {"gen.init_c2.w", &c.gen.init_c2.w}, {"gen.init_c2.b", &c.gen.init_c2.b},
        {"gen.init_h1.w", &c.gen.init_h1.w}, {"gen.init_h1.b", &c.gen.init_h1.b},
        {"gen.init_h2.w", &c.gen.init_h2.w}, {"gen.init_h2.b", &c.gen.init_h2.b},
        {"gen.lstm.w", &c.gen.lstm.w},       {"gen.lstm.b", &c.gen.lstm.b},
        {"gen.w_down", &c.gen.w_down},       {"gen.w_up", &c.gen.w_up},
        {"dis.w_down", &c.dis.w_down},       {"dis.lstm.w", &c.dis.lstm.w},
        {"dis.lstm.b", &c.dis.lstm.b},       {"dis.readout.w", &c.dis.readout.w},
        {"dis.readout.b", &c.dis.readout.b},
    };
}

void write_le_doubles(std::ofstream& out, const Tensor& t) {
    static_assert(sizeof(double) == 8);
    for (std::int64_t i = 0; i < t.size(); ++i) {
        double v = t.data()[i];
        std::uint64_t bits;
        std::memcpy(&bits, &v, 8);
        unsigned char buf[8];
        for (int b = 0; b < 8; ++b) buf[b] = static_cast<unsigned char>((bits >> (8 * b)) & 0xff);
        out.write(reinterpret_cast<const char*>(buf), 8);
    }
}

void read_le_doubles(std::ifstream& in, Tensor& t) {
    for (std::int64_t i = 0; i < t.size(); ++i) {
        unsigned char buf[8];
        in.read(reinterpret_cast<char*>(buf), 8);
        if (!in) throw std::runtime_error("checkpoint: truncated array data");
        std::uint64_t bits = 0;
        for (int b = 0; b < 8; ++b) bits |= static_cast<std::uint64_t>(buf[b]) << (8 * b);
        double v;
        std::memcpy(&v, &bits, 8);
        t.data()[i] = v;
    }
}

}  // namespace

Checkpoint Checkpoint::clone() const {
    Checkpoint copy = *this;
    for (auto& [name, t] : checkpoint_arrays(copy)) *t = t->clone();
    return copy;
}

void Checkpoint::save(const std::string& path) const {
    Checkpoint& self = const_cast<Checkpoint&>(*this);
    auto arrays = checkpoint_arrays(self);

    nlohmann::ordered_json header;
    header["version"] = 1;
    header["n"] = gen.n;
    header["m_train"] = train_edge_count;
    header["walk_len"] = walk_len;
    header["latent_dim"] = gen.latent_dim;
    header["g_hidden"] = gen.hidden;
    header["g_down"] = gen.down_dim;
    header["d_hidden"] = dis.hidden;
    header["d_down"] = dis.down_dim;
    header["tau"] = tau;
    header["iteration"] = iteration;
    nlohmann::ordered_json arr = nlohmann::ordered_json::array();
    for (const auto& [name, t] : arrays)
        arr.push_back({{"name", name}, {"rows", t->rows()}, {"cols", t->cols()}});
    header["arrays"] = arr;

    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write checkpoint: " + path);
    out << header.dump() << '\n';
    for (const auto& [name, t] : arrays) write_le_doubles(out, *t);
}

Checkpoint Checkpoint::load(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open checkpoint: " + path);
    std::string header_line;
    if (!std::getline(in, header_line)) throw std::runtime_error("checkpoint: missing header");
    nlohmann::json header = nlohmann::json::parse(header_line);
    if (header.at("version").get<int>() != 1)
        throw std::runtime_error("checkpoint: unsupported version");

    Checkpoint c;
    int n = header.at("n").get<int>();
    c.train_edge_count = header.at("m_train").get<std::int64_t>();
    c.walk_len = header.at("walk_len").get<int>();
    c.tau = header.at("tau").get<double>();
    c.iteration = header.at("iteration").get<std::int64_t>();

    Rng dummy(0);
    c.gen = GeneratorParams::create(n, header.at("latent_dim").get<int>(),
                                    header.at("g_hidden").get<int>(),
                                    header.at("g_down").get<int>(), dummy);
    c.dis = DiscriminatorParams::create(n, header.at("d_hidden").get<int>(),
                                        header.at("d_down").get<int>(), dummy);

    auto arrays = checkpoint_arrays(c);
    const auto& meta = header.at("arrays");
    if (meta.size() != arrays.size()) throw std::runtime_error("checkpoint: array list mismatch");
    for (std::size_t i = 0; i < arrays.size(); ++i) {
        const auto& m = meta.at(i);
        if (m.at("name").get<std::string>() != arrays[i].name ||
            m.at("rows").get<int>() != arrays[i].tensor->rows() ||
            m.at("cols").get<int>() != arrays[i].tensor->cols())
            throw std::runtime_error("checkpoint: array layout mismatch at " + arrays[i].name);
        read_le_doubles(in, *arrays[i].tensor);
    }
    return c;
}

}  // namespace netwalk
