#include "netwalk/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <stdexcept>

#include "netwalk/rng.hpp"
#include "json.hpp"

namespace netwalk {

int DcSbmSpec::num_blocks() const {
    int k = 0;
    for (int b : block_of) k = std::max(k, b + 1);
    return k;
}

void DcSbmSpec::validate() const {
    int k = num_blocks();
    if (block_of.empty()) throw std::invalid_argument("DcSbmSpec: no nodes");
    for (int b : block_of)
        if (b < 0) throw std::invalid_argument("DcSbmSpec: negative block id");
    if (static_cast<int>(omega.size()) != k)
        throw std::invalid_argument("DcSbmSpec: omega must be K x K");
    for (int i = 0; i < k; ++i) {
        if (static_cast<int>(omega[i].size()) != k)
            throw std::invalid_argument("DcSbmSpec: omega must be K x K");
        for (int j = 0; j < k; ++j) {
            if (omega[i][j] < 0 || !std::isfinite(omega[i][j]))
                throw std::invalid_argument("DcSbmSpec: omega entries must be finite and nonnegative");
            if (std::abs(omega[i][j] - omega[j][i]) > 1e-12)
                throw std::invalid_argument("DcSbmSpec: omega must be symmetric");
        }
    }
    if (theta.size() != block_of.size())
        throw std::invalid_argument("DcSbmSpec: theta length must match node count");
    for (double t : theta)
        if (t <= 0 || !std::isfinite(t)) throw std::invalid_argument("DcSbmSpec: theta must be positive");
}

void DcSbmSpec::normalize() {
    int k = num_blocks();
    std::vector<double> block_sum(static_cast<std::size_t>(k), 0.0);
    for (std::size_t u = 0; u < block_of.size(); ++u)
        block_sum[static_cast<std::size_t>(block_of[u])] += theta[u];
    for (std::size_t u = 0; u < block_of.size(); ++u)
        theta[u] /= block_sum[static_cast<std::size_t>(block_of[u])];
}

DcSbmSpec DcSbmSpec::from_json_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open DC-SBM spec: " + path);
    nlohmann::json j = nlohmann::json::parse(in);
    DcSbmSpec spec;
    spec.block_of = j.at("blocks").get<std::vector<int>>();
    spec.omega = j.at("omega").get<std::vector<std::vector<double>>>();
    if (j.contains("theta"))
        spec.theta = j.at("theta").get<std::vector<double>>();
    else
        spec.theta.assign(spec.block_of.size(), 1.0);
    spec.normalize();
    spec.validate();
    return spec;
}

void DcSbmSpec::to_json_file(const std::string& path) const {
    nlohmann::json j;
    j["blocks"] = block_of;
    j["omega"] = omega;
    j["theta"] = theta;
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write DC-SBM spec: " + path);
    out << j.dump(2) << '\n';
}

DcSbmSample sample_dcsbm(const DcSbmSpec& spec, std::uint64_t seed) {
    spec.validate();
    NodeId n = static_cast<NodeId>(spec.block_of.size());
    Rng rng(seed);
    DcSbmSample out;
    out.probs.assign(static_cast<std::size_t>(n) * n, 0.0);
    std::vector<Edge> edges;
    for (NodeId u = 0; u < n; ++u) {
        for (NodeId v = u + 1; v < n; ++v) {
            double p = spec.theta[static_cast<std::size_t>(u)] *
                       spec.theta[static_cast<std::size_t>(v)] *
                       spec.omega[static_cast<std::size_t>(spec.block_of[static_cast<std::size_t>(u)])]
                                 [static_cast<std::size_t>(spec.block_of[static_cast<std::size_t>(v)])];
            if (std::isnan(p)) throw std::runtime_error("sample_dcsbm: NaN edge probability");
            p = std::min(1.0, p);
            out.probs[static_cast<std::size_t>(u) * n + v] = p;
            out.probs[static_cast<std::size_t>(v) * n + u] = p;
            if (rng.uniform01() < p) edges.emplace_back(u, v);
        }
    }
    out.graph = Graph::from_edges(n, edges);
    return out;
}

Graph configuration_model(const Graph& g, double keep_frac, std::uint64_t seed) {
    if (keep_frac < 0.0 || keep_frac > 1.0)
        throw std::invalid_argument("configuration_model: keep_frac must lie in [0,1]");
    Rng rng(seed);
    auto all_edges = g.edges();
    std::int64_t m = static_cast<std::int64_t>(all_edges.size());
    std::int64_t keep = std::llround(keep_frac * static_cast<double>(m));
    if (keep >= m) return g;

    auto canon = [](NodeId a, NodeId b) {
        return std::pair<NodeId, NodeId>{std::min(a, b), std::max(a, b)};
    };
    for (int restart = 0; restart < 64; ++restart) {
        // uniform choice of kept edges
        std::vector<Edge> pool = all_edges;
        for (std::size_t i = pool.size(); i > 1; --i)
            std::swap(pool[i - 1], pool[rng.uniform_int(i)]);
        std::set<std::pair<NodeId, NodeId>> kept(pool.begin(),
                                                 pool.begin() + static_cast<std::ptrdiff_t>(keep));

        // stubs of the rewired share, rematched uniformly
        std::vector<NodeId> stubs;
        stubs.reserve(static_cast<std::size_t>(2 * (m - keep)));
        for (std::size_t i = static_cast<std::size_t>(keep); i < pool.size(); ++i) {
            stubs.push_back(pool[i].first);
            stubs.push_back(pool[i].second);
        }
        for (std::size_t i = stubs.size(); i > 1; --i)
            std::swap(stubs[i - 1], stubs[rng.uniform_int(i)]);

        std::vector<Edge> rewired;
        for (std::size_t i = 0; i + 1 < stubs.size(); i += 2)
            rewired.emplace_back(stubs[i], stubs[i + 1]);

        // repair self-loops, duplicates and kept-edge collisions by partner
        // swaps, which leave all degrees untouched
        std::multiset<std::pair<NodeId, NodeId>> used;
        for (const auto& [a, b] : rewired) used.insert(canon(a, b));
        auto is_bad = [&](std::size_t idx) {
            auto [a, b] = rewired[idx];
            if (a == b) return true;
            auto key = canon(a, b);
            if (kept.count(key)) return true;
            return used.count(key) > 1;
        };
        std::vector<std::size_t> worklist;
        for (std::size_t i = 0; i < rewired.size(); ++i)
            if (is_bad(i)) worklist.push_back(i);

        std::int64_t budget = 400 * static_cast<std::int64_t>(rewired.size()) + 4000;
        bool ok = true;
        while (!worklist.empty()) {
            std::size_t i = worklist.back();
            if (!is_bad(i)) {
                worklist.pop_back();
                continue;
            }
            if (--budget < 0) {
                ok = false;
                break;
            }
            std::size_t j = rng.uniform_int(rewired.size());
            if (j == i) continue;
            auto [a, b] = rewired[i];
            auto [c, d] = rewired[j];
            used.erase(used.find(canon(a, b)));
            used.erase(used.find(canon(c, d)));
            rewired[i] = {a, d};
            rewired[j] = {c, b};
            used.insert(canon(a, d));
            used.insert(canon(c, b));
            worklist.push_back(j);
        }
        if (!ok) continue;

        std::vector<Edge> final_edges(kept.begin(), kept.end());
        final_edges.insert(final_edges.end(), rewired.begin(), rewired.end());
        Graph out = Graph::from_edges(g.num_nodes(), final_edges);
        if (out.num_edges() == m) return out;  // nothing collapsed
    }
    throw std::runtime_error("configuration_model: rewiring failed to produce a simple graph");
}

}  // namespace netwalk
