#include "netwalk/graphstats.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <queue>
#include <stdexcept>

#include "json.hpp"

namespace netwalk {

int CommunityAssignment::num_communities() const {
    int k = 0;
    for (int c : label_of) k = std::max(k, c + 1);
    return k;
}

CommunityAssignment load_communities(const std::string& path, NodeId n) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open community labels: " + path);
    CommunityAssignment comm;
    comm.label_of.assign(static_cast<std::size_t>(n), -1);
    std::int64_t node, label;
    while (in >> node >> label) {
        if (node < 0 || node >= n) throw std::runtime_error("community labels: node id out of range");
        comm.label_of[static_cast<std::size_t>(node)] = static_cast<int>(label);
    }
    for (int c : comm.label_of)
        if (c < 0) throw std::runtime_error("community labels: unlabeled node");
    return comm;
}

namespace {

std::optional<double> assortativity_of(const Graph& g) {
    // Pearson correlation over ordered edge endpoints: each undirected edge
    // contributes both (d_u, d_v) and (d_v, d_u).
    double n = 0, sx = 0, sy = 0, sxx = 0, syy = 0, sxy = 0;
    for (NodeId u = 0; u < g.num_nodes(); ++u) {
        double du = g.degree(u);
        for (NodeId v : g.neighbors(u)) {
            double dv = g.degree(v);
            n += 1;
            sx += du;
            sy += dv;
            sxx += du * du;
            syy += dv * dv;
            sxy += du * dv;
        }
    }
    if (n == 0) return std::nullopt;
    double cov = sxy / n - (sx / n) * (sy / n);
    double vx = sxx / n - (sx / n) * (sx / n);
    double vy = syy / n - (sy / n) * (sy / n);
    if (vx <= 1e-15 || vy <= 1e-15) return std::nullopt;  // regular graph
    return cov / std::sqrt(vx * vy);
}

std::int64_t triangles_of(const Graph& g) {
    // each triangle counted once: common neighbors w > v of an edge u < v
    std::int64_t count = 0;
    for (NodeId u = 0; u < g.num_nodes(); ++u) {
        for (NodeId v : g.neighbors(u)) {
            if (v <= u) continue;
            const auto& nu = g.neighbors(u);
            const auto& nv = g.neighbors(v);
            auto iu = std::upper_bound(nu.begin(), nu.end(), v);
            auto iv = std::upper_bound(nv.begin(), nv.end(), v);
            while (iu != nu.end() && iv != nv.end()) {
                if (*iu < *iv)
                    ++iu;
                else if (*iv < *iu)
                    ++iv;
                else {
                    ++count;
                    ++iu;
                    ++iv;
                }
            }
        }
    }
    return count;
}

std::optional<double> power_law_of(const std::vector<NodeId>& degrees) {
    // 1 + n * (sum log(d / d_min))^-1 over positive degrees
    NodeId d_min = 0;
    std::int64_t n_pos = 0;
    for (NodeId d : degrees) {
        if (d <= 0) continue;
        ++n_pos;
        if (d_min == 0 || d < d_min) d_min = d;
    }
    if (n_pos == 0) return std::nullopt;
    double acc = 0.0;
    for (NodeId d : degrees)
        if (d > 0) acc += std::log(static_cast<double>(d) / d_min);
    if (acc <= 0.0) return std::nullopt;  // all degrees equal
    return 1.0 + static_cast<double>(n_pos) / acc;
}

double gini_of(std::vector<NodeId> degrees) {
    std::sort(degrees.begin(), degrees.end());
    double n = static_cast<double>(degrees.size());
    double weighted = 0.0, total = 0.0;
    for (std::size_t i = 0; i < degrees.size(); ++i) {
        weighted += static_cast<double>(i + 1) * degrees[i];
        total += degrees[i];
    }
    if (total == 0) return 0.0;
    return 2.0 * weighted / (n * total) - (n + 1.0) / n;
}

double rel_entropy_of(const std::vector<NodeId>& degrees, std::int64_t m) {
    // entropy of the degree distribution over endpoint mass (2m), normalized
    // by ln n so that regular graphs score exactly 1
    if (m == 0 || degrees.size() < 2) return 0.0;
    double total = 2.0 * static_cast<double>(m);
    double h = 0.0;
    for (NodeId d : degrees) {
        if (d == 0) continue;
        double p = static_cast<double>(d) / total;
        h -= p * std::log(p);
    }
    return h / std::log(static_cast<double>(degrees.size()));
}

std::optional<double> char_path_len_of(const Graph& g) {
    LccResult lcc = largest_connected_component(g);
    NodeId n = lcc.graph.num_nodes();
    if (n < 2) return std::nullopt;
    // exact all-pairs BFS on the LCC
    std::int64_t pair_count = 0;
    double dist_sum = 0.0;
    std::vector<int> dist(static_cast<std::size_t>(n));
    for (NodeId s = 0; s < n; ++s) {
        std::fill(dist.begin(), dist.end(), -1);
        std::queue<NodeId> q;
        q.push(s);
        dist[static_cast<std::size_t>(s)] = 0;
        while (!q.empty()) {
            NodeId u = q.front();
            q.pop();
            for (NodeId v : lcc.graph.neighbors(u)) {
                if (dist[static_cast<std::size_t>(v)] < 0) {
                    dist[static_cast<std::size_t>(v)] = dist[static_cast<std::size_t>(u)] + 1;
                    q.push(v);
                }
            }
        }
        for (NodeId t = s + 1; t < n; ++t) {
            dist_sum += dist[static_cast<std::size_t>(t)];
            ++pair_count;
        }
    }
    return dist_sum / static_cast<double>(pair_count);
}

std::int64_t lcc_size_of(const Graph& g) {
    return largest_connected_component(g).graph.num_nodes();
}

// The appendix formulas are applied literally: the 1/K average over ordered
// block pairs for inter density, and per-block edge fraction for intra. The
// ambiguous binomial denominator in the source table is read as |C_j|*|C_k|.
void community_densities(const Graph& g, const CommunityAssignment& comm, StatsReport& rep) {
    int k = comm.num_communities();
    std::vector<double> size(static_cast<std::size_t>(k), 0.0);
    for (int c : comm.label_of) size[static_cast<std::size_t>(c)] += 1.0;
    std::vector<std::vector<double>> between(static_cast<std::size_t>(k),
                                             std::vector<double>(static_cast<std::size_t>(k), 0.0));
    for (const auto& [u, v] : g.edges()) {
        int cu = comm.label_of[static_cast<std::size_t>(u)];
        int cv = comm.label_of[static_cast<std::size_t>(v)];
        between[static_cast<std::size_t>(cu)][static_cast<std::size_t>(cv)] += 1.0;
        if (cu != cv) between[static_cast<std::size_t>(cv)][static_cast<std::size_t>(cu)] += 1.0;
    }
    double inter = 0.0, intra = 0.0;
    bool intra_ok = true;
    for (int j = 0; j < k; ++j) {
        double nj = size[static_cast<std::size_t>(j)];
        for (int c = 0; c < k; ++c) {
            if (c == j) continue;
            double nc = size[static_cast<std::size_t>(c)];
            if (nj > 0 && nc > 0)
                inter += between[static_cast<std::size_t>(j)][static_cast<std::size_t>(c)] / (nj * nc);
        }
        double pairs = nj * (nj - 1.0) / 2.0;
        if (pairs > 0)
            intra += between[static_cast<std::size_t>(j)][static_cast<std::size_t>(j)] / pairs;
        else
            intra_ok = false;
    }
    rep.inter_comm_density = k > 1 ? std::optional<double>(inter / k) : std::nullopt;
    rep.intra_comm_density = intra_ok ? std::optional<double>(intra / k) : std::nullopt;

    // share of endpoint mass per community
    std::vector<double> mass(static_cast<std::size_t>(k), 0.0);
    double total = 0.0;
    for (NodeId u = 0; u < g.num_nodes(); ++u) {
        mass[static_cast<std::size_t>(comm.label_of[static_cast<std::size_t>(u)])] += g.degree(u);
        total += g.degree(u);
    }
    rep.community_distribution.assign(mass.begin(), mass.end());
    if (total > 0)
        for (double& v : rep.community_distribution) v /= total;
}

}  // namespace

StatsReport compute_stats(const Graph& g, const CommunityAssignment* comm) {
    if (g.num_nodes() == 0) throw std::invalid_argument("compute_stats: empty graph");
    StatsReport rep;
    auto degrees = g.degrees();

    rep.max_degree = *std::max_element(degrees.begin(), degrees.end());
    rep.assortativity = assortativity_of(g);
    rep.triangle_count = triangles_of(g);
    rep.power_law_exp = power_law_of(degrees);
    for (NodeId d : degrees) {
        rep.wedge_count += static_cast<std::int64_t>(d) * (d - 1) / 2;
        rep.claw_count += static_cast<std::int64_t>(d) * (d - 1) * (d - 2) / 6;
    }
    if (rep.wedge_count > 0)
        rep.clustering_coeff = 3.0 * static_cast<double>(rep.triangle_count) /
                               static_cast<double>(rep.wedge_count);
    rep.char_path_len = char_path_len_of(g);
    rep.rel_edge_entropy = rel_entropy_of(degrees, g.num_edges());
    rep.lcc_size = lcc_size_of(g);
    rep.gini = gini_of(degrees);
    if (comm != nullptr) {
        if (static_cast<NodeId>(comm->label_of.size()) != g.num_nodes())
            throw std::invalid_argument("compute_stats: community labels must cover every node");
        community_densities(g, *comm, rep);
    }
    return rep;
}

namespace {

void put_opt(nlohmann::ordered_json& j, const char* name, const std::optional<double>& v) {
    if (v)
        j[name] = *v;
    else
        j[name] = nullptr;
}

std::optional<double> get_opt(const nlohmann::json& j, const char* name) {
    if (!j.contains(name) || j.at(name).is_null()) return std::nullopt;
    return j.at(name).get<double>();
}

}  // namespace

std::string StatsReport::to_json() const {
    nlohmann::ordered_json j;
    j["max_degree"] = max_degree;
    put_opt(j, "assortativity", assortativity);
    j["triangle_count"] = triangle_count;
    put_opt(j, "power_law_exp", power_law_exp);
    put_opt(j, "inter_comm_density", inter_comm_density);
    put_opt(j, "intra_comm_density", intra_comm_density);
    put_opt(j, "clustering_coeff", clustering_coeff);
    put_opt(j, "char_path_len", char_path_len);
    j["wedge_count"] = wedge_count;
    j["rel_edge_entropy"] = rel_edge_entropy;
    j["lcc_size"] = lcc_size;
    j["claw_count"] = claw_count;
    j["gini"] = gini;
    j["community_distribution"] = community_distribution;
    return j.dump(2);
}

StatsReport StatsReport::from_json(const std::string& text) {
    nlohmann::json j = nlohmann::json::parse(text);
    StatsReport rep;
    rep.max_degree = j.at("max_degree").get<std::int64_t>();
    rep.assortativity = get_opt(j, "assortativity");
    rep.triangle_count = j.at("triangle_count").get<std::int64_t>();
    rep.power_law_exp = get_opt(j, "power_law_exp");
    rep.inter_comm_density = get_opt(j, "inter_comm_density");
    rep.intra_comm_density = get_opt(j, "intra_comm_density");
    rep.clustering_coeff = get_opt(j, "clustering_coeff");
    rep.char_path_len = get_opt(j, "char_path_len");
    rep.wedge_count = j.at("wedge_count").get<std::int64_t>();
    rep.rel_edge_entropy = j.at("rel_edge_entropy").get<double>();
    rep.lcc_size = j.at("lcc_size").get<std::int64_t>();
    rep.claw_count = j.at("claw_count").get<std::int64_t>();
    rep.gini = j.at("gini").get<double>();
    rep.community_distribution = j.at("community_distribution").get<std::vector<double>>();
    return rep;
}

namespace {

struct StatColumn {
    std::string name;
    std::optional<double> (*get)(const StatsReport&);
};

const std::vector<StatColumn>& stat_columns() {
    static const std::vector<StatColumn> cols = {
        {"max_degree", [](const StatsReport& r) { return std::optional<double>(static_cast<double>(r.max_degree)); }},
        {"assortativity", [](const StatsReport& r) { return r.assortativity; }},
        {"triangle_count", [](const StatsReport& r) { return std::optional<double>(static_cast<double>(r.triangle_count)); }},
        {"power_law_exp", [](const StatsReport& r) { return r.power_law_exp; }},
        {"inter_comm_density", [](const StatsReport& r) { return r.inter_comm_density; }},
        {"intra_comm_density", [](const StatsReport& r) { return r.intra_comm_density; }},
        {"clustering_coeff", [](const StatsReport& r) { return r.clustering_coeff; }},
        {"char_path_len", [](const StatsReport& r) { return r.char_path_len; }},
        {"wedge_count", [](const StatsReport& r) { return std::optional<double>(static_cast<double>(r.wedge_count)); }},
        {"rel_edge_entropy", [](const StatsReport& r) { return std::optional<double>(r.rel_edge_entropy); }},
        {"lcc_size", [](const StatsReport& r) { return std::optional<double>(static_cast<double>(r.lcc_size)); }},
        {"claw_count", [](const StatsReport& r) { return std::optional<double>(static_cast<double>(r.claw_count)); }},
        {"gini", [](const StatsReport& r) { return std::optional<double>(r.gini); }},
    };
    return cols;
}

}  // namespace

RankingTable compare_reports(const StatsReport& reference,
                             const std::vector<StatsReport>& candidates) {
    if (candidates.empty()) throw std::invalid_argument("compare_reports: no candidates");
    RankingTable table;
    table.ranks.assign(candidates.size(), {});
    table.mean_rank.assign(candidates.size(), 0.0);

    for (const auto& col : stat_columns()) {
        auto ref = col.get(reference);
        if (!ref) continue;
        std::vector<double> dev(candidates.size());
        bool usable = true;
        for (std::size_t c = 0; c < candidates.size(); ++c) {
            auto v = col.get(candidates[c]);
            if (!v) {
                usable = false;  // undefined for one candidate: excluded for all
                break;
            }
            dev[c] = std::abs(*v - *ref);
        }
        if (!usable) continue;
        table.stat_names.push_back(col.name);
        // average ranks for ties
        std::vector<std::size_t> order(candidates.size());
        for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
        std::sort(order.begin(), order.end(),
                  [&](std::size_t a, std::size_t b) { return dev[a] < dev[b]; });
        std::vector<double> rank(candidates.size());
        std::size_t i = 0;
        while (i < order.size()) {
            std::size_t j = i;
            while (j + 1 < order.size() && dev[order[j + 1]] == dev[order[i]]) ++j;
            double avg = (static_cast<double>(i) + static_cast<double>(j)) / 2.0 + 1.0;
            for (std::size_t k = i; k <= j; ++k) rank[order[k]] = avg;
            i = j + 1;
        }
        for (std::size_t c = 0; c < candidates.size(); ++c) table.ranks[c].push_back(rank[c]);
    }
    for (std::size_t c = 0; c < candidates.size(); ++c) {
        double total = 0.0;
        for (double r : table.ranks[c]) total += r;
        table.mean_rank[c] = table.ranks[c].empty() ? 0.0 : total / static_cast<double>(table.ranks[c].size());
    }
    return table;
}

void write_comparison_csv(const StatsReport& reference,
                          const std::vector<std::string>& candidate_names,
                          const std::vector<StatsReport>& candidates, const std::string& path) {
    if (candidate_names.size() != candidates.size())
        throw std::invalid_argument("write_comparison_csv: names/candidates length mismatch");
    RankingTable table = compare_reports(reference, candidates);
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write csv: " + path);
    out.precision(12);

    out << "graph";
    for (const auto& col : stat_columns()) out << ',' << col.name;
    out << ",average_rank\n";
    auto emit = [&](const std::string& name, const StatsReport& rep, const std::string& rank) {
        out << name;
        for (const auto& col : stat_columns()) {
            auto v = col.get(rep);
            out << ',';
            if (v) out << *v;
        }
        out << ',' << rank << '\n';
    };
    emit("reference", reference, "");
    for (std::size_t c = 0; c < candidates.size(); ++c)
        emit(candidate_names[c], candidates[c], std::to_string(table.mean_rank[c]));
}

}  // namespace netwalk
