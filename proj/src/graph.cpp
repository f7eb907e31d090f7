#include "netwalk/graph.hpp"

#include <algorithm>
#include <cctype>
#include <fstream>
#include <map>
#include <queue>
#include <set>
#include <stdexcept>
#include <unordered_map>

#include "netwalk/rng.hpp"
#include "json.hpp"

namespace netwalk {

Graph Graph::from_edges(NodeId n, const std::vector<Edge>& edges) {
    Graph g(n);
    for (const auto& [u, v] : edges) {
        if (u < 0 || v < 0 || u >= n || v >= n)
            throw std::out_of_range("edge endpoint out of range");
        if (u == v) continue;  // self-loops dropped
        g.adj_[static_cast<std::size_t>(u)].push_back(v);
        g.adj_[static_cast<std::size_t>(v)].push_back(u);
    }
    for (auto& nbrs : g.adj_) {
        std::sort(nbrs.begin(), nbrs.end());
        nbrs.erase(std::unique(nbrs.begin(), nbrs.end()), nbrs.end());
        g.m_ += static_cast<std::int64_t>(nbrs.size());
    }
    g.m_ /= 2;
    return g;
}

bool Graph::has_edge(NodeId u, NodeId v) const {
    const auto& nbrs = adj_[static_cast<std::size_t>(u)];
    return std::binary_search(nbrs.begin(), nbrs.end(), v);
}

std::vector<Edge> Graph::edges() const {
    std::vector<Edge> out;
    out.reserve(static_cast<std::size_t>(m_));
    for (NodeId u = 0; u < num_nodes(); ++u)
        for (NodeId v : adj_[static_cast<std::size_t>(u)])
            if (u < v) out.emplace_back(u, v);
    return out;
}

std::vector<NodeId> Graph::degrees() const {
    std::vector<NodeId> d(adj_.size());
    for (std::size_t u = 0; u < adj_.size(); ++u) d[u] = static_cast<NodeId>(adj_[u].size());
    return d;
}

bool Graph::is_connected() const {
    NodeId n = num_nodes();
    if (n == 0) return false;
    std::vector<char> seen(static_cast<std::size_t>(n), 0);
    std::queue<NodeId> q;
    q.push(0);
    seen[0] = 1;
    NodeId count = 1;
    while (!q.empty()) {
        NodeId u = q.front();
        q.pop();
        for (NodeId v : neighbors(u)) {
            if (!seen[static_cast<std::size_t>(v)]) {
                seen[static_cast<std::size_t>(v)] = 1;
                ++count;
                q.push(v);
            }
        }
    }
    return count == n;
}

LoadedGraph load_edge_list(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open edge list: " + path);

    std::vector<std::pair<std::int64_t, std::int64_t>> raw;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        // allow blank lines and # comments
        std::size_t first = line.find_first_not_of(" \t\r\n");
        if (first == std::string::npos || line[first] == '#') continue;
        std::int64_t u, v;
        char extra;
        int got = std::sscanf(line.c_str(), "%ld %ld %c", &u, &v, &extra);
        if (got < 2 || u < 0 || v < 0)
            throw std::runtime_error(path + ": parse error at line " + std::to_string(line_no));
        raw.emplace_back(u, v);
    }
    if (raw.empty()) throw std::runtime_error(path + ": empty edge list");

    // dense relabeling in order of first appearance of sorted original ids
    std::map<std::int64_t, NodeId> remap;
    for (const auto& [u, v] : raw) {
        remap.emplace(u, 0);
        remap.emplace(v, 0);
    }
    LoadedGraph out;
    out.original_ids.reserve(remap.size());
    NodeId next = 0;
    for (auto& [orig, dense] : remap) {
        dense = next++;
        out.original_ids.push_back(orig);
    }
    std::vector<Edge> edges;
    edges.reserve(raw.size());
    for (const auto& [u, v] : raw) edges.emplace_back(remap[u], remap[v]);
    out.graph = Graph::from_edges(next, edges);
    return out;
}

void save_edge_list(const Graph& g, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write edge list: " + path);
    for (const auto& [u, v] : g.edges()) out << u << '\t' << v << '\n';
}

LccResult largest_connected_component(const Graph& g) {
    NodeId n = g.num_nodes();
    if (n == 0) throw std::invalid_argument("largest_connected_component: empty graph");

    std::vector<NodeId> comp(static_cast<std::size_t>(n), -1);
    NodeId num_comps = 0;
    std::vector<std::int64_t> comp_size;
    for (NodeId s = 0; s < n; ++s) {
        if (comp[static_cast<std::size_t>(s)] >= 0) continue;
        NodeId id = num_comps++;
        comp_size.push_back(0);
        std::queue<NodeId> q;
        q.push(s);
        comp[static_cast<std::size_t>(s)] = id;
        while (!q.empty()) {
            NodeId u = q.front();
            q.pop();
            ++comp_size[static_cast<std::size_t>(id)];
            for (NodeId v : g.neighbors(u)) {
                if (comp[static_cast<std::size_t>(v)] < 0) {
                    comp[static_cast<std::size_t>(v)] = id;
                    q.push(v);
                }
            }
        }
    }
    NodeId best = static_cast<NodeId>(
        std::max_element(comp_size.begin(), comp_size.end()) - comp_size.begin());

    LccResult res;
    res.old_to_new.assign(static_cast<std::size_t>(n), -1);
    for (NodeId u = 0; u < n; ++u) {
        if (comp[static_cast<std::size_t>(u)] == best) {
            res.old_to_new[static_cast<std::size_t>(u)] = static_cast<NodeId>(res.new_to_old.size());
            res.new_to_old.push_back(u);
        }
    }
    std::vector<Edge> edges;
    for (NodeId u = 0; u < n; ++u) {
        if (res.old_to_new[static_cast<std::size_t>(u)] < 0) continue;
        for (NodeId v : g.neighbors(u))
            if (u < v) edges.emplace_back(res.old_to_new[static_cast<std::size_t>(u)],
                                          res.old_to_new[static_cast<std::size_t>(v)]);
    }
    res.graph = Graph::from_edges(static_cast<NodeId>(res.new_to_old.size()), edges);
    return res;
}

namespace {

// Connectivity of the train graph when `removed` marks deleted edge slots.
bool connected_without(const std::vector<std::vector<NodeId>>& adj,
                       const std::set<std::pair<NodeId, NodeId>>& removed, NodeId n) {
    std::vector<char> seen(static_cast<std::size_t>(n), 0);
    std::queue<NodeId> q;
    q.push(0);
    seen[0] = 1;
    NodeId count = 1;
    while (!q.empty()) {
        NodeId u = q.front();
        q.pop();
        for (NodeId v : adj[static_cast<std::size_t>(u)]) {
            auto key = std::minmax(u, v);
            if (removed.count({key.first, key.second})) continue;
            if (!seen[static_cast<std::size_t>(v)]) {
                seen[static_cast<std::size_t>(v)] = 1;
                ++count;
                q.push(v);
            }
        }
    }
    return count == n;
}

}  // namespace

EdgeSplit split_edges(const Graph& g, double val_frac, double test_frac, std::uint64_t seed) {
    if (!g.is_connected()) throw std::invalid_argument("split_edges: input graph must be connected");
    if (val_frac < 0 || test_frac < 0 || val_frac + test_frac >= 1.0)
        throw std::invalid_argument("split_edges: fractions must be nonnegative with sum < 1");

    NodeId n = g.num_nodes();
    std::int64_t m = g.num_edges();
    auto all_edges = g.edges();
    std::int64_t want_val = std::llround(val_frac * static_cast<double>(m));
    std::int64_t want_test = std::llround(test_frac * static_cast<double>(m));

    std::int64_t possible_nonedges =
        static_cast<std::int64_t>(n) * (n - 1) / 2 - m;
    if (want_val + want_test > possible_nonedges)
        throw std::runtime_error("split_edges: not enough nonedges to mirror the holdout sets");

    Rng rng(seed);
    // randomized removal order
    for (std::size_t i = all_edges.size(); i > 1; --i)
        std::swap(all_edges[i - 1], all_edges[rng.uniform_int(i)]);

    // adjacency copy used for connectivity checks with lazily removed edges
    std::vector<std::vector<NodeId>> adj(static_cast<std::size_t>(n));
    for (NodeId u = 0; u < n; ++u) adj[static_cast<std::size_t>(u)] = g.neighbors(u);

    EdgeSplit split;
    split.seed = seed;
    std::set<std::pair<NodeId, NodeId>> removed;
    for (const auto& e : all_edges) {
        if (static_cast<std::int64_t>(split.val_edges.size()) >= want_val &&
            static_cast<std::int64_t>(split.test_edges.size()) >= want_test)
            break;
        removed.insert(e);
        if (!connected_without(adj, removed, n)) {
            removed.erase(e);  // bridge at this point: keep it in train
            continue;
        }
        if (static_cast<std::int64_t>(split.val_edges.size()) < want_val)
            split.val_edges.push_back(e);
        else
            split.test_edges.push_back(e);
    }
    if (static_cast<std::int64_t>(split.val_edges.size()) < want_val ||
        static_cast<std::int64_t>(split.test_edges.size()) < want_test)
        throw std::runtime_error(
            "split_edges: requested fractions unreachable while preserving connectivity");

    std::vector<Edge> train_edges;
    train_edges.reserve(static_cast<std::size_t>(m));
    for (const auto& e : g.edges())
        if (!removed.count(e)) train_edges.push_back(e);
    split.train = Graph::from_edges(n, train_edges);

    // nonedges sampled uniformly from pairs absent in the original graph
    std::set<std::pair<NodeId, NodeId>> taken;
    auto draw_nonedges = [&](std::vector<Edge>& out, std::int64_t count) {
        while (static_cast<std::int64_t>(out.size()) < count) {
            NodeId u = static_cast<NodeId>(rng.uniform_int(static_cast<std::uint64_t>(n)));
            NodeId v = static_cast<NodeId>(rng.uniform_int(static_cast<std::uint64_t>(n)));
            if (u == v) continue;
            auto key = std::minmax(u, v);
            std::pair<NodeId, NodeId> p{key.first, key.second};
            if (g.has_edge(u, v) || taken.count(p)) continue;
            taken.insert(p);
            out.push_back(p);
        }
    };
    draw_nonedges(split.val_nonedges, want_val);
    draw_nonedges(split.test_nonedges, want_test);
    return split;
}

double edge_overlap(const Graph& reference, const Graph& candidate) {
    if (reference.num_nodes() != candidate.num_nodes())
        throw std::invalid_argument("edge_overlap: node counts differ");
    if (reference.num_edges() == 0) throw std::invalid_argument("edge_overlap: reference has no edges");
    std::int64_t shared = 0;
    for (const auto& [u, v] : reference.edges())
        if (candidate.has_edge(u, v)) ++shared;
    return static_cast<double>(shared) / static_cast<double>(reference.num_edges());
}

namespace {

nlohmann::json pairs_to_json(const std::vector<Edge>& pairs) {
    nlohmann::json arr = nlohmann::json::array();
    for (const auto& [u, v] : pairs) arr.push_back({u, v});
    return arr;
}

std::vector<Edge> pairs_from_json(const nlohmann::json& arr) {
    std::vector<Edge> out;
    for (const auto& e : arr) out.emplace_back(e.at(0).get<NodeId>(), e.at(1).get<NodeId>());
    return out;
}

}  // namespace

void save_split(const EdgeSplit& split, const std::string& path) {
    nlohmann::json j;
    j["seed"] = split.seed;
    j["val_edges"] = pairs_to_json(split.val_edges);
    j["test_edges"] = pairs_to_json(split.test_edges);
    j["val_nonedges"] = pairs_to_json(split.val_nonedges);
    j["test_nonedges"] = pairs_to_json(split.test_nonedges);
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write split: " + path);
    out << j.dump(2) << '\n';
}

EdgeSplit load_split(const Graph& original, const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open split: " + path);
    nlohmann::json j = nlohmann::json::parse(in);
    EdgeSplit split;
    split.seed = j.at("seed").get<std::uint64_t>();
    split.val_edges = pairs_from_json(j.at("val_edges"));
    split.test_edges = pairs_from_json(j.at("test_edges"));
    split.val_nonedges = pairs_from_json(j.at("val_nonedges"));
    split.test_nonedges = pairs_from_json(j.at("test_nonedges"));

    std::set<std::pair<NodeId, NodeId>> removed;
    for (const auto& [u, v] : split.val_edges) removed.insert(std::minmax(u, v));
    for (const auto& [u, v] : split.test_edges) removed.insert(std::minmax(u, v));
    std::vector<Edge> train_edges;
    for (const auto& e : original.edges())
        if (!removed.count(e)) train_edges.push_back(e);
    split.train = Graph::from_edges(original.num_nodes(), train_edges);
    return split;
}

}  // namespace netwalk
