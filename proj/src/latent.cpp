#include "netwalk/latent.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <limits>
#include <set>
#include <stdexcept>

#include "netwalk/assembler.hpp"
#include "netwalk/evaluator.hpp"

namespace netwalk {

double std_normal_cdf(double x) { return 0.5 * std::erfc(-x * 0.7071067811865475244); }

namespace {

// Acklam's rational approximation of the probit, ~1e-9 on its own.
double probit_estimate(double p) {
    static const double a[] = {-3.969683028665376e+01, 2.209460984245205e+02,
                               -2.759285104469687e+02, 1.383577518672690e+02,
                               -3.066479806614716e+01, 2.506628277459239e+00};
    static const double b[] = {-5.447609879822406e+01, 1.615858368580409e+02,
                               -1.556989798598866e+02, 6.680131188771972e+01,
                               -1.328068155288572e+01};
    static const double c[] = {-7.784894002430293e-03, -3.223964580411365e-01,
                               -2.400758277161838e+00, -2.549732539343734e+00,
                               4.374664141464968e+00,  2.938163982698783e+00};
    static const double d[] = {7.784695709041462e-03, 3.224671290700398e-01,
                               2.445134137142996e+00, 3.754408661907416e+00};
    const double p_low = 0.02425;
    if (p < p_low) {
        double q = std::sqrt(-2.0 * std::log(p));
        return (((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
               ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    }
    if (p > 1.0 - p_low) {
        double q = std::sqrt(-2.0 * std::log(1.0 - p));
        return -(((((c[0] * q + c[1]) * q + c[2]) * q + c[3]) * q + c[4]) * q + c[5]) /
               ((((d[0] * q + d[1]) * q + d[2]) * q + d[3]) * q + 1.0);
    }
    double q = p - 0.5;
    double r = q * q;
    return (((((a[0] * r + a[1]) * r + a[2]) * r + a[3]) * r + a[4]) * r + a[5]) * q /
           (((((b[0] * r + b[1]) * r + b[2]) * r + b[3]) * r + b[4]) * r + 1.0);
}

}  // namespace

double std_normal_quantile(double p) {
    if (p <= 0.0) return -std::numeric_limits<double>::infinity();
    if (p >= 1.0) return std::numeric_limits<double>::infinity();
    double x = probit_estimate(p);
    // two Halley refinements against the implemented CDF drive the residual
    // to machine precision
    for (int i = 0; i < 2; ++i) {
        double err = std_normal_cdf(x) - p;
        double pdf = 0.3989422804014326779 * std::exp(-0.5 * x * x);
        if (pdf <= 0.0) break;
        double u = err / pdf;
        x -= u / (1.0 + 0.5 * x * u);
    }
    return x;
}

LatentGrid::LatentGrid(int dims_, int bins_per_dim_) : dims(dims_), bins_per_dim(bins_per_dim_) {
    if (dims < 1 || bins_per_dim < 1) throw std::invalid_argument("LatentGrid: bad dimensions");
    boundaries_.resize(static_cast<std::size_t>(bins_per_dim) + 1);
    for (int k = 0; k <= bins_per_dim; ++k)
        boundaries_[static_cast<std::size_t>(k)] =
            std_normal_quantile(static_cast<double>(k) / bins_per_dim);
}

double LatentGrid::lower(int bin) const {
    if (bin < 0 || bin >= bins_per_dim) throw std::out_of_range("LatentGrid: bin out of range");
    return boundaries_[static_cast<std::size_t>(bin)];
}

double LatentGrid::upper(int bin) const {
    if (bin < 0 || bin >= bins_per_dim) throw std::out_of_range("LatentGrid: bin out of range");
    return boundaries_[static_cast<std::size_t>(bin) + 1];
}

std::vector<std::vector<double>> sample_in_bin(const LatentGrid& grid, const std::vector<int>& bin,
                                               int count, Rng& rng) {
    if (static_cast<int>(bin.size()) != grid.dims)
        throw std::invalid_argument("sample_in_bin: bin index arity mismatch");
    for (int b : bin)
        if (b < 0 || b >= grid.bins_per_dim) throw std::out_of_range("sample_in_bin: bin out of range");
    std::vector<std::vector<double>> out(static_cast<std::size_t>(count),
                                         std::vector<double>(static_cast<std::size_t>(grid.dims)));
    double width = 1.0 / grid.bins_per_dim;
    for (auto& sample : out)
        for (int d = 0; d < grid.dims; ++d) {
            double u = (bin[static_cast<std::size_t>(d)] + rng.uniform01()) * width;
            sample[static_cast<std::size_t>(d)] = std_normal_quantile(u);
        }
    return out;
}

std::vector<std::vector<int>> trajectory(const LatentGrid& grid, int axis, int fixed) {
    if (grid.dims != 2) throw std::invalid_argument("trajectory: defined for 2-d grids");
    if (axis < 0 || axis >= grid.dims) throw std::out_of_range("trajectory: bad axis");
    if (fixed < 0 || fixed >= grid.bins_per_dim) throw std::out_of_range("trajectory: bad fixed bin");
    std::vector<std::vector<int>> bins;
    for (int k = 0; k < grid.bins_per_dim; ++k) {
        std::vector<int> b(2);
        b[static_cast<std::size_t>(axis)] = k;
        b[static_cast<std::size_t>(1 - axis)] = fixed;
        bins.push_back(b);
    }
    return bins;
}

namespace {

double entropy_of_counts(const std::map<int, std::int64_t>& counts, std::int64_t total) {
    if (total <= 0) return 0.0;
    double h = 0.0;
    for (const auto& [key, c] : counts) {
        double p = static_cast<double>(c) / static_cast<double>(total);
        h -= p * std::log(p);
    }
    return h;
}

}  // namespace

std::vector<BinRecord> bin_properties(const Checkpoint& ckpt, const LatentGrid& grid,
                                      const Graph& train, const EdgeSplit* split,
                                      const CommunityAssignment* comm, int walks_per_bin,
                                      std::uint64_t seed) {
    if (ckpt.gen.latent_dim != grid.dims)
        throw std::invalid_argument("bin_properties: checkpoint latent_dim != grid dims");
    const double nan = std::numeric_limits<double>::quiet_NaN();
    Rng root(seed);

    std::vector<BinRecord> records;
    std::vector<int> bin(static_cast<std::size_t>(grid.dims), 0);
    std::vector<std::vector<int>> all_bins;
    // row-major enumeration of the full grid
    std::function<void(int)> enumerate = [&](int d) {
        if (d == grid.dims) {
            all_bins.push_back(bin);
            return;
        }
        for (int k = 0; k < grid.bins_per_dim; ++k) {
            bin[static_cast<std::size_t>(d)] = k;
            enumerate(d + 1);
        }
    };
    enumerate(0);

    for (const auto& b : all_bins) {
        Rng bin_rng = root.fork();
        BinRecord rec;
        rec.bin = b;

        auto zs = sample_in_bin(grid, b, walks_per_bin, bin_rng);
        ad::Tensor z(walks_per_bin, grid.dims);
        for (int i = 0; i < walks_per_bin; ++i)
            for (int d = 0; d < grid.dims; ++d)
                z.at(i, d) = zs[static_cast<std::size_t>(i)][static_cast<std::size_t>(d)];

        GumbelConfig gumbel{ckpt.tau, true};
        ScoreMatrix counts(train.num_nodes());
        std::map<int, std::int64_t> start_counts;
        double start_degree_sum = 0.0;
        double start_comm_share_sum = 0.0;
        std::int64_t single_comm_walks = 0;
        std::int64_t total_walks = 0;

        // chunked generation keeps the eager pass small
        int done = 0;
        while (done < walks_per_bin) {
            int chunk = std::min(512, walks_per_bin - done);
            ad::Tensor zc(chunk, grid.dims);
            for (int i = 0; i < chunk; ++i)
                for (int d = 0; d < grid.dims; ++d) zc.at(i, d) = z(done + i, d);
            Rng chunk_rng = bin_rng.fork();
            GeneratedWalks walks = generate_walks_from(ckpt.gen, zc, ckpt.walk_len, gumbel, chunk_rng);
            for (const auto& walk : walks.node_indices) {
                ++total_walks;
                int start = walk.front();
                ++start_counts[start];
                start_degree_sum += train.degree(start);
                for (std::size_t t = 0; t + 1 < walk.size(); ++t)
                    counts.add(walk[t], walk[t + 1]);
                if (comm != nullptr) {
                    int c0 = comm->label_of[static_cast<std::size_t>(start)];
                    std::int64_t in_start = 0;
                    std::set<int> seen;
                    for (int v : walk) {
                        int cv = comm->label_of[static_cast<std::size_t>(v)];
                        seen.insert(cv);
                        if (cv == c0) ++in_start;
                    }
                    start_comm_share_sum +=
                        static_cast<double>(in_start) / static_cast<double>(walk.size());
                    if (seen.size() == 1) ++single_comm_walks;
                }
            }
            done += chunk;
        }

        rec.metrics["avg_start_degree"] = start_degree_sum / static_cast<double>(total_walks);
        rec.metrics["start_entropy"] =
            entropy_of_counts(start_counts, total_walks);
        if (comm != nullptr) {
            rec.metrics["start_comm_share"] =
                start_comm_share_sum / static_cast<double>(total_walks);
            rec.metrics["single_comm_walk_share"] =
                static_cast<double>(single_comm_walks) / static_cast<double>(total_walks);
        }

        ScoreMatrix sym = symmetrize(counts);
        double eo = nan, max_degree = nan, gini = nan, assort = nan;
        double wedges = nan, claws = nan, triangles = nan, rel_entropy = nan;
        double lcc = nan, power_law = nan;
        try {
            Graph assembled = assemble_graph(sym, train.num_edges(), bin_rng.next());
            StatsReport stats = compute_stats(assembled);
            eo = edge_overlap(train, assembled);
            max_degree = static_cast<double>(stats.max_degree);
            gini = stats.gini;
            assort = stats.assortativity.value_or(nan);
            wedges = static_cast<double>(stats.wedge_count);
            claws = static_cast<double>(stats.claw_count);
            triangles = static_cast<double>(stats.triangle_count);
            rel_entropy = stats.rel_edge_entropy;
            lcc = static_cast<double>(stats.lcc_size);
            power_law = stats.power_law_exp.value_or(nan);
        } catch (const std::exception&) {
            // sparse bins may not touch every node
        }
        rec.metrics["edge_overlap"] = eo;
        rec.metrics["max_degree"] = max_degree;
        rec.metrics["gini"] = gini;
        rec.metrics["assortativity"] = assort;
        rec.metrics["wedge_count"] = wedges;
        rec.metrics["claw_count"] = claws;
        rec.metrics["triangle_count"] = triangles;
        rec.metrics["rel_edge_entropy"] = rel_entropy;
        rec.metrics["lcc_size"] = lcc;
        rec.metrics["power_law_exp"] = power_law;

        double val_auc = nan, val_ap = nan;
        if (split != nullptr && !split->val_edges.empty() && !split->val_nonedges.empty()) {
            auto score_fn = [&sym](Edge e) {
                return std::max(sym.get(e.first, e.second), sym.get(e.second, e.first));
            };
            try {
                auto [auc, ap] = evaluate_link_prediction(score_fn, *split, false);
                val_auc = auc;
                val_ap = ap;
            } catch (const std::exception&) {
            }
        }
        rec.metrics["val_auc"] = val_auc;
        rec.metrics["val_ap"] = val_ap;

        records.push_back(std::move(rec));
    }
    return records;
}

void write_bin_csvs(const std::vector<BinRecord>& records, const std::string& out_dir) {
    if (records.empty()) return;
    std::filesystem::create_directories(out_dir);
    std::set<std::string> metric_names;
    for (const auto& rec : records)
        for (const auto& [name, value] : rec.metrics) metric_names.insert(name);
    for (const auto& name : metric_names) {
        std::ofstream out(out_dir + "/" + name + ".csv");
        if (!out) throw std::runtime_error("cannot write bin csv for " + name);
        out.precision(12);
        out << "bin_i,bin_j,metric,value\n";
        for (const auto& rec : records) {
            auto it = rec.metrics.find(name);
            if (it == rec.metrics.end()) continue;
            out << rec.bin.at(0) << ',' << (rec.bin.size() > 1 ? rec.bin.at(1) : 0) << ',' << name
                << ',';
            if (std::isnan(it->second))
                out << "nan";
            else
                out << it->second;
            out << '\n';
        }
    }
}

}  // namespace netwalk
