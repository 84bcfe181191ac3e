#include "pilotgrid/spectral.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <limits>
#include <stdexcept>

#include "pilotgrid/random.hpp"

namespace pilotgrid {

Eigen::MatrixXd BipartiteGainGraph::laplacian() const {
    Eigen::MatrixXd l = -weights;
    l.diagonal() += degrees;
    return l;
}

Eigen::MatrixXd BipartiteGainGraph::normalized_laplacian() const {
    const Eigen::ArrayXd inv_sqrt = degrees.array().rsqrt();
    Eigen::MatrixXd s = laplacian();
    s.array().colwise() *= inv_sqrt;
    s.array().rowwise() *= inv_sqrt.transpose();
    return s;
}

BipartiteGainGraph build_graph(const Eigen::MatrixXd& user_rrh_gains) {
    if ((user_rrh_gains.array() <= 0.0).any())
        throw std::invalid_argument("build_graph: gains must be positive");
    BipartiteGainGraph g;
    g.num_users = static_cast<int>(user_rrh_gains.rows());
    g.num_rrhs = static_cast<int>(user_rrh_gains.cols());
    const int nt = g.num_vertices();
    g.weights = Eigen::MatrixXd::Zero(nt, nt);
    g.weights.topRightCorner(g.num_users, g.num_rrhs) = user_rrh_gains;
    g.weights.bottomLeftCorner(g.num_rrhs, g.num_users) = user_rrh_gains.transpose();
    g.degrees = g.weights.rowwise().sum();
    return g;
}

SpectralEmbedding normalized_spectral_embedding(const BipartiteGainGraph& graph, int k,
                                                bool include_null_vector) {
    const int nt = graph.num_vertices();
    const int first = include_null_vector ? 0 : 1;
    if (k < 1 || k + first > nt)
        throw std::invalid_argument("normalized_spectral_embedding: K out of range");

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(graph.normalized_laplacian());
    if (solver.info() != Eigen::Success)
        throw std::runtime_error("normalized_spectral_embedding: eigensolver failed");

    SpectralEmbedding out;
    out.vectors = solver.eigenvectors().middleCols(first, k);
    out.values = solver.eigenvalues().segment(first, k);
    for (int c = 0; c < k; ++c) {
        for (int r = 0; r < nt; ++r) {
            const double v = out.vectors(r, c);
            if (std::abs(v) > 1e-12) {
                if (v < 0.0) out.vectors.col(c) = -out.vectors.col(c);
                break;
            }
        }
    }
    return out;
}

Eigen::MatrixXd row_normalize(const Eigen::MatrixXd& z) {
    Eigen::MatrixXd out = z;
    for (Eigen::Index r = 0; r < z.rows(); ++r) {
        const double norm = z.row(r).norm();
        if (norm == 0.0)
            throw std::runtime_error("row_normalize: zero row (disconnected vertex?)");
        out.row(r) /= norm;
    }
    return out;
}

namespace {

double assign_labels(const Eigen::MatrixXd& rows, const Eigen::MatrixXd& centers,
                     std::vector<int>& labels) {
    double objective = 0.0;
    for (Eigen::Index i = 0; i < rows.rows(); ++i) {
        int best = 0;
        double best_d = (rows.row(i) - centers.row(0)).squaredNorm();
        for (Eigen::Index c = 1; c < centers.rows(); ++c) {
            const double d = (rows.row(i) - centers.row(c)).squaredNorm();
            if (d < best_d) {
                best_d = d;
                best = static_cast<int>(c);
            }
        }
        labels[static_cast<std::size_t>(i)] = best;
        objective += best_d;
    }
    return objective;
}

KmeansResult kmeans_once(const Eigen::MatrixXd& rows, int k, Rng& rng,
                         const KmeansOptions& opts) {
    const Eigen::Index n = rows.rows();
    Eigen::MatrixXd centers(k, rows.cols());

    // k-means++ seeding
    std::vector<double> dist2(static_cast<std::size_t>(n),
                              std::numeric_limits<double>::infinity());
    Eigen::Index pick = static_cast<Eigen::Index>(rng.next_index(static_cast<std::uint64_t>(n)));
    centers.row(0) = rows.row(pick);
    for (int c = 1; c < k; ++c) {
        double total = 0.0;
        for (Eigen::Index i = 0; i < n; ++i) {
            const double d = (rows.row(i) - centers.row(c - 1)).squaredNorm();
            auto& di = dist2[static_cast<std::size_t>(i)];
            if (d < di) di = d;
            total += di;
        }
        if (total <= 0.0) {
            pick = static_cast<Eigen::Index>(rng.next_index(static_cast<std::uint64_t>(n)));
        } else {
            const double target = rng.next_double() * total;
            double acc = 0.0;
            pick = n - 1;
            for (Eigen::Index i = 0; i < n; ++i) {
                acc += dist2[static_cast<std::size_t>(i)];
                if (acc >= target) {
                    pick = i;
                    break;
                }
            }
        }
        centers.row(c) = rows.row(pick);
    }

    KmeansResult res;
    res.labels.assign(static_cast<std::size_t>(n), 0);
    double prev = std::numeric_limits<double>::infinity();
    for (int it = 0; it < opts.max_iterations; ++it) {
        res.objective = assign_labels(rows, centers, res.labels);

        Eigen::MatrixXd sums = Eigen::MatrixXd::Zero(k, rows.cols());
        std::vector<int> counts(static_cast<std::size_t>(k), 0);
        for (Eigen::Index i = 0; i < n; ++i) {
            sums.row(res.labels[static_cast<std::size_t>(i)]) += rows.row(i);
            ++counts[static_cast<std::size_t>(res.labels[static_cast<std::size_t>(i)])];
        }
        for (int c = 0; c < k; ++c) {
            if (counts[static_cast<std::size_t>(c)] > 0) {
                centers.row(c) = sums.row(c) / counts[static_cast<std::size_t>(c)];
            } else {
                // re-seed an empty cluster at the point farthest from its center
                Eigen::Index far = 0;
                double far_d = -1.0;
                for (Eigen::Index i = 0; i < n; ++i) {
                    const double d =
                        (rows.row(i) - centers.row(res.labels[static_cast<std::size_t>(i)]))
                            .squaredNorm();
                    if (d > far_d) {
                        far_d = d;
                        far = i;
                    }
                }
                centers.row(c) = rows.row(far);
            }
        }
        if (prev - res.objective <= opts.tolerance * std::max(1e-300, prev) && it > 0) break;
        prev = res.objective;
    }
    res.objective = assign_labels(rows, centers, res.labels);
    return res;
}

std::atomic<bool> g_warned_empty_cluster{false};

}  // namespace

KmeansResult kmeans(const Eigen::MatrixXd& rows, int k, std::uint64_t seed,
                    const KmeansOptions& opts) {
    if (k < 1 || k > rows.rows()) throw std::invalid_argument("kmeans: K out of range");
    KmeansResult best;
    best.objective = std::numeric_limits<double>::infinity();
    for (int r = 0; r < opts.restarts; ++r) {
        Rng rng(derive_seed(seed, 5000 + static_cast<std::uint64_t>(r)));
        KmeansResult res = kmeans_once(rows, k, rng, opts);
        if (res.objective < best.objective) best = std::move(res);
    }
    return best;
}

double ncut_value(const BipartiteGainGraph& graph, const std::vector<int>& membership) {
    const int nt = graph.num_vertices();
    if (static_cast<int>(membership.size()) != nt)
        throw std::invalid_argument("ncut_value: membership must cover all vertices");
    int k = 0;
    for (int m : membership) k = std::max(k, m + 1);

    std::vector<double> cut(static_cast<std::size_t>(k), 0.0);
    std::vector<double> vol(static_cast<std::size_t>(k), 0.0);
    std::vector<int> count(static_cast<std::size_t>(k), 0);
    for (int i = 0; i < nt; ++i) {
        const auto ci = static_cast<std::size_t>(membership[static_cast<std::size_t>(i)]);
        vol[ci] += graph.degrees[i];
        ++count[ci];
        for (int j = 0; j < nt; ++j)
            if (membership[static_cast<std::size_t>(j)] != static_cast<int>(ci))
                cut[ci] += graph.weights(i, j);
    }
    double total = 0.0;
    for (std::size_t c = 0; c < cut.size(); ++c) {
        if (count[c] == 0) {
            if (!g_warned_empty_cluster.exchange(true))
                std::fprintf(stderr, "pilotgrid: warning: empty cluster skipped in ncut\n");
            continue;
        }
        if (vol[c] > 0.0) total += cut[c] / (2.0 * vol[c]);
    }
    return total;
}

ClusterResult cluster_users(const Eigen::MatrixXd& user_rrh_gains, int num_pilots,
                            std::uint64_t seed, std::optional<int> k_override,
                            const ClusterOptions& opts) {
    const int n_users = static_cast<int>(user_rrh_gains.rows());
    const int nt = n_users + static_cast<int>(user_rrh_gains.cols());
    if (num_pilots < 1) throw std::invalid_argument("cluster_users: P must be >= 1");

    const BipartiteGainGraph graph = build_graph(user_rrh_gains);
    int k = k_override.value_or(
        std::max(num_pilots, (n_users + num_pilots - 1) / num_pilots));
    k = std::min(k, nt - 1);

    Eigen::MatrixXd rows_cache;
    std::vector<int> labels;
    int used_k = k;
    for (int attempt = 0;; ++attempt) {
        const SpectralEmbedding emb =
            normalized_spectral_embedding(graph, used_k, opts.include_null_vector);
        rows_cache = row_normalize(emb.vectors);
        labels = kmeans(rows_cache, used_k, seed, opts.kmeans).labels;

        std::vector<int> user_count(static_cast<std::size_t>(used_k), 0);
        for (int u = 0; u < n_users; ++u) ++user_count[static_cast<std::size_t>(labels[u])];
        const bool oversized =
            std::any_of(user_count.begin(), user_count.end(),
                        [&](int c) { return c > num_pilots; });
        if (!oversized || attempt >= opts.max_regrow || used_k >= nt - 1) {
            if (oversized) {
                // last resort: split each oversized cluster by plain K-means
                int next_cluster = used_k;
                for (int c = 0; c < used_k; ++c) {
                    std::vector<int> members;
                    for (int u = 0; u < n_users; ++u)
                        if (labels[u] == c) members.push_back(u);
                    if (static_cast<int>(members.size()) <= num_pilots) continue;
                    const int parts =
                        (static_cast<int>(members.size()) + num_pilots - 1) / num_pilots;
                    Eigen::MatrixXd sub(members.size(), rows_cache.cols());
                    for (std::size_t i = 0; i < members.size(); ++i)
                        sub.row(static_cast<Eigen::Index>(i)) = rows_cache.row(members[i]);
                    const KmeansResult split = kmeans(sub, parts, seed + 17, opts.kmeans);
                    for (std::size_t i = 0; i < members.size(); ++i)
                        if (split.labels[i] > 0)
                            labels[static_cast<std::size_t>(members[i])] =
                                next_cluster + split.labels[i] - 1;
                    next_cluster += parts - 1;
                }
                used_k = next_cluster;
                // K-means splits can stay unbalanced; chunk any remainder
                for (int c = 0; c < used_k; ++c) {
                    std::vector<int> members;
                    for (int u = 0; u < n_users; ++u)
                        if (labels[u] == c) members.push_back(u);
                    for (std::size_t i = static_cast<std::size_t>(num_pilots);
                         i < members.size(); ++i) {
                        const int chunk = static_cast<int>(i) / num_pilots - 1;
                        labels[static_cast<std::size_t>(members[i])] = used_k + chunk;
                    }
                    if (static_cast<int>(members.size()) > num_pilots)
                        used_k += (static_cast<int>(members.size()) - 1) / num_pilots;
                }
            }
            break;
        }
        ++used_k;
    }

    ClusterResult res;
    res.num_clusters = used_k;
    res.user_membership.assign(labels.begin(), labels.begin() + n_users);
    res.rrh_membership.assign(labels.begin() + n_users, labels.end());
    res.ncut = ncut_value(graph, labels);
    return res;
}

}  // namespace pilotgrid
