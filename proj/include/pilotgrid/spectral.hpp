#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <optional>
#include <vector>

namespace pilotgrid {

// Weighted bipartite graph between users and RRHs; edge weights are the
// large-scale gains. Vertices 0..N_u-1 are users, N_u..N_u+N_r-1 are RRHs.
struct BipartiteGainGraph {
    Eigen::MatrixXd weights;  // (N_u+N_r) square, symmetric, zero diagonal blocks
    Eigen::VectorXd degrees;  // row sums
    int num_users = 0;
    int num_rrhs = 0;

    int num_vertices() const { return num_users + num_rrhs; }
    Eigen::MatrixXd laplacian() const;
    // D^{-1/2} (D - W) D^{-1/2}
    Eigen::MatrixXd normalized_laplacian() const;
};

// gains(u, r) = beta between user u and RRH r; all entries must be positive.
BipartiteGainGraph build_graph(const Eigen::MatrixXd& user_rrh_gains);

struct SpectralEmbedding {
    Eigen::MatrixXd vectors;   // N_t x K, orthonormal columns
    Eigen::VectorXd values;    // matching eigenvalues, ascending
};

// Eigenvectors of the normalized Laplacian for the K smallest nonzero
// eigenvalues (the null vector is skipped unless include_null_vector). Column
// signs are fixed so the first nonzero component is positive.
SpectralEmbedding normalized_spectral_embedding(const BipartiteGainGraph& graph, int k,
                                                bool include_null_vector = false);

// Scale each row to unit Euclidean norm; throws on a zero row.
Eigen::MatrixXd row_normalize(const Eigen::MatrixXd& z);

struct KmeansResult {
    std::vector<int> labels;
    double objective = 0.0;  // within-cluster sum of squares
};

struct KmeansOptions {
    int restarts = 10;
    int max_iterations = 300;
    double tolerance = 1e-9;  // relative objective change
};

// Lloyd iterations from k-means++ seeding; best of `restarts` runs.
KmeansResult kmeans(const Eigen::MatrixXd& rows, int k, std::uint64_t seed,
                    const KmeansOptions& opts = {});

// Sum over clusters of cut(V_k, complement) / (2 Vol(V_k)).
double ncut_value(const BipartiteGainGraph& graph, const std::vector<int>& membership);

struct ClusterResult {
    std::vector<int> user_membership;  // 0-based cluster per user
    std::vector<int> rrh_membership;
    int num_clusters = 0;
    double ncut = 0.0;
};

struct ClusterOptions {
    KmeansOptions kmeans{};
    bool include_null_vector = false;
    int max_regrow = 5;  // attempts at K+1 when a cluster exceeds P users
};

// Full pipeline. Default K = max(P, ceil(N_u / P)); if any cluster ends up
// with more than P users the clustering is re-run with K+1 (bounded), then the
// offending clusters are split by plain K-means as a last resort, so that the
// result always satisfies the at-most-P-users-per-cluster requirement.
ClusterResult cluster_users(const Eigen::MatrixXd& user_rrh_gains, int num_pilots,
                            std::uint64_t seed,
                            std::optional<int> k_override = std::nullopt,
                            const ClusterOptions& opts = {});

}  // namespace pilotgrid
