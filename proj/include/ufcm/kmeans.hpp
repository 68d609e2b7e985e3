#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "ufcm/dataset.hpp"

namespace ufcm {

class ClusteringError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// One-hot cluster indicator U (n x c), kept as an assignment list.
struct IndicatorMatrix {
    std::vector<int> assignments;
    int clusters = 0;

    Index samples() const { return static_cast<Index>(assignments.size()); }
    std::vector<Index> sizes() const;
    bool all_nonempty() const;
    Eigen::MatrixXd dense() const;
};

/// Cluster centroids G (d' x c) in the transformed space.
struct CentroidMatrix {
    Eigen::MatrixXd centers;
};

struct KMeansResult {
    IndicatorMatrix u;
    CentroidMatrix g;
    double fit = 0.0;
    std::vector<double> fit_history;  // fit after every centroid step
    int iterations = 0;
};

// ||Y - G U^T||_F^2.
double fit_term(const Eigen::MatrixXd& y, const CentroidMatrix& g, const IndicatorMatrix& u);

// Nearest centroid per sample, ties to the lowest index. No empty-cluster repair.
IndicatorMatrix assign_nearest(const Eigen::MatrixXd& y, const CentroidMatrix& g);

// assign_nearest followed by repair: while some cluster is empty, it takes the sample
// of the currently largest cluster that lies farthest from that cluster's centroid.
// Empty clusters are filled in increasing index order.
IndicatorMatrix assign(const Eigen::MatrixXd& y, const CentroidMatrix& g);

// Per-cluster means of y. Throws ClusteringError on an empty cluster.
CentroidMatrix centroids(const Eigen::MatrixXd& y, const IndicatorMatrix& u);

/// Lloyd iterations from c distinct random samples used as initial centroids.
/// Stops when the assignment no longer changes or after max_iter passes.
KMeansResult run_kmeans(const Eigen::MatrixXd& y, int c, std::uint64_t seed, int max_iter = 100);

/// Candidate update for the indicator matrix: the incumbent u_prev competes with r
/// converged K-means runs (seeds derived from `seed`), each scored by its fit under
/// its own induced centroids. The incumbent wins ties, so the returned fit never
/// exceeds the incumbent's.
KMeansResult update_u_with_candidates(const Eigen::MatrixXd& y, const IndicatorMatrix& u_prev,
                                      int c, int r, std::uint64_t seed, int max_iter = 100);

}  // namespace ufcm
