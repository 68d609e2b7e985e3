#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "ufcm/dataset.hpp"
#include "ufcm/solver.hpp"

namespace ufcm {

class MetricError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

struct FeatureRanking {
    Eigen::VectorXd scores;
    std::vector<Index> order;  // descending score, ties by lower index
};

/// Counts t_{l,h}: rows are predicted clusters, columns ground-truth classes.
/// Labels are compacted to 0..k-1 in increasing order before counting.
struct ContingencyTable {
    Eigen::Matrix<Index, Eigen::Dynamic, Eigen::Dynamic> counts;
    Index n = 0;
};

// [sum_i (sum_j m_ij^2)^(p/2)]^(1/p).
double l2p_norm(const Eigen::MatrixXd& m, double p);

FeatureRanking ranking_from_scores(Eigen::VectorXd scores);

// Scores are the row norms ||w^i||_2.
FeatureRanking rank_features(const CoefficientMatrix& w);

// Sample variance of every feature.
FeatureRanking max_variance_ranking(const DataMatrix& data);

// Rows order[0..m-1] of data, in ranking order. Samples and labels untouched.
DataMatrix select(const DataMatrix& data, const FeatureRanking& ranking, Index m);

ContingencyTable contingency(std::span<const int> pred, std::span<const int> truth);

/// Maximum-weight perfect matching on a square matrix (Kuhn-Munkres with
/// potentials, O(k^3)). Returns the column matched to each row.
std::vector<Index> max_weight_matching(const Eigen::MatrixXd& weights);

/// Clustering accuracy: fraction of samples correct under the best one-to-one
/// mapping of predicted clusters onto classes. The contingency table is padded
/// to square when the cluster counts differ.
double accuracy(std::span<const int> pred, std::span<const int> truth);

/// Normalized mutual information
///   sum t_lh log(n t_lh / (t_l t~_h)) / sqrt(sum t_l log(t_l/n) * sum t~_h log(t~_h/n))
/// with 0 log 0 = 0. A single-cluster partition gives 0, or 1 when both are single-cluster.
double nmi(std::span<const int> pred, std::span<const int> truth);

struct ClusteringScores {
    double acc_mean = 0.0;
    double acc_std = 0.0;
    double nmi_mean = 0.0;
    double nmi_std = 0.0;
    std::vector<double> acc_runs;
    std::vector<double> nmi_runs;
};

/// K-means with c clusters on all features of `data`, `runs` times with seeds
/// derived from `seed`; ACC and NMI against the ground truth, mean and population std.
ClusteringScores evaluate_clustering(const DataMatrix& data, int c, int runs, std::uint64_t seed,
                                     int kmeans_max_iter = 100);

// Same on the top-m features of `ranking`.
ClusteringScores evaluate_clustering(const DataMatrix& data, const FeatureRanking& ranking, Index m, int c,
                                     int runs, std::uint64_t seed, int kmeans_max_iter = 100);

}  // namespace ufcm
