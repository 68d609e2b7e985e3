#include "ufcm/kmeans.hpp"

#include <algorithm>
#include <limits>
#include <numeric>
#include <string>

#include "ufcm/random.hpp"

namespace ufcm {

std::vector<Index> IndicatorMatrix::sizes() const {
    std::vector<Index> out(static_cast<std::size_t>(clusters), 0);
    for (int a : assignments) ++out[static_cast<std::size_t>(a)];
    return out;
}

bool IndicatorMatrix::all_nonempty() const {
    const auto s = sizes();
    return std::none_of(s.begin(), s.end(), [](Index v) { return v == 0; });
}

Eigen::MatrixXd IndicatorMatrix::dense() const {
    Eigen::MatrixXd u = Eigen::MatrixXd::Zero(samples(), clusters);
    for (Index i = 0; i < samples(); ++i) u(i, assignments[static_cast<std::size_t>(i)]) = 1.0;
    return u;
}

namespace {

void check_shapes(const Eigen::MatrixXd& y, const CentroidMatrix& g) {
    if (g.centers.cols() < 1) throw ClusteringError("centroid matrix has no clusters");
    if (g.centers.rows() != y.rows())
        throw ClusteringError("centroid dimension " + std::to_string(g.centers.rows()) +
                              " does not match data dimension " + std::to_string(y.rows()));
}

void check_indicator(const Eigen::MatrixXd& y, const IndicatorMatrix& u) {
    if (u.samples() != y.cols()) throw ClusteringError("indicator size does not match sample count");
    for (int a : u.assignments)
        if (a < 0 || a >= u.clusters) throw ClusteringError("assignment out of range");
}

}  // namespace

double fit_term(const Eigen::MatrixXd& y, const CentroidMatrix& g, const IndicatorMatrix& u) {
    check_shapes(y, g);
    check_indicator(y, u);
    double total = 0.0;
    for (Index i = 0; i < y.cols(); ++i)
        total += (y.col(i) - g.centers.col(u.assignments[static_cast<std::size_t>(i)])).squaredNorm();
    return total;
}

IndicatorMatrix assign_nearest(const Eigen::MatrixXd& y, const CentroidMatrix& g) {
    check_shapes(y, g);
    const Index c = g.centers.cols();
    IndicatorMatrix u;
    u.clusters = static_cast<int>(c);
    u.assignments.resize(static_cast<std::size_t>(y.cols()));
    for (Index i = 0; i < y.cols(); ++i) {
        Index best = 0;
        double best_dist = (y.col(i) - g.centers.col(0)).squaredNorm();
        for (Index k = 1; k < c; ++k) {
            const double dist = (y.col(i) - g.centers.col(k)).squaredNorm();
            if (dist < best_dist) {
                best_dist = dist;
                best = k;
            }
        }
        u.assignments[static_cast<std::size_t>(i)] = static_cast<int>(best);
    }
    return u;
}

IndicatorMatrix assign(const Eigen::MatrixXd& y, const CentroidMatrix& g) {
    IndicatorMatrix u = assign_nearest(y, g);
    if (y.cols() < u.clusters) return u;  // cannot fill every cluster
    auto sizes = u.sizes();
    for (int k = 0; k < u.clusters; ++k) {
        if (sizes[static_cast<std::size_t>(k)] != 0) continue;
        const auto largest =
            static_cast<int>(std::max_element(sizes.begin(), sizes.end()) - sizes.begin());
        Index far = -1;
        double far_dist = -1.0;
        for (Index i = 0; i < y.cols(); ++i) {
            if (u.assignments[static_cast<std::size_t>(i)] != largest) continue;
            const double dist = (y.col(i) - g.centers.col(largest)).squaredNorm();
            if (dist > far_dist) {
                far_dist = dist;
                far = i;
            }
        }
        u.assignments[static_cast<std::size_t>(far)] = k;
        --sizes[static_cast<std::size_t>(largest)];
        ++sizes[static_cast<std::size_t>(k)];
    }
    return u;
}

CentroidMatrix centroids(const Eigen::MatrixXd& y, const IndicatorMatrix& u) {
    check_indicator(y, u);
    CentroidMatrix g{Eigen::MatrixXd::Zero(y.rows(), u.clusters)};
    const auto sizes = u.sizes();
    for (Index i = 0; i < y.cols(); ++i) g.centers.col(u.assignments[static_cast<std::size_t>(i)]) += y.col(i);
    for (int k = 0; k < u.clusters; ++k) {
        if (sizes[static_cast<std::size_t>(k)] == 0)
            throw ClusteringError("cluster " + std::to_string(k) + " is empty");
        g.centers.col(k) /= static_cast<double>(sizes[static_cast<std::size_t>(k)]);
    }
    return g;
}

KMeansResult run_kmeans(const Eigen::MatrixXd& y, int c, std::uint64_t seed, int max_iter) {
    const Index n = y.cols();
    if (c < 1) throw ClusteringError("cluster count must be positive");
    if (c > n)
        throw ClusteringError("cluster count " + std::to_string(c) + " exceeds sample count " +
                              std::to_string(n));
    if (max_iter < 1) throw ClusteringError("max_iter must be positive");

    // c distinct samples via a partial Fisher-Yates shuffle.
    Rng rng(seed);
    std::vector<Index> pool(static_cast<std::size_t>(n));
    std::iota(pool.begin(), pool.end(), Index{0});
    CentroidMatrix g{Eigen::MatrixXd(y.rows(), c)};
    for (int k = 0; k < c; ++k) {
        const auto pick = k + static_cast<Index>(rng.index(static_cast<std::uint64_t>(n - k)));
        std::swap(pool[static_cast<std::size_t>(k)], pool[static_cast<std::size_t>(pick)]);
        g.centers.col(k) = y.col(pool[static_cast<std::size_t>(k)]);
    }

    KMeansResult result;
    for (int it = 0; it < max_iter; ++it) {
        IndicatorMatrix u = assign(y, g);
        g = centroids(y, u);
        result.fit = fit_term(y, g, u);
        result.fit_history.push_back(result.fit);
        result.iterations = it + 1;
        const bool stable = u.assignments == result.u.assignments;
        result.u = std::move(u);
        if (stable) break;
    }
    result.g = std::move(g);
    return result;
}

KMeansResult update_u_with_candidates(const Eigen::MatrixXd& y, const IndicatorMatrix& u_prev,
                                      int c, int r, std::uint64_t seed, int max_iter) {
    check_indicator(y, u_prev);
    if (u_prev.clusters != c) throw ClusteringError("incumbent has a different cluster count");
    if (r < 0) throw ClusteringError("restart count must be non-negative");

    KMeansResult best;
    best.u = u_prev;
    best.g = centroids(y, u_prev);
    best.fit = fit_term(y, best.g, best.u);
    best.fit_history = {best.fit};
    for (int j = 1; j <= r; ++j) {
        KMeansResult candidate = run_kmeans(y, c, derive_seed(seed, static_cast<std::uint64_t>(j)), max_iter);
        if (candidate.fit < best.fit) best = std::move(candidate);
    }
    return best;
}

}  // namespace ufcm
