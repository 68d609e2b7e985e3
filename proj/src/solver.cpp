#include "ufcm/solver.hpp"

#include <cmath>
#include <string>

#include "ufcm/linalg.hpp"
#include "ufcm/random.hpp"

namespace ufcm {

void SolverConfig::validate(Index d, Index n) const {
    if (!(alpha > 0.0) || !std::isfinite(alpha)) throw ConfigError("alpha must be positive");
    if (!(beta >= 0.0) || !std::isfinite(beta)) throw ConfigError("beta must be non-negative");
    if (!(p > 0.0 && p < 2.0)) throw ConfigError("p must lie in (0, 2)");
    if (clusters < 1) throw ConfigError("cluster count must be positive");
    if (d_prime < 0) throw ConfigError("d' must be positive (0 selects the cluster count)");
    if (restarts < 0) throw ConfigError("restart count must be non-negative");
    if (max_iter < 1) throw ConfigError("max_iter must be positive");
    if (kmeans_max_iter < 1) throw ConfigError("kmeans_max_iter must be positive");
    if (!(tol >= 0.0)) throw ConfigError("tol must be non-negative");
    if (!(eps_row > 0.0)) throw ConfigError("eps_row must be positive");
    if (d > 0 && projection_dim() > d)
        throw ConfigError("d' = " + std::to_string(projection_dim()) + " exceeds feature count " +
                          std::to_string(d));
    if (n > 0 && clusters > n)
        throw ConfigError("cluster count " + std::to_string(clusters) + " exceeds sample count " +
                          std::to_string(n));
}

Eigen::VectorXd compute_d(const CoefficientMatrix& w, double p, double eps_row) {
    Eigen::VectorXd out(w.w.rows());
    for (Index i = 0; i < w.w.rows(); ++i) {
        const double norm = std::max(w.w.row(i).norm(), eps_row);
        out(i) = 1.0 / ((2.0 / p) * std::pow(norm, 2.0 - p));
    }
    return out;
}

ObjectiveTerms objective(const Eigen::MatrixXd& x, const CoefficientMatrix& w, const CentroidMatrix& g,
                         const IndicatorMatrix& u, const SolverConfig& cfg) {
    if (w.w.rows() != x.rows()) throw LinalgError("objective: W rows do not match feature count");
    if (g.centers.rows() != w.w.cols()) throw LinalgError("objective: G rows do not match W columns");
    if (u.samples() != x.cols()) throw LinalgError("objective: U rows do not match sample count");
    if (u.clusters != g.centers.cols()) throw LinalgError("objective: U and G cluster counts differ");

    const Eigen::MatrixXd y = w.w.transpose() * x;
    ObjectiveTerms t;
    // Tr(W^T X X^T W) = ||W^T X||_F^2 for centered x.
    t.scatter = y.squaredNorm();
    t.fit = fit_term(y, g, u);
    for (Index i = 0; i < w.w.rows(); ++i) t.regularizer_pow_p += std::pow(w.w.row(i).norm(), cfg.p);
    t.value = t.scatter - cfg.alpha * t.fit - cfg.beta * t.regularizer_pow_p;
    return t;
}

Eigen::MatrixXd build_m(const Eigen::MatrixXd& s_t, const Eigen::MatrixXd& x, const IndicatorMatrix& u,
                        const Eigen::VectorXd& d_diag, const SolverConfig& cfg) {
    const Index d = x.rows();
    if (s_t.rows() != d || s_t.cols() != d) throw LinalgError("build_m: S_t shape mismatch");
    if (d_diag.size() != d) throw LinalgError("build_m: D size mismatch");
    if (u.samples() != x.cols()) throw LinalgError("build_m: U rows do not match sample count");

    // X U (U^T U)^-1 U^T X^T = sum_k n_k m_k m_k^T with m_k the cluster means in input space.
    const auto sizes = u.sizes();
    Eigen::MatrixXd sums = Eigen::MatrixXd::Zero(d, u.clusters);
    for (Index i = 0; i < x.cols(); ++i) sums.col(u.assignments[static_cast<std::size_t>(i)]) += x.col(i);
    for (int k = 0; k < u.clusters; ++k) {
        if (sizes[static_cast<std::size_t>(k)] == 0)
            throw ClusteringError("build_m: cluster " + std::to_string(k) + " is empty, U^T U is singular");
        sums.col(k) /= std::sqrt(static_cast<double>(sizes[static_cast<std::size_t>(k)]));
    }
    Eigen::MatrixXd m = (1.0 - cfg.alpha) * s_t;
    m.noalias() += cfg.alpha * (sums * sums.transpose());
    m.diagonal() -= cfg.beta * d_diag;
    return 0.5 * (m + m.transpose());
}

Eigen::MatrixXd build_m(const Eigen::MatrixXd& x, const IndicatorMatrix& u, const Eigen::VectorXd& d_diag,
                        const SolverConfig& cfg) {
    return build_m(total_scatter(x), x, u, d_diag, cfg);
}

CoefficientMatrix update_w(const Eigen::MatrixXd& m, Index d_prime) {
    return {sym_eig_top(m, d_prime).vectors};
}

CentroidMatrix update_g(const Eigen::MatrixXd& x, const CoefficientMatrix& w, const IndicatorMatrix& u) {
    if (u.samples() != x.cols()) throw LinalgError("update_g: U rows do not match sample count");
    const Eigen::MatrixXd xu = x * u.dense();
    const auto sizes = u.sizes();
    Eigen::VectorXd inv(u.clusters);
    for (int k = 0; k < u.clusters; ++k) {
        if (sizes[static_cast<std::size_t>(k)] == 0)
            throw ClusteringError("update_g: cluster " + std::to_string(k) + " is empty, U^T U is singular");
        inv(k) = 1.0 / static_cast<double>(sizes[static_cast<std::size_t>(k)]);
    }
    return {w.w.transpose() * xu * inv.asDiagonal()};
}

namespace {

double orthonormality_error(const CoefficientMatrix& w) {
    const Index k = w.w.cols();
    return (w.w.transpose() * w.w - Eigen::MatrixXd::Identity(k, k)).norm();
}

Index count_changes(const IndicatorMatrix& a, const IndicatorMatrix& b) {
    Index changes = 0;
    for (std::size_t i = 0; i < a.assignments.size(); ++i) changes += a.assignments[i] != b.assignments[i];
    return changes;
}

}  // namespace

SolverResult solve(const Eigen::MatrixXd& x, const SolverConfig& cfg) {
    cfg.validate(x.rows(), x.cols());
    const Index d_prime = cfg.projection_dim();
    const Eigen::MatrixXd s_t = total_scatter(x);

    SolverResult result;
    result.w = {sym_eig_top(s_t, d_prime).vectors};
    {
        KMeansResult init = run_kmeans(result.w.w.transpose() * x, cfg.clusters, derive_seed(cfg.seed, 0),
                                       cfg.kmeans_max_iter);
        result.u = std::move(init.u);
    }
    result.g = update_g(x, result.w, result.u);
    result.trace.records.push_back(
        {0, objective(x, result.w, result.g, result.u, cfg), 0, orthonormality_error(result.w)});

    for (int it = 1; it <= cfg.max_iter; ++it) {
        const Eigen::VectorXd d_diag = compute_d(result.w, cfg.p, cfg.eps_row);

        KMeansResult pick = update_u_with_candidates(result.w.w.transpose() * x, result.u, cfg.clusters,
                                                     cfg.restarts, derive_seed(cfg.seed, static_cast<std::uint64_t>(it)),
                                                     cfg.kmeans_max_iter);
        const Index changes = count_changes(result.u, pick.u);
        result.u = std::move(pick.u);

        result.w = update_w(build_m(s_t, x, result.u, d_diag, cfg), d_prime);
        result.g = update_g(x, result.w, result.u);

        const ObjectiveTerms terms = objective(x, result.w, result.g, result.u, cfg);
        const double previous = result.trace.records.back().terms.value;
        result.trace.records.push_back({it, terms, changes, orthonormality_error(result.w)});
        result.iterations = it;
        if (std::abs(terms.value - previous) <= cfg.tol * std::max(1.0, std::abs(previous))) {
            result.converged = true;
            break;
        }
    }
    return result;
}

}  // namespace ufcm
