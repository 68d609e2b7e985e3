#pragma once

#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "ufcm/kmeans.hpp"

namespace ufcm {

class ConfigError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

struct SolverConfig {
    double alpha = 1.0;    // weight of the clustering fit term, > 0
    double beta = 1.0;     // weight of the row-sparsity term, >= 0
    double p = 1.0;        // exponent of the l2,p norm, in (0, 2)
    int clusters = 2;      // c
    int d_prime = 0;       // projection dimension; 0 selects c
    int restarts = 10;     // r fresh K-means candidates per U update
    int max_iter = 50;
    double tol = 1e-6;     // stop once |dF| <= tol * max(1, |F|)
    double eps_row = 1e-8; // row-norm floor in the reweighting diagonal
    int kmeans_max_iter = 100;
    std::uint64_t seed = 0;

    Index projection_dim() const { return d_prime > 0 ? d_prime : clusters; }

    // Throws ConfigError. With d == 0 / n == 0 only the data-independent checks run.
    void validate(Index d = 0, Index n = 0) const;
};

/// Feature coefficient matrix W (d x d'), orthonormal columns.
struct CoefficientMatrix {
    Eigen::MatrixXd w;
};

/// Terms of the tracked objective
///   value = scatter - alpha * fit - beta * regularizer
/// with scatter = Tr(W^T S_t W), fit = ||W^T X - G U^T||_F^2 and
/// regularizer = sum_i ||w^i||_2^p (the p-th power of the l2,p norm).
struct ObjectiveTerms {
    double value = 0.0;
    double scatter = 0.0;
    double fit = 0.0;
    double regularizer_pow_p = 0.0;
};

struct TraceRecord {
    int iteration = 0;  // 0 is the initialization
    ObjectiveTerms terms;
    Index assignment_changes = 0;
    double orthonormality_error = 0.0;  // ||W^T W - I||_F
};

struct SolverTrace {
    std::vector<TraceRecord> records;
};

struct SolverResult {
    CoefficientMatrix w;
    IndicatorMatrix u;
    CentroidMatrix g;
    SolverTrace trace;
    bool converged = false;
    int iterations = 0;
};

// D_ii = p / (2 * max(||w^i||, eps_row)^(2-p)).
Eigen::VectorXd compute_d(const CoefficientMatrix& w, double p, double eps_row);

// x must be centered (d x n).
ObjectiveTerms objective(const Eigen::MatrixXd& x, const CoefficientMatrix& w, const CentroidMatrix& g,
                         const IndicatorMatrix& u, const SolverConfig& cfg);

/// M = S_t + alpha X U (U^T U)^-1 U^T X^T - alpha X X^T - beta D, symmetrized.
/// For centered x, S_t = X X^T, so M = (1 - alpha) X X^T + alpha X P_U X^T - beta D
/// with P_U the projector onto the cluster indicator columns.
Eigen::MatrixXd build_m(const Eigen::MatrixXd& x, const IndicatorMatrix& u, const Eigen::VectorXd& d_diag,
                        const SolverConfig& cfg);
// Same, with a precomputed S_t = X X^T.
Eigen::MatrixXd build_m(const Eigen::MatrixXd& s_t, const Eigen::MatrixXd& x, const IndicatorMatrix& u,
                        const Eigen::VectorXd& d_diag, const SolverConfig& cfg);

// Top-d' eigenvectors of m: the maximizer of Tr(W^T M W) over W^T W = I.
CoefficientMatrix update_w(const Eigen::MatrixXd& m, Index d_prime);

// G = W^T X U (U^T U)^-1.
CentroidMatrix update_g(const Eigen::MatrixXd& x, const CoefficientMatrix& w, const IndicatorMatrix& u);

/// Alternating optimization of W, U and G from a PCA / K-means start.
///
/// Each iteration recomputes D from the current W, updates U through the candidate
/// rule, refits W by eigendecomposition of M, then G in closed form. The tracked
/// objective is non-decreasing. Running out of iterations is reported through
/// `converged`, not as an error. x must be centered; it is not re-centered here.
SolverResult solve(const Eigen::MatrixXd& x, const SolverConfig& cfg);

}  // namespace ufcm
