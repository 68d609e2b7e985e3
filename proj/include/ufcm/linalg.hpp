#pragma once

#include <optional>
#include <span>

#include <Eigen/Dense>

#include "ufcm/dataset.hpp"

namespace ufcm {

class LinalgError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

struct ScatterSet {
    Eigen::MatrixXd s_t;
    std::optional<Eigen::MatrixXd> s_b;
    std::optional<Eigen::MatrixXd> s_w;
};

/// Leading eigenpairs of a symmetric matrix, values descending.
struct EigenPairs {
    Eigen::VectorXd values;
    Eigen::MatrixXd vectors;  // d x k, column j pairs with values(j)
};

// S_t = X X^T for centered X (d x n). Throws LinalgError when some feature mean
// exceeds 1e-6 * max(1, max|x|).
Eigen::MatrixXd total_scatter(const Eigen::MatrixXd& x);

// S_t, S_b and S_w around the sample mean of x; labels must cover 0..c-1 without gaps.
ScatterSet labeled_scatters(const Eigen::MatrixXd& x, std::span<const int> labels);
ScatterSet labeled_scatters(const DataMatrix& data);

/// k largest eigenpairs of the symmetric matrix a.
///
/// The decomposition runs on (a + a^T) / 2. Each eigenvector is oriented so that
/// its largest-magnitude entry (first one on ties) is positive. When eigenvalues
/// tie across the cut, the vectors the backend orders first are the ones kept.
EigenPairs sym_eig_top(const Eigen::MatrixXd& a, Index k);

// W = top-d' eigenvectors of the total scatter of centered x.
Eigen::MatrixXd pca_init(const Eigen::MatrixXd& x, Index d_prime);

}  // namespace ufcm
