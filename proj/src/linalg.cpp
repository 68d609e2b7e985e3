#include "ufcm/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include <Eigen/Eigenvalues>

namespace ufcm {

Eigen::MatrixXd total_scatter(const Eigen::MatrixXd& x) {
    if (x.size() == 0) throw LinalgError("total_scatter: empty data");
    const double scale = std::max(1.0, x.cwiseAbs().maxCoeff());
    const double worst = x.rowwise().mean().cwiseAbs().maxCoeff();
    if (worst > 1e-6 * scale)
        throw LinalgError("total_scatter: data is not centered (largest feature mean " +
                          std::to_string(worst) + ")");
    Eigen::MatrixXd s = Eigen::MatrixXd::Zero(x.rows(), x.rows());
    s.selfadjointView<Eigen::Lower>().rankUpdate(x);
    return s.selfadjointView<Eigen::Lower>();
}

ScatterSet labeled_scatters(const Eigen::MatrixXd& x, std::span<const int> labels) {
    const Index d = x.rows();
    const Index n = x.cols();
    if (static_cast<Index>(labels.size()) != n)
        throw LinalgError("labeled_scatters: label count does not match sample count");
    if (n == 0) throw LinalgError("labeled_scatters: empty data");
    const int c = *std::max_element(labels.begin(), labels.end()) + 1;
    if (*std::min_element(labels.begin(), labels.end()) < 0)
        throw LinalgError("labeled_scatters: negative label");

    Eigen::MatrixXd class_sum = Eigen::MatrixXd::Zero(d, c);
    std::vector<Index> count(static_cast<std::size_t>(c), 0);
    for (Index i = 0; i < n; ++i) {
        class_sum.col(labels[i]) += x.col(i);
        ++count[static_cast<std::size_t>(labels[i])];
    }
    for (int k = 0; k < c; ++k)
        if (count[static_cast<std::size_t>(k)] == 0)
            throw LinalgError("labeled_scatters: class " + std::to_string(k) + " is empty");

    const Eigen::VectorXd mean = x.rowwise().mean();
    Eigen::MatrixXd class_mean(d, c);
    for (int k = 0; k < c; ++k) class_mean.col(k) = class_sum.col(k) / static_cast<double>(count[k]);

    const Eigen::MatrixXd centered = x.colwise() - mean;
    Eigen::MatrixXd within(d, n);
    for (Index i = 0; i < n; ++i) within.col(i) = x.col(i) - class_mean.col(labels[i]);
    Eigen::MatrixXd between(d, c);
    for (int k = 0; k < c; ++k)
        between.col(k) = std::sqrt(static_cast<double>(count[k])) * (class_mean.col(k) - mean);

    ScatterSet out;
    out.s_t = centered * centered.transpose();
    out.s_w = within * within.transpose();
    out.s_b = between * between.transpose();
    return out;
}

ScatterSet labeled_scatters(const DataMatrix& data) {
    if (!data.labels) throw LinalgError("labeled_scatters: dataset has no labels");
    return labeled_scatters(data.values, *data.labels);
}

EigenPairs sym_eig_top(const Eigen::MatrixXd& a, Index k) {
    const Index d = a.rows();
    if (a.cols() != d) throw LinalgError("sym_eig_top: matrix is not square");
    if (k < 1 || k > d) throw LinalgError("sym_eig_top: k out of range");
    const double scale = a.cwiseAbs().maxCoeff();
    if ((a - a.transpose()).cwiseAbs().maxCoeff() > 1e-8 * std::max(scale, 1e-300))
        throw LinalgError("sym_eig_top: matrix is not symmetric");

    const Eigen::MatrixXd sym = 0.5 * (a + a.transpose());
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(sym);
    if (solver.info() != Eigen::Success) throw LinalgError("sym_eig_top: eigensolver failed");

    // Eigen reports ascending order.
    EigenPairs out;
    out.values.resize(k);
    out.vectors.resize(d, k);
    for (Index j = 0; j < k; ++j) {
        const Index src = d - 1 - j;
        out.values(j) = solver.eigenvalues()(src);
        Eigen::VectorXd v = solver.eigenvectors().col(src);
        Index pivot = 0;
        for (Index i = 1; i < d; ++i)
            if (std::abs(v(i)) > std::abs(v(pivot))) pivot = i;
        if (v(pivot) < 0.0) v = -v;
        out.vectors.col(j) = v;
    }
    return out;
}

Eigen::MatrixXd pca_init(const Eigen::MatrixXd& x, Index d_prime) {
    if (d_prime < 1 || d_prime > x.rows()) throw LinalgError("pca_init: d' out of range");
    return sym_eig_top(total_scatter(x), d_prime).vectors;
}

}  // namespace ufcm
