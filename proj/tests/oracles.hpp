#pragma once

// Reference computations used only by the tests. None of these call into the
// library code paths they are compared against.

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <map>
#include <numeric>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "ufcm/random.hpp"

namespace oracle {

using Eigen::Index;
using Eigen::MatrixXd;
using Eigen::VectorXd;

inline MatrixXd random_matrix(Index rows, Index cols, ufcm::Rng& rng) {
    MatrixXd m(rows, cols);
    for (Index j = 0; j < cols; ++j)
        for (Index i = 0; i < rows; ++i) m(i, j) = rng.normal();
    return m;
}

inline MatrixXd random_symmetric(Index d, ufcm::Rng& rng) {
    const MatrixXd a = random_matrix(d, d, rng);
    return 0.5 * (a + a.transpose());
}

inline MatrixXd center_rows(MatrixXd x) {
    for (Index j = 0; j < x.rows(); ++j) {
        double s = 0.0;
        for (Index i = 0; i < x.cols(); ++i) s += x(j, i);
        const double mean = s / static_cast<double>(x.cols());
        for (Index i = 0; i < x.cols(); ++i) x(j, i) -= mean;
    }
    return x;
}

// Modified Gram-Schmidt on a Gaussian matrix: a random d x k orthonormal frame.
inline MatrixXd random_orthonormal(Index d, Index k, ufcm::Rng& rng) {
    MatrixXd q = random_matrix(d, k, rng);
    for (Index j = 0; j < k; ++j) {
        for (Index i = 0; i < j; ++i) q.col(j) -= q.col(i).dot(q.col(j)) * q.col(i);
        q.col(j) /= q.col(j).norm();
    }
    return q;
}

// Cyclic Jacobi rotations. Returns all eigenvalues descending with their vectors.
inline std::pair<VectorXd, MatrixXd> jacobi_eigen(MatrixXd a) {
    const Index d = a.rows();
    MatrixXd v = MatrixXd::Identity(d, d);
    for (int sweep = 0; sweep < 100; ++sweep) {
        double off = 0.0;
        for (Index p = 0; p < d; ++p)
            for (Index q = p + 1; q < d; ++q) off += a(p, q) * a(p, q);
        if (off < 1e-30 * std::max(1.0, a.squaredNorm())) break;
        for (Index p = 0; p < d; ++p)
            for (Index q = p + 1; q < d; ++q) {
                if (std::abs(a(p, q)) < 1e-300) continue;
                const double theta = (a(q, q) - a(p, p)) / (2.0 * a(p, q));
                const double t = (theta >= 0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;
                for (Index k = 0; k < d; ++k) {
                    const double akp = a(k, p), akq = a(k, q);
                    a(k, p) = c * akp - s * akq;
                    a(k, q) = s * akp + c * akq;
                }
                for (Index k = 0; k < d; ++k) {
                    const double apk = a(p, k), aqk = a(q, k);
                    a(p, k) = c * apk - s * aqk;
                    a(q, k) = s * apk + c * aqk;
                }
                for (Index k = 0; k < d; ++k) {
                    const double vkp = v(k, p), vkq = v(k, q);
                    v(k, p) = c * vkp - s * vkq;
                    v(k, q) = s * vkp + c * vkq;
                }
            }
    }
    std::vector<Index> idx(static_cast<std::size_t>(d));
    std::iota(idx.begin(), idx.end(), Index{0});
    std::sort(idx.begin(), idx.end(), [&](Index i, Index j) { return a(i, i) > a(j, j); });
    VectorXd values(d);
    MatrixXd vectors(d, d);
    for (Index j = 0; j < d; ++j) {
        values(j) = a(idx[j], idx[j]);
        vectors.col(j) = v.col(idx[j]);
    }
    return {values, vectors};
}

// Sum of outer products (x_i - mean)(x_i - mean)^T with explicit loops.
inline MatrixXd naive_scatter(const MatrixXd& x) {
    const Index d = x.rows(), n = x.cols();
    VectorXd mean = VectorXd::Zero(d);
    for (Index i = 0; i < n; ++i)
        for (Index j = 0; j < d; ++j) mean(j) += x(j, i) / static_cast<double>(n);
    MatrixXd s = MatrixXd::Zero(d, d);
    for (Index i = 0; i < n; ++i)
        for (Index a = 0; a < d; ++a)
            for (Index b = 0; b < d; ++b) s(a, b) += (x(a, i) - mean(a)) * (x(b, i) - mean(b));
    return s;
}

// Per-cluster mean loop.
inline MatrixXd cluster_means(const MatrixXd& y, const std::vector<int>& labels, int c) {
    MatrixXd g = MatrixXd::Zero(y.rows(), c);
    std::vector<double> count(static_cast<std::size_t>(c), 0.0);
    for (Index i = 0; i < y.cols(); ++i) {
        for (Index r = 0; r < y.rows(); ++r) g(r, labels[i]) += y(r, i);
        count[labels[i]] += 1.0;
    }
    for (int k = 0; k < c; ++k)
        for (Index r = 0; r < y.rows(); ++r) g(r, k) /= count[k];
    return g;
}

inline double fit_loop(const MatrixXd& y, const MatrixXd& g, const std::vector<int>& labels) {
    double total = 0.0;
    for (Index i = 0; i < y.cols(); ++i)
        for (Index r = 0; r < y.rows(); ++r) {
            const double diff = y(r, i) - g(r, labels[i]);
            total += diff * diff;
        }
    return total;
}

// Calls visit(labels) for every labeling in {0..c-1}^n.
inline void for_each_labeling(Index n, int c, const std::function<void(const std::vector<int>&)>& visit) {
    std::vector<int> labels(static_cast<std::size_t>(n), 0);
    while (true) {
        visit(labels);
        Index pos = 0;
        while (pos < n && ++labels[pos] == c) labels[pos++] = 0;
        if (pos == n) return;
    }
}

// min over all one-hot U of ||Y - G U^T||_F^2.
inline double exhaustive_assign_min(const MatrixXd& y, const MatrixXd& g) {
    double best = std::numeric_limits<double>::infinity();
    for_each_labeling(y.cols(), static_cast<int>(g.cols()),
                      [&](const std::vector<int>& l) { best = std::min(best, fit_loop(y, g, l)); });
    return best;
}

// min over all partitions into c non-empty clusters of the fit with induced means.
inline double exhaustive_kmeans_min(const MatrixXd& y, int c) {
    double best = std::numeric_limits<double>::infinity();
    for_each_labeling(y.cols(), c, [&](const std::vector<int>& l) {
        std::vector<int> seen(static_cast<std::size_t>(c), 0);
        for (int v : l) seen[v] = 1;
        if (std::accumulate(seen.begin(), seen.end(), 0) != c) return;
        best = std::min(best, fit_loop(y, cluster_means(y, l, c), l));
    });
    return best;
}

inline std::vector<int> compact_labels(const std::vector<int>& v, int& count) {
    std::map<int, int> ids;
    for (int x : v) ids[x] = 0;
    int next = 0;
    for (auto& [k, id] : ids) id = next++;
    count = next;
    std::vector<int> out;
    for (int x : v) out.push_back(ids[x]);
    return out;
}

// Best injective mapping by enumerating permutations of the padded label set.
inline double brute_force_accuracy(const std::vector<int>& pred, const std::vector<int>& truth) {
    int kp = 0, kt = 0;
    const auto p = compact_labels(pred, kp);
    const auto t = compact_labels(truth, kt);
    std::vector<int> perm(static_cast<std::size_t>(std::max(kp, kt)));
    std::iota(perm.begin(), perm.end(), 0);
    int best = 0;
    do {
        int hits = 0;
        for (std::size_t i = 0; i < p.size(); ++i) hits += perm[p[i]] == t[i];
        best = std::max(best, hits);
    } while (std::next_permutation(perm.begin(), perm.end()));
    return static_cast<double>(best) / static_cast<double>(pred.size());
}

// The contingency-table formula written out with maps.
inline double nmi_formula(const std::vector<int>& pred, const std::vector<int>& truth) {
    const double n = static_cast<double>(pred.size());
    std::map<int, double> tl, th;
    std::map<std::pair<int, int>, double> tlh;
    for (std::size_t i = 0; i < pred.size(); ++i) {
        tl[pred[i]] += 1;
        th[truth[i]] += 1;
        tlh[{pred[i], truth[i]}] += 1;
    }
    double num = 0.0;
    for (const auto& [key, t] : tlh) num += t * std::log(n * t / (tl[key.first] * th[key.second]));
    double a = 0.0, b = 0.0;
    for (const auto& [k, t] : tl) a += t * std::log(t / n);
    for (const auto& [k, t] : th) b += t * std::log(t / n);
    return num / std::sqrt(a * b);
}

// I(P;T) / sqrt(H(P) H(T)) from empirical probabilities, base-2 logs.
inline double nmi_entropy(const std::vector<int>& pred, const std::vector<int>& truth) {
    const double n = static_cast<double>(pred.size());
    std::map<int, double> pl, pt;
    std::map<std::pair<int, int>, double> pj;
    for (std::size_t i = 0; i < pred.size(); ++i) {
        pl[pred[i]] += 1 / n;
        pt[truth[i]] += 1 / n;
        pj[{pred[i], truth[i]}] += 1 / n;
    }
    double mi = 0.0, hp = 0.0, ht = 0.0;
    for (const auto& [key, p] : pj) mi += p * std::log2(p / (pl[key.first] * pt[key.second]));
    for (const auto& [k, p] : pl) hp -= p * std::log2(p);
    for (const auto& [k, p] : pt) ht -= p * std::log2(p);
    return mi / std::sqrt(hp * ht);
}

}  // namespace oracle
