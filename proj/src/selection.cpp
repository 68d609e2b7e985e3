#include "ufcm/selection.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <numeric>
#include <string>

#include "ufcm/kmeans.hpp"
#include "ufcm/random.hpp"

namespace ufcm {

double l2p_norm(const Eigen::MatrixXd& m, double p) {
    if (!(p > 0.0)) throw MetricError("l2p_norm: p must be positive");
    double total = 0.0;
    for (Index i = 0; i < m.rows(); ++i) total += std::pow(m.row(i).squaredNorm(), p / 2.0);
    return std::pow(total, 1.0 / p);
}

FeatureRanking ranking_from_scores(Eigen::VectorXd scores) {
    FeatureRanking out;
    out.order.resize(static_cast<std::size_t>(scores.size()));
    std::iota(out.order.begin(), out.order.end(), Index{0});
    std::stable_sort(out.order.begin(), out.order.end(),
                     [&](Index a, Index b) { return scores(a) > scores(b); });
    out.scores = std::move(scores);
    return out;
}

FeatureRanking rank_features(const CoefficientMatrix& w) {
    return ranking_from_scores(w.w.rowwise().norm());
}

FeatureRanking max_variance_ranking(const DataMatrix& data) {
    const Index n = data.samples();
    if (n < 2) throw MetricError("max_variance_ranking: need at least two samples");
    Eigen::VectorXd var(data.features());
    for (Index j = 0; j < data.features(); ++j) {
        const double mean = data.values.row(j).mean();
        var(j) = (data.values.row(j).array() - mean).square().sum() / static_cast<double>(n - 1);
    }
    return ranking_from_scores(std::move(var));
}

DataMatrix select(const DataMatrix& data, const FeatureRanking& ranking, Index m) {
    if (m < 1 || m > data.features())
        throw MetricError("select: m = " + std::to_string(m) + " outside [1, " +
                          std::to_string(data.features()) + "]");
    if (static_cast<Index>(ranking.order.size()) != data.features())
        throw MetricError("select: ranking does not match feature count");
    DataMatrix out;
    out.values.resize(m, data.samples());
    for (Index j = 0; j < m; ++j) {
        const Index src = ranking.order[static_cast<std::size_t>(j)];
        out.values.row(j) = data.values.row(src);
        if (!data.feature_names.empty()) out.feature_names.push_back(data.feature_names[static_cast<std::size_t>(src)]);
    }
    out.labels = data.labels;
    return out;
}

namespace {

std::vector<int> compact(std::span<const int> labels, int& count) {
    std::map<int, int> ids;
    for (int l : labels) ids.emplace(l, 0);
    int next = 0;
    for (auto& [key, id] : ids) id = next++;
    count = next;
    std::vector<int> out;
    out.reserve(labels.size());
    for (int l : labels) out.push_back(ids.at(l));
    return out;
}

void check_pair(std::span<const int> pred, std::span<const int> truth) {
    if (pred.size() != truth.size())
        throw MetricError("label sequences differ in length (" + std::to_string(pred.size()) + " vs " +
                          std::to_string(truth.size()) + ")");
    if (pred.empty()) throw MetricError("label sequences are empty");
}

}  // namespace

ContingencyTable contingency(std::span<const int> pred, std::span<const int> truth) {
    check_pair(pred, truth);
    int rows = 0;
    int cols = 0;
    const auto p = compact(pred, rows);
    const auto t = compact(truth, cols);
    ContingencyTable table;
    table.counts = Eigen::Matrix<Index, Eigen::Dynamic, Eigen::Dynamic>::Zero(rows, cols);
    for (std::size_t i = 0; i < p.size(); ++i) ++table.counts(p[i], t[i]);
    table.n = static_cast<Index>(p.size());
    return table;
}

std::vector<Index> max_weight_matching(const Eigen::MatrixXd& weights) {
    const Index k = weights.rows();
    if (weights.cols() != k) throw MetricError("max_weight_matching: matrix must be square");
    if (k == 0) return {};
    const double top = weights.maxCoeff();
    // Minimum-cost assignment on cost = top - weight; 1-based arrays, column 0 is a sentinel.
    const double inf = std::numeric_limits<double>::infinity();
    std::vector<double> row_pot(static_cast<std::size_t>(k + 1), 0.0), col_pot(static_cast<std::size_t>(k + 1), 0.0);
    std::vector<Index> match(static_cast<std::size_t>(k + 1), 0), way(static_cast<std::size_t>(k + 1), 0);
    auto cost = [&](Index r, Index c) { return top - weights(r - 1, c - 1); };
    for (Index r = 1; r <= k; ++r) {
        match[0] = r;
        Index col = 0;
        std::vector<double> slack(static_cast<std::size_t>(k + 1), inf);
        std::vector<bool> used(static_cast<std::size_t>(k + 1), false);
        do {
            used[static_cast<std::size_t>(col)] = true;
            const Index row = match[static_cast<std::size_t>(col)];
            double delta = inf;
            Index next = 0;
            for (Index j = 1; j <= k; ++j) {
                const auto sj = static_cast<std::size_t>(j);
                if (used[sj]) continue;
                const double reduced = cost(row, j) - row_pot[static_cast<std::size_t>(row)] - col_pot[sj];
                if (reduced < slack[sj]) {
                    slack[sj] = reduced;
                    way[sj] = col;
                }
                if (slack[sj] < delta) {
                    delta = slack[sj];
                    next = j;
                }
            }
            for (Index j = 0; j <= k; ++j) {
                const auto sj = static_cast<std::size_t>(j);
                if (used[sj]) {
                    row_pot[static_cast<std::size_t>(match[sj])] += delta;
                    col_pot[sj] -= delta;
                } else {
                    slack[sj] -= delta;
                }
            }
            col = next;
        } while (match[static_cast<std::size_t>(col)] != 0);
        do {
            const Index prev = way[static_cast<std::size_t>(col)];
            match[static_cast<std::size_t>(col)] = match[static_cast<std::size_t>(prev)];
            col = prev;
        } while (col != 0);
    }
    std::vector<Index> row_to_col(static_cast<std::size_t>(k));
    for (Index j = 1; j <= k; ++j) row_to_col[static_cast<std::size_t>(match[static_cast<std::size_t>(j)] - 1)] = j - 1;
    return row_to_col;
}

double accuracy(std::span<const int> pred, std::span<const int> truth) {
    const ContingencyTable table = contingency(pred, truth);
    const Index k = std::max(table.counts.rows(), table.counts.cols());
    Eigen::MatrixXd weights = Eigen::MatrixXd::Zero(k, k);
    weights.topLeftCorner(table.counts.rows(), table.counts.cols()) = table.counts.cast<double>();
    const auto matching = max_weight_matching(weights);
    Index matched = 0;
    for (Index r = 0; r < table.counts.rows(); ++r) {
        const Index c = matching[static_cast<std::size_t>(r)];
        if (c < table.counts.cols()) matched += table.counts(r, c);
    }
    return static_cast<double>(matched) / static_cast<double>(table.n);
}

double nmi(std::span<const int> pred, std::span<const int> truth) {
    const ContingencyTable table = contingency(pred, truth);
    const auto rows = table.counts.rows();
    const auto cols = table.counts.cols();
    if (rows == 1 || cols == 1) return rows == cols ? 1.0 : 0.0;

    const double n = static_cast<double>(table.n);
    const Eigen::VectorXd t_pred = table.counts.cast<double>().rowwise().sum();
    const Eigen::VectorXd t_true = table.counts.cast<double>().colwise().sum().transpose();
    double mutual = 0.0;
    for (Index l = 0; l < rows; ++l)
        for (Index h = 0; h < cols; ++h) {
            const double t = static_cast<double>(table.counts(l, h));
            if (t > 0.0) mutual += t * std::log(n * t / (t_pred(l) * t_true(h)));
        }
    double h_pred = 0.0;
    double h_true = 0.0;
    for (Index l = 0; l < rows; ++l) h_pred += t_pred(l) * std::log(t_pred(l) / n);
    for (Index h = 0; h < cols; ++h) h_true += t_true(h) * std::log(t_true(h) / n);
    // Both sums are negative; their product is positive.
    const double value = mutual / std::sqrt(h_pred * h_true);
    return std::clamp(value, 0.0, 1.0);
}

namespace {

void summarize(const std::vector<double>& v, double& mean, double& sd) {
    mean = std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
    double ss = 0.0;
    for (double x : v) ss += (x - mean) * (x - mean);
    sd = std::sqrt(ss / static_cast<double>(v.size()));
}

}  // namespace

ClusteringScores evaluate_clustering(const DataMatrix& data, int c, int runs, std::uint64_t seed,
                                     int kmeans_max_iter) {
    if (!data.labels) throw MetricError("evaluate_clustering: dataset has no ground-truth labels");
    if (runs < 1) throw MetricError("evaluate_clustering: runs must be positive");
    ClusteringScores out;
    for (int run = 0; run < runs; ++run) {
        const KMeansResult km =
            run_kmeans(data.values, c, derive_seed(seed, static_cast<std::uint64_t>(run)), kmeans_max_iter);
        out.acc_runs.push_back(accuracy(km.u.assignments, *data.labels));
        out.nmi_runs.push_back(nmi(km.u.assignments, *data.labels));
    }
    summarize(out.acc_runs, out.acc_mean, out.acc_std);
    summarize(out.nmi_runs, out.nmi_mean, out.nmi_std);
    return out;
}

ClusteringScores evaluate_clustering(const DataMatrix& data, const FeatureRanking& ranking, Index m, int c,
                                     int runs, std::uint64_t seed, int kmeans_max_iter) {
    return evaluate_clustering(select(data, ranking, m), c, runs, seed, kmeans_max_iter);
}

}  // namespace ufcm
