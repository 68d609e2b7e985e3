#include <doctest.h>

#include <set>

#include "oracles.hpp"
#include "ufcm/kmeans.hpp"

using namespace ufcm;
using Eigen::MatrixXd;

TEST_CASE("assign: nearest center and tie rule") {
    MatrixXd y(1, 2);
    y << 0, 10;
    CentroidMatrix g{MatrixXd(1, 2)};
    g.centers << 1, 9;
    CHECK(assign(y, g).assignments == std::vector<int>{0, 1});

    MatrixXd mid(1, 1);
    mid << 5;
    CHECK(assign_nearest(mid, g).assignments == std::vector<int>{0});
}

TEST_CASE("assign: dimension mismatch") {
    CentroidMatrix g{MatrixXd::Zero(2, 3)};
    CHECK_THROWS_AS(assign(MatrixXd::Zero(3, 5), g), ClusteringError);
}

TEST_CASE("assign: nearest assignment is the exhaustive minimum") {
    Rng rng(101);
    for (int trial = 0; trial < 10; ++trial) {
        const Index n = 12;
        const int c = 3;
        const MatrixXd y = oracle::random_matrix(2, n, rng);
        const CentroidMatrix g{oracle::random_matrix(2, c, rng)};
        const IndicatorMatrix u = assign_nearest(y, g);
        CHECK(std::abs(fit_term(y, g, u) - oracle::exhaustive_assign_min(y, g.centers)) <= 1e-10);
    }
}

TEST_CASE("assign: empty clusters are repaired from the largest cluster") {
    MatrixXd y(1, 5);
    y << 0, 1, 2, 3, 10;
    CentroidMatrix g{MatrixXd(1, 3)};
    g.centers << 1, 100, 200;  // everything lands in cluster 0
    const IndicatorMatrix nearest = assign_nearest(y, g);
    CHECK_FALSE(nearest.all_nonempty());
    const IndicatorMatrix u = assign(y, g);
    CHECK(u.all_nonempty());
    // Farthest from centroid 1.0 is the sample at 10, then the sample at 3.
    CHECK(u.assignments == std::vector<int>{0, 0, 0, 2, 1});
}

TEST_CASE("IndicatorMatrix::dense is one-hot") {
    IndicatorMatrix u{{0, 2, 1, 2}, 3};
    const MatrixXd dense = u.dense();
    CHECK(dense.rows() == 4);
    CHECK(dense.cols() == 3);
    for (Index i = 0; i < 4; ++i) CHECK(dense.row(i).sum() == 1.0);
    CHECK(dense(1, 2) == 1.0);
    CHECK(u.sizes() == std::vector<Index>{1, 1, 2});
}

TEST_CASE("centroids") {
    Rng rng(3);
    const MatrixXd y = oracle::random_matrix(3, 5, rng);
    SUBCASE("singleton clusters reproduce the samples") {
        const IndicatorMatrix u{{2, 0, 4, 1, 3}, 5};
        const CentroidMatrix g = centroids(y, u);
        for (Index i = 0; i < 5; ++i) CHECK((g.centers.col(u.assignments[i]) - y.col(i)).norm() <= 1e-15);
    }
    SUBCASE("one cluster is the global mean") {
        const IndicatorMatrix u{{0, 0, 0, 0, 0}, 1};
        CHECK((centroids(y, u).centers.col(0) - y.rowwise().mean()).norm() <= 1e-14);
    }
    SUBCASE("matches Y U (U^T U)^-1 and the mean loop") {
        const IndicatorMatrix u{{0, 1, 1, 0, 2}, 3};
        const MatrixXd dense = u.dense();
        const MatrixXd closed = y * dense * (dense.transpose() * dense).inverse();
        const CentroidMatrix g = centroids(y, u);
        CHECK((g.centers - closed).cwiseAbs().maxCoeff() <= 1e-10);
        CHECK((g.centers - oracle::cluster_means(y, u.assignments, 3)).cwiseAbs().maxCoeff() <= 1e-10);
    }
    SUBCASE("empty cluster") {
        CHECK_THROWS_AS(centroids(y, IndicatorMatrix{{0, 0, 0, 0, 0}, 2}), ClusteringError);
    }
}

TEST_CASE("centroids minimize the fit for fixed U") {
    Rng rng(9);
    const MatrixXd y = oracle::random_matrix(2, 9, rng);
    const IndicatorMatrix u{{0, 1, 2, 0, 1, 2, 0, 1, 2}, 3};
    const CentroidMatrix g = centroids(y, u);
    const double best = fit_term(y, g, u);
    for (int t = 0; t < 50; ++t) {
        CentroidMatrix perturbed{g.centers + 0.1 * oracle::random_matrix(2, 3, rng)};
        CHECK(fit_term(y, perturbed, u) >= best);
    }
}

TEST_CASE("run_kmeans: separated groups, fit non-increasing, determinism") {
    MatrixXd y(1, 8);
    y << 0, 0.1, 0.2, 0.3, 10, 10.1, 10.2, 10.3;
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
        const KMeansResult r = run_kmeans(y, 2, seed);
        for (int i = 1; i < 4; ++i) CHECK(r.u.assignments[i] == r.u.assignments[0]);
        for (int i = 5; i < 8; ++i) CHECK(r.u.assignments[i] == r.u.assignments[4]);
        CHECK(r.u.assignments[0] != r.u.assignments[4]);
        for (std::size_t k = 1; k < r.fit_history.size(); ++k)
            CHECK(r.fit_history[k] <= r.fit_history[k - 1] + 1e-12);
    }
    const KMeansResult a = run_kmeans(y, 2, 5);
    const KMeansResult b = run_kmeans(y, 2, 5);
    CHECK(a.u.assignments == b.u.assignments);
    CHECK(a.fit == b.fit);
}

TEST_CASE("run_kmeans: c = n gives zero fit") {
    Rng rng(1);
    const MatrixXd y = oracle::random_matrix(2, 6, rng);
    CHECK(run_kmeans(y, 6, 3).fit == doctest::Approx(0.0));
}

TEST_CASE("run_kmeans: fit sequence non-increasing on random data") {
    Rng rng(17);
    for (std::uint64_t seed = 0; seed < 30; ++seed) {
        const MatrixXd y = oracle::random_matrix(3, 40, rng);
        const KMeansResult r = run_kmeans(y, 5, seed);
        CHECK(r.u.all_nonempty());
        for (std::size_t k = 1; k < r.fit_history.size(); ++k)
            CHECK(r.fit_history[k] <= r.fit_history[k - 1] * (1 + 1e-12));
    }
}

TEST_CASE("run_kmeans: reaches the exhaustive optimum on most seeds") {
    Rng rng(2024);
    MatrixXd y = oracle::random_matrix(2, 10, rng);
    y.leftCols(5).array() += 4.0;
    const double optimum = oracle::exhaustive_kmeans_min(y, 2);
    int hits = 0;
    for (std::uint64_t seed = 0; seed < 50; ++seed)
        hits += std::abs(run_kmeans(y, 2, seed).fit - optimum) <= 1e-8;
    CHECK(hits >= 45);
}

TEST_CASE("run_kmeans: c > n") {
    CHECK_THROWS_AS(run_kmeans(MatrixXd::Zero(1, 3), 4, 0), ClusteringError);
}

TEST_CASE("update_u_with_candidates") {
    Rng rng(55);
    const MatrixXd y = oracle::random_matrix(2, 10, rng);

    SUBCASE("r = 0 keeps the incumbent with its induced centroids") {
        const IndicatorMatrix u{{0, 1, 0, 1, 0, 1, 0, 1, 0, 1}, 2};
        const KMeansResult r = update_u_with_candidates(y, u, 2, 0, 1);
        CHECK(r.u.assignments == u.assignments);
        CHECK((r.g.centers - centroids(y, u).centers).norm() == 0.0);
    }
    SUBCASE("an optimal incumbent is kept at its fit") {
        const double optimum = oracle::exhaustive_kmeans_min(y, 2);
        // Recover the optimal labeling by enumeration.
        std::vector<int> best_labels;
        oracle::for_each_labeling(10, 2, [&](const std::vector<int>& l) {
            if (std::count(l.begin(), l.end(), 0) == 0 || std::count(l.begin(), l.end(), 1) == 0) return;
            if (std::abs(oracle::fit_loop(y, oracle::cluster_means(y, l, 2), l) - optimum) <= 1e-12 &&
                best_labels.empty())
                best_labels = l;
        });
        const KMeansResult r = update_u_with_candidates(y, IndicatorMatrix{best_labels, 2}, 2, 10, 4);
        CHECK(r.fit == doctest::Approx(optimum).epsilon(1e-12));
    }
    SUBCASE("never worse than the incumbent") {
        Rng seeds(8);
        for (int t = 0; t < 30; ++t) {
            IndicatorMatrix u{std::vector<int>(10), 3};
            for (int i = 0; i < 10; ++i) u.assignments[i] = i % 3;
            for (int i = 9; i > 0; --i) std::swap(u.assignments[i], u.assignments[seeds.index(i + 1)]);
            const double incumbent = fit_term(y, centroids(y, u), u);
            const KMeansResult r = update_u_with_candidates(y, u, 3, 4, static_cast<std::uint64_t>(t));
            CHECK(r.fit <= incumbent + 1e-12);
            CHECK(std::abs(r.fit - fit_term(y, r.g, r.u)) <= 1e-12);
        }
    }
    SUBCASE("mismatched incumbent") {
        CHECK_THROWS_AS(update_u_with_candidates(y, IndicatorMatrix{{0, 1}, 2}, 2, 1, 0), ClusteringError);
    }
}
