#include <doctest.h>

#include <cmath>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "rbeval/errors.hpp"
#include "rbeval/hashing.hpp"
#include "rbeval/stats/design.hpp"
#include "rbeval/stats/glm.hpp"
#include "rbeval/synthetic.hpp"

using namespace rbeval;
using namespace rbeval::stats;

namespace {

struct Data {
    Eigen::MatrixXd X;
    std::vector<int> y;
    std::vector<std::string> names{"(intercept)", "x"};
};

Data clustered_data(int n_clusters, int cluster_size, double rho, std::uint64_t seed,
                    std::vector<std::string>& cluster_ids) {
    Data d;
    const int n = n_clusters * cluster_size;
    d.X = Eigen::MatrixXd::Ones(n, 2);
    d.y.resize(static_cast<std::size_t>(n));
    cluster_ids.clear();
    int row = 0;
    for (int c = 0; c < n_clusters; ++c) {
        // Cluster-constant covariate.
        const double x = c % 2 == 0 ? 0.0 : 1.0;
        const double p = 1.0 / (1.0 + std::exp(-(-1.0 + 0.8 * x)));
        const double coin =
            StreamKey(seed).mix("coin").mix(static_cast<std::uint64_t>(c)).uniform01();
        const double shared =
            StreamKey(seed).mix("shared").mix(static_cast<std::uint64_t>(c)).uniform01();
        for (int i = 0; i < cluster_size; ++i, ++row) {
            d.X(row, 1) = x;
            double u;
            if (coin < rho) {
                u = shared;
            } else {
                u = StreamKey(seed)
                        .mix("own")
                        .mix(static_cast<std::uint64_t>(c))
                        .mix(static_cast<std::uint64_t>(i))
                        .uniform01();
            }
            d.y[static_cast<std::size_t>(row)] = u < p ? 1 : 0;
            cluster_ids.push_back("c" + std::to_string(c));
        }
    }
    return d;
}

}  // namespace

TEST_CASE("GEE point estimates equal the logistic MLE") {
    std::vector<std::string> ids;
    const auto d = clustered_data(30, 8, 0.4, 11, ids);
    const auto gee = fit_gee_binomial(d.X, d.y, ids, d.names, "flip");
    const auto mle = fit_binary_logistic(d.X, d.y, d.names, "flip");
    REQUIRE(gee.equations.size() == 1);
    for (std::size_t j = 0; j < 2; ++j) {
        CHECK(std::fabs(gee.equations[0].coefficients[j].estimate -
                        mle.equations[0].coefficients[j].estimate) < 1e-8);
    }
    CHECK(gee.n_clusters == 30);
    CHECK(gee.equations[0].coefficients[0].has_robust);
}

TEST_CASE("singleton clusters reduce the sandwich to HC0") {
    std::vector<std::string> ids;
    const auto d = clustered_data(40, 1, 0.0, 17, ids);
    const auto gee = fit_gee_binomial(d.X, d.y, ids, d.names, "flip");

    // Hand-assembled HC0: B^{-1} (sum_i s_i s_i^T) B^{-1} at the MLE.
    const auto mle = fit_binary_logistic(d.X, d.y, d.names, "flip");
    Eigen::VectorXd beta(2);
    beta << mle.equations[0].coefficients[0].estimate,
        mle.equations[0].coefficients[1].estimate;
    Eigen::MatrixXd bread = Eigen::MatrixXd::Zero(2, 2);
    Eigen::MatrixXd meat = Eigen::MatrixXd::Zero(2, 2);
    for (Eigen::Index i = 0; i < d.X.rows(); ++i) {
        const double eta = d.X.row(i).dot(beta);
        const double mu = 1.0 / (1.0 + std::exp(-eta));
        const Eigen::Vector2d xi = d.X.row(i).transpose();
        bread += mu * (1.0 - mu) * xi * xi.transpose();
        const double resid = d.y[static_cast<std::size_t>(i)] - mu;
        meat += (resid * xi) * (resid * xi).transpose();
    }
    const Eigen::MatrixXd hc0 = bread.inverse() * meat * bread.inverse();
    for (std::size_t j = 0; j < 2; ++j) {
        CHECK(gee.equations[0].coefficients[j].se_robust ==
              doctest::Approx(std::sqrt(hc0(static_cast<Eigen::Index>(j),
                                            static_cast<Eigen::Index>(j))))
                  .epsilon(1e-8));
    }
}

TEST_CASE("fewer than two clusters is an analysis error") {
    std::vector<std::string> ids;
    const auto d = clustered_data(2, 5, 0.0, 23, ids);
    std::vector<std::string> one_cluster(ids.size(), "only");
    CHECK_THROWS_WITH_AS(fit_gee_binomial(d.X, d.y, one_cluster, d.names, "flip"),
                         doctest::Contains("two clusters"), AnalysisError);
}

TEST_CASE("cluster label permutation does not change the sandwich") {
    std::vector<std::string> ids;
    const auto d = clustered_data(20, 6, 0.5, 29, ids);
    const auto a = fit_gee_binomial(d.X, d.y, ids, d.names, "flip");
    // Renaming clusters must not matter.
    std::vector<std::string> renamed;
    for (const auto& id : ids) renamed.push_back("prefix-" + id + "-suffix");
    const auto b = fit_gee_binomial(d.X, d.y, renamed, d.names, "flip");
    for (std::size_t j = 0; j < 2; ++j) {
        CHECK(a.equations[0].coefficients[j].se_robust ==
              doctest::Approx(b.equations[0].coefficients[j].se_robust).epsilon(1e-12));
    }
}

TEST_CASE("planted within-cluster correlation inflates the robust SE") {
    // With rho = 0.5 and a cluster-constant predictor, the sandwich must beat
    // the naive model SE in the vast majority of replicates.
    int robust_wins = 0;
    const int reps = 60;
    for (int r = 0; r < reps; ++r) {
        std::vector<std::string> ids;
        const auto d = clustered_data(40, 25, 0.5, 1000 + static_cast<std::uint64_t>(r), ids);
        const auto gee = fit_gee_binomial(d.X, d.y, ids, d.names, "flip");
        const auto& slope = gee.equations[0].coefficients[1];
        if (slope.se_robust > slope.se) ++robust_wins;
    }
    CHECK(robust_wins >= reps * 9 / 10);
}

TEST_CASE("GEE on synthetic campaign records clustered by base prompt") {
    SyntheticProfile profile;
    profile.model_id = "synthetic-gee";
    profile.seed = 404;
    profile.rho = 0.3;
    profile.roster = {{Artifact::RansomwareText, 6, "rw"}, {Artifact::OtherMixed, 6, "ox"}};
    profile.cells.set(Artifact::RansomwareText, std::nullopt,
                      OutcomeTriple{{0.75, 0.10, 0.15}});
    profile.cells.set(Artifact::OtherMixed, std::nullopt, OutcomeTriple{{0.92, 0.03, 0.05}});
    profile.validate();

    const auto records = generate_synthetic_campaign(profile);
    const auto dm = encode_factors(records, {Predictor::ArtifactType});
    const auto gee = fit_gee_binomial(dm.X, dm.y_flip, dm.cluster_ids, dm.col_names, "flip");
    CHECK(gee.n_clusters == 12);
    CHECK(gee.n_obs == 300);
    CHECK(gee.converged);
}
