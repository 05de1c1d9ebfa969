#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>

namespace rbeval::stats {

// Estimates with |beta| beyond this are treated as quasi-infinite: the sign
// is meaningful, the magnitude and Wald interval are not.
constexpr double kQuasiInfiniteThreshold = 15.0;

struct Coefficient {
    std::string name;
    double estimate = 0.0;
    double se = 0.0;            // model-based
    double se_robust = 0.0;     // 0 unless a robust variance was computed
    bool has_robust = false;
    double odds_ratio = 0.0;
    double ci_lo = 0.0;         // 95% Wald interval on the odds-ratio scale
    double ci_hi = 0.0;
    bool quasi_infinite = false;
};

struct Equation {
    std::string label;
    std::vector<Coefficient> coefficients;
};

struct FitResult {
    std::vector<Equation> equations;
    double log_likelihood = 0.0;
    int iterations = 0;
    bool converged = false;
    bool any_quasi_infinite = false;
    std::size_t n_obs = 0;
    std::size_t n_clusters = 0;
    std::vector<std::string> unobserved_categories;
    std::vector<std::string> notes;
};

double binary_loglik(const Eigen::MatrixXd& X, const std::vector<int>& y,
                     const Eigen::VectorXd& beta);
Eigen::VectorXd binary_score(const Eigen::MatrixXd& X, const std::vector<int>& y,
                             const Eigen::VectorXd& beta);

// Maximum likelihood logistic regression via iteratively reweighted least
// squares; each weighted solve uses a column-pivoted QR decomposition.
FitResult fit_binary_logistic(const Eigen::MatrixXd& X, const std::vector<int>& y,
                              const std::vector<std::string>& col_names,
                              const std::string& equation_label);

// Log likelihood of the baseline-category logit model. beta holds one row per
// non-baseline category (categories 1..c-1 of y), columns match X.
double multinomial_loglik(const Eigen::MatrixXd& X, const std::vector<int>& y,
                          const Eigen::MatrixXd& beta, int n_categories);
Eigen::MatrixXd multinomial_score(const Eigen::MatrixXd& X, const std::vector<int>& y,
                                  const Eigen::MatrixXd& beta, int n_categories);

// Baseline-category multinomial logit fit by Newton iterations. Category 0 is
// the baseline; equations are produced only for categories observed in y.
FitResult fit_multinomial_logistic(const Eigen::MatrixXd& X, const std::vector<int>& y,
                                   const std::vector<std::string>& col_names,
                                   const std::vector<std::string>& category_names);

// Generalized estimating equations with an independence working correlation:
// point estimates coincide with the logistic MLE, standard errors come from
// the cluster-robust sandwich.
FitResult fit_gee_binomial(const Eigen::MatrixXd& X, const std::vector<int>& y,
                           const std::vector<std::string>& cluster_ids,
                           const std::vector<std::string>& col_names,
                           const std::string& equation_label);

}  // namespace rbeval::stats
