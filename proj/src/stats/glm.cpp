#include "rbeval/stats/glm.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <set>

#include "rbeval/errors.hpp"

namespace rbeval::stats {

namespace {

constexpr int kMaxIterations = 100;
constexpr int kMaxHalvings = 30;
constexpr double kStepTol = 1e-10;
constexpr double kRelLogLikTol = 1e-13;
constexpr double kWeightFloor = 1e-10;
constexpr double kMaxStepInf = 5.0;
constexpr double kDivergedIntercept = 30.0;
constexpr double kZ95 = 1.96;

double quiet_nan() { return std::numeric_limits<double>::quiet_NaN(); }

double sigmoid(double x) {
    if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
    const double e = std::exp(x);
    return e / (1.0 + e);
}

double log1pexp(double x) {
    if (x > 33.0) return x;
    if (x > 0.0) return x + std::log1p(std::exp(-x));
    return std::log1p(std::exp(x));
}

void check_shapes(const Eigen::MatrixXd& X, const std::vector<int>& y,
                  const std::vector<std::string>& col_names) {
    if (X.rows() == 0 || X.cols() == 0) throw AnalysisError("empty design matrix");
    if (static_cast<std::size_t>(X.rows()) != y.size()) {
        throw AnalysisError("design matrix rows do not match response length");
    }
    if (static_cast<std::size_t>(X.cols()) != col_names.size()) {
        throw AnalysisError("design matrix columns do not match coefficient names");
    }
}

void check_rank(const Eigen::MatrixXd& X, const std::vector<std::string>& col_names) {
    Eigen::ColPivHouseholderQR<Eigen::MatrixXd> qr(X);
    if (qr.rank() == X.cols()) return;
    const auto& perm = qr.colsPermutation().indices();
    std::string names;
    for (Eigen::Index k = qr.rank(); k < X.cols(); ++k) {
        if (!names.empty()) names += ", ";
        names += col_names[static_cast<std::size_t>(perm(k))];
    }
    throw AnalysisError("design matrix is rank deficient; collinear column(s): " + names);
}

Coefficient make_coef(const std::string& name, double est, double se_model, double se_robust,
                      bool has_robust) {
    Coefficient c;
    c.name = name;
    c.estimate = est;
    c.se = se_model;
    c.se_robust = se_robust;
    c.has_robust = has_robust;
    c.quasi_infinite = std::fabs(est) > kQuasiInfiniteThreshold;
    if (c.quasi_infinite) {
        c.odds_ratio = quiet_nan();
        c.ci_lo = quiet_nan();
        c.ci_hi = quiet_nan();
        return c;
    }
    c.odds_ratio = std::exp(est);
    const double s = has_robust ? se_robust : se_model;
    c.ci_lo = std::exp(est - kZ95 * s);
    c.ci_hi = std::exp(est + kZ95 * s);
    return c;
}

Eigen::VectorXd model_se_from_information(const Eigen::MatrixXd& info) {
    const Eigen::MatrixXd cov = info.completeOrthogonalDecomposition().pseudoInverse();
    Eigen::VectorXd se(cov.rows());
    for (Eigen::Index j = 0; j < cov.rows(); ++j) {
        const double v = cov(j, j);
        se(j) = v > 0.0 ? std::sqrt(v) : quiet_nan();
    }
    return se;
}

struct BinaryCore {
    Eigen::VectorXd beta;
    double log_likelihood = 0.0;
    int iterations = 0;
    bool converged = false;
    std::vector<std::string> notes;
};

BinaryCore run_irls(const Eigen::MatrixXd& X, const std::vector<int>& y) {
    const Eigen::Index n = X.rows();
    const Eigen::Index p = X.cols();

    BinaryCore core;
    core.beta = Eigen::VectorXd::Zero(p);

    const std::size_t ones = static_cast<std::size_t>(std::count(y.begin(), y.end(), 1));
    if (ones == 0 || ones == y.size()) {
        // The likelihood has no interior maximum; report a pinned intercept
        // with the correct sign so downstream code sees a quasi-infinite flag.
        core.beta(0) = ones == 0 ? -kDivergedIntercept : kDivergedIntercept;
        core.log_likelihood = binary_loglik(X, y, core.beta);
        core.converged = true;
        core.notes.push_back("response is constant; intercept pinned at " +
                             std::to_string(core.beta(0)));
        return core;
    }

    double ll = binary_loglik(X, y, core.beta);
    for (core.iterations = 1; core.iterations <= kMaxIterations; ++core.iterations) {
        const Eigen::VectorXd eta = X * core.beta;
        Eigen::VectorXd w(n);
        Eigen::VectorXd z(n);
        for (Eigen::Index i = 0; i < n; ++i) {
            const double mu = sigmoid(eta(i));
            const double wi = std::max(mu * (1.0 - mu), kWeightFloor);
            w(i) = wi;
            z(i) = eta(i) + (static_cast<double>(y[static_cast<std::size_t>(i)]) - mu) / wi;
        }
        const Eigen::VectorXd sw = w.cwiseSqrt();
        const Eigen::MatrixXd Xw = sw.asDiagonal() * X;
        const Eigen::VectorXd zw = sw.cwiseProduct(z);
        const Eigen::VectorXd target = Xw.colPivHouseholderQr().solve(zw);

        Eigen::VectorXd delta = target - core.beta;
        const double raw_step = delta.lpNorm<Eigen::Infinity>();
        if (raw_step > kMaxStepInf) delta *= kMaxStepInf / raw_step;

        double ll_new = binary_loglik(X, y, core.beta + delta);
        int halvings = 0;
        while (ll_new < ll && halvings < kMaxHalvings) {
            delta *= 0.5;
            ll_new = binary_loglik(X, y, core.beta + delta);
            ++halvings;
        }
        if (ll_new < ll - 1e-12) {
            core.notes.push_back("step halving failed to improve the likelihood");
            break;
        }

        core.beta += delta;
        const double dll = std::fabs(ll_new - ll);
        ll = ll_new;
        if (delta.lpNorm<Eigen::Infinity>() < kStepTol ||
            dll < kRelLogLikTol * (1.0 + std::fabs(ll))) {
            core.converged = true;
            break;
        }
    }
    core.iterations = std::min(core.iterations, kMaxIterations);
    core.log_likelihood = ll;
    if (!core.converged) {
        core.notes.push_back("IRLS did not converge within " + std::to_string(kMaxIterations) +
                             " iterations");
    }
    return core;
}

Eigen::VectorXd true_weights(const Eigen::MatrixXd& X, const Eigen::VectorXd& beta) {
    const Eigen::VectorXd eta = X * beta;
    Eigen::VectorXd w(eta.size());
    for (Eigen::Index i = 0; i < eta.size(); ++i) {
        const double mu = sigmoid(eta(i));
        w(i) = mu * (1.0 - mu);
    }
    return w;
}

// Stable category probabilities for the baseline-category logit: row k of
// beta holds the coefficients of category k+1 against baseline 0.
Eigen::VectorXd category_probs(const Eigen::VectorXd& x, const Eigen::MatrixXd& beta) {
    const Eigen::Index m = beta.rows();
    Eigen::VectorXd eta(m + 1);
    eta(0) = 0.0;
    for (Eigen::Index k = 0; k < m; ++k) eta(k + 1) = beta.row(k).dot(x);
    const double top = eta.maxCoeff();
    Eigen::VectorXd e = (eta.array() - top).exp();
    return e / e.sum();
}

}  // namespace

double binary_loglik(const Eigen::MatrixXd& X, const std::vector<int>& y,
                     const Eigen::VectorXd& beta) {
    const Eigen::VectorXd eta = X * beta;
    double ll = 0.0;
    for (Eigen::Index i = 0; i < eta.size(); ++i) {
        ll += static_cast<double>(y[static_cast<std::size_t>(i)]) * eta(i) - log1pexp(eta(i));
    }
    return ll;
}

Eigen::VectorXd binary_score(const Eigen::MatrixXd& X, const std::vector<int>& y,
                             const Eigen::VectorXd& beta) {
    const Eigen::VectorXd eta = X * beta;
    Eigen::VectorXd resid(eta.size());
    for (Eigen::Index i = 0; i < eta.size(); ++i) {
        resid(i) = static_cast<double>(y[static_cast<std::size_t>(i)]) - sigmoid(eta(i));
    }
    return X.transpose() * resid;
}

FitResult fit_binary_logistic(const Eigen::MatrixXd& X, const std::vector<int>& y,
                              const std::vector<std::string>& col_names,
                              const std::string& equation_label) {
    check_shapes(X, y, col_names);
    check_rank(X, col_names);

    const BinaryCore core = run_irls(X, y);
    const Eigen::MatrixXd info =
        X.transpose() * true_weights(X, core.beta).asDiagonal() * X;
    const Eigen::VectorXd se = model_se_from_information(info);

    FitResult fit;
    fit.n_obs = y.size();
    fit.log_likelihood = core.log_likelihood;
    fit.iterations = core.iterations;
    fit.converged = core.converged;
    fit.notes = core.notes;

    Equation eq;
    eq.label = equation_label;
    for (Eigen::Index j = 0; j < X.cols(); ++j) {
        Coefficient c = make_coef(col_names[static_cast<std::size_t>(j)], core.beta(j), se(j),
                                  0.0, false);
        if (c.quasi_infinite) fit.any_quasi_infinite = true;
        eq.coefficients.push_back(std::move(c));
    }
    fit.equations.push_back(std::move(eq));
    return fit;
}

double multinomial_loglik(const Eigen::MatrixXd& X, const std::vector<int>& y,
                          const Eigen::MatrixXd& beta, int n_categories) {
    const Eigen::Index m = static_cast<Eigen::Index>(n_categories) - 1;
    if (beta.rows() != m || beta.cols() != X.cols()) {
        throw AnalysisError("multinomial coefficient matrix has the wrong shape");
    }
    double ll = 0.0;
    for (Eigen::Index i = 0; i < X.rows(); ++i) {
        Eigen::VectorXd eta(m + 1);
        eta(0) = 0.0;
        for (Eigen::Index k = 0; k < m; ++k) eta(k + 1) = beta.row(k).dot(X.row(i));
        const double top = eta.maxCoeff();
        const double lse = top + std::log((eta.array() - top).exp().sum());
        ll += eta(y[static_cast<std::size_t>(i)]) - lse;
    }
    return ll;
}

Eigen::MatrixXd multinomial_score(const Eigen::MatrixXd& X, const std::vector<int>& y,
                                  const Eigen::MatrixXd& beta, int n_categories) {
    const Eigen::Index m = static_cast<Eigen::Index>(n_categories) - 1;
    Eigen::MatrixXd score = Eigen::MatrixXd::Zero(m, X.cols());
    for (Eigen::Index i = 0; i < X.rows(); ++i) {
        const Eigen::VectorXd x = X.row(i);
        const Eigen::VectorXd probs = category_probs(x, beta);
        for (Eigen::Index k = 0; k < m; ++k) {
            const double ind = y[static_cast<std::size_t>(i)] == static_cast<int>(k + 1) ? 1.0
                                                                                         : 0.0;
            score.row(k) += (ind - probs(k + 1)) * x.transpose();
        }
    }
    return score;
}

FitResult fit_multinomial_logistic(const Eigen::MatrixXd& X, const std::vector<int>& y,
                                   const std::vector<std::string>& col_names,
                                   const std::vector<std::string>& category_names) {
    check_shapes(X, y, col_names);
    check_rank(X, col_names);
    for (int v : y) {
        if (v < 0 || static_cast<std::size_t>(v) >= category_names.size()) {
            throw AnalysisError("multinomial response value out of range");
        }
    }

    FitResult fit;
    fit.n_obs = y.size();

    // Work only with categories that actually occur; absent ones contribute
    // no estimable equation.
    std::set<int> seen(y.begin(), y.end());
    std::vector<int> observed(seen.begin(), seen.end());
    for (std::size_t c = 0; c < category_names.size(); ++c) {
        if (!seen.count(static_cast<int>(c))) {
            fit.unobserved_categories.push_back(category_names[c]);
        }
    }
    if (observed.size() < 2) {
        throw AnalysisError("multinomial fit requires at least two observed categories");
    }
    if (!fit.unobserved_categories.empty()) {
        std::string msg = "category(ies) never observed:";
        for (const auto& c : fit.unobserved_categories) msg += " " + c;
        fit.notes.push_back(msg);
    }

    std::map<int, int> remap;
    for (std::size_t i = 0; i < observed.size(); ++i) remap[observed[i]] = static_cast<int>(i);
    std::vector<int> yc(y.size());
    for (std::size_t i = 0; i < y.size(); ++i) yc[i] = remap.at(y[i]);

    const int n_cat = static_cast<int>(observed.size());
    const Eigen::Index m = n_cat - 1;
    const Eigen::Index p = X.cols();
    const Eigen::Index dim = m * p;

    Eigen::MatrixXd beta = Eigen::MatrixXd::Zero(m, p);
    double ll = multinomial_loglik(X, yc, beta, n_cat);
    bool converged = false;
    int iter = 0;
    for (iter = 1; iter <= kMaxIterations; ++iter) {
        Eigen::VectorXd grad = Eigen::VectorXd::Zero(dim);
        Eigen::MatrixXd neg_hess = Eigen::MatrixXd::Zero(dim, dim);
        for (Eigen::Index i = 0; i < X.rows(); ++i) {
            const Eigen::VectorXd x = X.row(i);
            const Eigen::VectorXd probs = category_probs(x, beta);
            for (Eigen::Index k = 0; k < m; ++k) {
                const double pk = probs(k + 1);
                const double ind =
                    yc[static_cast<std::size_t>(i)] == static_cast<int>(k + 1) ? 1.0 : 0.0;
                grad.segment(k * p, p) += (ind - pk) * x;
                for (Eigen::Index l = 0; l < m; ++l) {
                    const double pl = probs(l + 1);
                    const double wkl = pk * ((k == l ? 1.0 : 0.0) - pl);
                    neg_hess.block(k * p, l * p, p, p) += wkl * (x * x.transpose());
                }
            }
        }

        Eigen::VectorXd step;
        double ridge = 0.0;
        for (int attempt = 0; attempt < 8; ++attempt) {
            Eigen::MatrixXd H = neg_hess;
            if (ridge > 0.0) H.diagonal().array() += ridge;
            Eigen::LDLT<Eigen::MatrixXd> ldlt(H);
            if (ldlt.info() == Eigen::Success) {
                step = ldlt.solve(grad);
                if (step.allFinite()) break;
            }
            ridge = ridge == 0.0 ? 1e-8 * (1.0 + neg_hess.diagonal().maxCoeff()) : ridge * 10.0;
            step.resize(0);
        }
        if (step.size() == 0) {
            fit.notes.push_back("Newton system could not be solved even with ridge damping");
            break;
        }

        const double raw_step = step.lpNorm<Eigen::Infinity>();
        if (raw_step > kMaxStepInf) step *= kMaxStepInf / raw_step;

        auto unflatten = [&](const Eigen::VectorXd& v) {
            Eigen::MatrixXd b(m, p);
            for (Eigen::Index k = 0; k < m; ++k) b.row(k) = v.segment(k * p, p).transpose();
            return b;
        };

        Eigen::MatrixXd delta = unflatten(step);
        double ll_new = multinomial_loglik(X, yc, beta + delta, n_cat);
        int halvings = 0;
        while (ll_new < ll && halvings < kMaxHalvings) {
            delta *= 0.5;
            ll_new = multinomial_loglik(X, yc, beta + delta, n_cat);
            ++halvings;
        }
        if (ll_new < ll - 1e-12) {
            fit.notes.push_back("step halving failed to improve the likelihood");
            break;
        }

        beta += delta;
        const double dll = std::fabs(ll_new - ll);
        ll = ll_new;
        if (delta.lpNorm<Eigen::Infinity>() < kStepTol ||
            dll < kRelLogLikTol * (1.0 + std::fabs(ll))) {
            converged = true;
            break;
        }
    }

    fit.log_likelihood = ll;
    fit.iterations = std::min(iter, kMaxIterations);
    fit.converged = converged;
    if (!converged) {
        fit.notes.push_back("Newton iterations did not converge within " +
                            std::to_string(kMaxIterations) + " iterations");
    }

    // Model covariance from the observed information at the optimum.
    Eigen::MatrixXd neg_hess = Eigen::MatrixXd::Zero(dim, dim);
    for (Eigen::Index i = 0; i < X.rows(); ++i) {
        const Eigen::VectorXd x = X.row(i);
        const Eigen::VectorXd probs = category_probs(x, beta);
        for (Eigen::Index k = 0; k < m; ++k) {
            for (Eigen::Index l = 0; l < m; ++l) {
                const double wkl = probs(k + 1) * ((k == l ? 1.0 : 0.0) - probs(l + 1));
                neg_hess.block(k * p, l * p, p, p) += wkl * (x * x.transpose());
            }
        }
    }
    const Eigen::MatrixXd cov = neg_hess.completeOrthogonalDecomposition().pseudoInverse();

    const std::string baseline = category_names[static_cast<std::size_t>(observed[0])];
    for (Eigen::Index k = 0; k < m; ++k) {
        Equation eq;
        eq.label = category_names[static_cast<std::size_t>(observed[static_cast<std::size_t>(
                       k + 1)])] +
                   "_vs_" + baseline;
        for (Eigen::Index j = 0; j < p; ++j) {
            const Eigen::Index idx = k * p + j;
            const double v = cov(idx, idx);
            const double se = v > 0.0 ? std::sqrt(v) : quiet_nan();
            Coefficient c = make_coef(col_names[static_cast<std::size_t>(j)], beta(k, j), se,
                                      0.0, false);
            if (c.quasi_infinite) fit.any_quasi_infinite = true;
            eq.coefficients.push_back(std::move(c));
        }
        fit.equations.push_back(std::move(eq));
    }
    return fit;
}

FitResult fit_gee_binomial(const Eigen::MatrixXd& X, const std::vector<int>& y,
                           const std::vector<std::string>& cluster_ids,
                           const std::vector<std::string>& col_names,
                           const std::string& equation_label) {
    check_shapes(X, y, col_names);
    if (cluster_ids.size() != y.size()) {
        throw AnalysisError("cluster id list does not match response length");
    }
    check_rank(X, col_names);

    std::map<std::string, std::vector<Eigen::Index>> clusters;
    for (std::size_t i = 0; i < cluster_ids.size(); ++i) {
        clusters[cluster_ids[i]].push_back(static_cast<Eigen::Index>(i));
    }
    if (clusters.size() < 2) {
        throw AnalysisError("GEE requires at least two clusters, found " +
                            std::to_string(clusters.size()));
    }

    // Independence working correlation: the estimating equations coincide
    // with the logistic score, so the point estimates are the MLE.
    const BinaryCore core = run_irls(X, y);
    Eigen::VectorXd beta = core.beta;

    const Eigen::VectorXd w = true_weights(X, beta);
    const Eigen::MatrixXd bread = X.transpose() * w.asDiagonal() * X;
    const Eigen::MatrixXd bread_inv =
        bread.completeOrthogonalDecomposition().pseudoInverse();

    const Eigen::VectorXd eta = X * beta;
    Eigen::MatrixXd meat = Eigen::MatrixXd::Zero(X.cols(), X.cols());
    for (const auto& [id, rows] : clusters) {
        Eigen::VectorXd s = Eigen::VectorXd::Zero(X.cols());
        for (Eigen::Index i : rows) {
            const double resid =
                static_cast<double>(y[static_cast<std::size_t>(i)]) - sigmoid(eta(i));
            s += resid * X.row(i).transpose();
        }
        meat += s * s.transpose();
    }
    const Eigen::MatrixXd sandwich = bread_inv * meat * bread_inv;
    const Eigen::VectorXd se_model = model_se_from_information(bread);

    FitResult fit;
    fit.n_obs = y.size();
    fit.n_clusters = clusters.size();
    fit.log_likelihood = core.log_likelihood;
    fit.iterations = core.iterations;
    fit.converged = core.converged;
    fit.notes = core.notes;

    Equation eq;
    eq.label = equation_label;
    for (Eigen::Index j = 0; j < X.cols(); ++j) {
        const double v = sandwich(j, j);
        const double se_r = v > 0.0 ? std::sqrt(v) : quiet_nan();
        Coefficient c =
            make_coef(col_names[static_cast<std::size_t>(j)], beta(j), se_model(j), se_r, true);
        if (c.quasi_infinite) fit.any_quasi_infinite = true;
        eq.coefficients.push_back(std::move(c));
    }
    fit.equations.push_back(std::move(eq));
    return fit;
}

}  // namespace rbeval::stats
