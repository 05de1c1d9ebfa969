#pragma once

// Derivative-free reference implementations used to cross-check the stats
// engine. Everything here is deliberately written from the textbook formulas
// with plain containers and a Nelder-Mead minimizer, sharing no code with the
// library under test.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <numeric>
#include <stdexcept>
#include <vector>

namespace oracle {

using Matrix = std::vector<std::vector<double>>;

inline double row_dot(const Matrix& x, std::size_t i, const std::vector<double>& beta,
                      std::size_t offset = 0) {
    double s = 0.0;
    for (std::size_t j = 0; j < x[i].size(); ++j) s += x[i][j] * beta[offset + j];
    return s;
}

// Negative Bernoulli log-likelihood; log(1+e^eta) via the max trick.
inline double binary_negll(const Matrix& x, const std::vector<int>& y,
                           const std::vector<double>& beta) {
    double ll = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double eta = row_dot(x, i, beta);
        const double lse = std::max(eta, 0.0) + std::log1p(std::exp(-std::fabs(eta)));
        ll += y[i] * eta - lse;
    }
    return -ll;
}

// Negative baseline-category multinomial log-likelihood. y holds category
// indices 0..c-1 with 0 the baseline; beta is (c-1) blocks of p coefficients.
inline double multinomial_negll(const Matrix& x, const std::vector<int>& y,
                                std::size_t n_categories, const std::vector<double>& beta) {
    const std::size_t p = x.empty() ? 0 : x[0].size();
    double ll = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        std::vector<double> eta(n_categories, 0.0);
        for (std::size_t k = 1; k < n_categories; ++k)
            eta[k] = row_dot(x, i, beta, (k - 1) * p);
        const double m = *std::max_element(eta.begin(), eta.end());
        double denom = 0.0;
        for (double e : eta) denom += std::exp(e - m);
        ll += eta[static_cast<std::size_t>(y[i])] - (m + std::log(denom));
    }
    return -ll;
}

template <typename F>
std::vector<double> central_gradient(F f, std::vector<double> x, double h = 1e-5) {
    std::vector<double> g(x.size());
    for (std::size_t j = 0; j < x.size(); ++j) {
        const double saved = x[j];
        x[j] = saved + h;
        const double fp = f(x);
        x[j] = saved - h;
        const double fm = f(x);
        x[j] = saved;
        g[j] = (fp - fm) / (2.0 * h);
    }
    return g;
}

struct MinimizeResult {
    std::vector<double> x;
    double fval = 0.0;
    bool converged = false;
};

namespace detail {

template <typename F>
MinimizeResult nelder_mead_round(F f, const std::vector<double>& start, double scale,
                                 std::size_t max_iter) {
    const std::size_t n = start.size();
    std::vector<std::vector<double>> simplex(n + 1, start);
    for (std::size_t j = 0; j < n; ++j) simplex[j + 1][j] += scale;
    std::vector<double> fv(n + 1);
    for (std::size_t k = 0; k <= n; ++k) fv[k] = f(simplex[k]);

    MinimizeResult result;
    for (std::size_t iter = 0; iter < max_iter; ++iter) {
        std::vector<std::size_t> order(n + 1);
        std::iota(order.begin(), order.end(), std::size_t{0});
        std::sort(order.begin(), order.end(),
                  [&](std::size_t a, std::size_t b) { return fv[a] < fv[b]; });
        const std::size_t best = order[0];
        const std::size_t worst = order[n];
        const std::size_t second_worst = order[n - 1];

        double spread = std::fabs(fv[worst] - fv[best]);
        double diameter = 0.0;
        for (std::size_t j = 0; j < n; ++j)
            diameter = std::max(diameter, std::fabs(simplex[worst][j] - simplex[best][j]));
        if (spread < 1e-14 * (1.0 + std::fabs(fv[best])) && diameter < 1e-9) {
            result.converged = true;
            break;
        }

        std::vector<double> centroid(n, 0.0);
        for (std::size_t k = 0; k <= n; ++k) {
            if (k == worst) continue;
            for (std::size_t j = 0; j < n; ++j) centroid[j] += simplex[k][j];
        }
        for (double& c : centroid) c /= static_cast<double>(n);

        auto blend = [&](double t) {
            std::vector<double> pt(n);
            for (std::size_t j = 0; j < n; ++j)
                pt[j] = centroid[j] + t * (centroid[j] - simplex[worst][j]);
            return pt;
        };

        std::vector<double> reflected = blend(1.0);
        const double fr = f(reflected);
        if (fr < fv[best]) {
            std::vector<double> expanded = blend(2.0);
            const double fe = f(expanded);
            if (fe < fr) {
                simplex[worst] = std::move(expanded);
                fv[worst] = fe;
            } else {
                simplex[worst] = std::move(reflected);
                fv[worst] = fr;
            }
        } else if (fr < fv[second_worst]) {
            simplex[worst] = std::move(reflected);
            fv[worst] = fr;
        } else {
            std::vector<double> contracted = blend(fr < fv[worst] ? 0.5 : -0.5);
            const double fc = f(contracted);
            if (fc < std::min(fr, fv[worst])) {
                simplex[worst] = std::move(contracted);
                fv[worst] = fc;
            } else {
                for (std::size_t k = 0; k <= n; ++k) {
                    if (k == best) continue;
                    for (std::size_t j = 0; j < n; ++j)
                        simplex[k][j] = simplex[best][j] + 0.5 * (simplex[k][j] - simplex[best][j]);
                    fv[k] = f(simplex[k]);
                }
            }
        }
    }

    std::size_t best = 0;
    for (std::size_t k = 1; k <= n; ++k)
        if (fv[k] < fv[best]) best = k;
    result.x = simplex[best];
    result.fval = fv[best];
    return result;
}

}  // namespace detail

// Nelder-Mead with shrinking restarts around the incumbent. Plenty for the
// smooth strictly convex negative log-likelihoods exercised in the tests.
template <typename F>
MinimizeResult minimize(F f, std::vector<double> x0) {
    const std::size_t n = x0.size();
    MinimizeResult best;
    best.x = std::move(x0);
    best.fval = f(best.x);
    for (double scale : {0.5, 0.05, 0.005, 5e-4, 5e-5}) {
        MinimizeResult r =
            detail::nelder_mead_round(f, best.x, scale, 4000 * std::max<std::size_t>(n, 1));
        if (r.fval <= best.fval) {
            best.x = r.x;
            best.fval = r.fval;
            best.converged = r.converged;
        }
    }
    return best;
}

}  // namespace oracle
