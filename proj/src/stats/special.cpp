#include "rbeval/stats/special.hpp"

#include <cmath>
#include <limits>

#include "rbeval/errors.hpp"

namespace rbeval::stats {

namespace {

constexpr int kMaxIter = 500;
constexpr double kEps = 1e-15;

// Lower regularized gamma P(a, x) by series expansion; converges fast for
// x < a + 1.
double gamma_p_series(double a, double x) {
    double ap = a;
    double sum = 1.0 / a;
    double term = sum;
    for (int i = 0; i < kMaxIter; ++i) {
        ap += 1.0;
        term *= x / ap;
        sum += term;
        if (std::fabs(term) < std::fabs(sum) * kEps) break;
    }
    return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

// Upper regularized gamma Q(a, x) by modified Lentz continued fraction;
// converges fast for x >= a + 1.
double gamma_q_cf(double a, double x) {
    const double tiny = std::numeric_limits<double>::min() / kEps;
    double b = x + 1.0 - a;
    double c = 1.0 / tiny;
    double d = 1.0 / b;
    double h = d;
    for (int i = 1; i <= kMaxIter; ++i) {
        const double an = -static_cast<double>(i) * (static_cast<double>(i) - a);
        b += 2.0;
        d = an * d + b;
        if (std::fabs(d) < tiny) d = tiny;
        c = b + an / c;
        if (std::fabs(c) < tiny) c = tiny;
        d = 1.0 / d;
        const double delta = d * c;
        h *= delta;
        if (std::fabs(delta - 1.0) < kEps) break;
    }
    return h * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

}  // namespace

double gamma_q(double a, double x) {
    if (!(a > 0.0) || !std::isfinite(a)) {
        throw AnalysisError("gamma_q requires a > 0");
    }
    if (std::isnan(x)) throw AnalysisError("gamma_q received NaN");
    if (x <= 0.0) return 1.0;
    if (!std::isfinite(x)) return 0.0;
    if (x < a + 1.0) return 1.0 - gamma_p_series(a, x);
    return gamma_q_cf(a, x);
}

double chi_square_sf(double x, double df) {
    if (!(df > 0.0) || !std::isfinite(df)) {
        throw AnalysisError("chi_square_sf requires df > 0");
    }
    if (std::isnan(x)) throw AnalysisError("chi_square_sf received NaN");
    if (x <= 0.0) return 1.0;
    return gamma_q(df / 2.0, x / 2.0);
}

}  // namespace rbeval::stats
