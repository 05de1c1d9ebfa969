#pragma once

namespace rbeval::stats {

// Regularized upper incomplete gamma Q(a, x).
double gamma_q(double a, double x);

// Survival function of the chi-square distribution with df degrees of
// freedom, P(X > x) = Q(df/2, x/2).
double chi_square_sf(double x, double df);

}  // namespace rbeval::stats
