#pragma once

// Statistics helpers backing the Monte Carlo checks: chi-square goodness of
// fit (via the regularized incomplete gamma function), binomial tolerance
// bands, and log-log power fits for complexity curves.

#include <cmath>
#include <vector>

#include "gmpc/common.hpp"

namespace gmpc {

// Regularized upper incomplete gamma Q(a, x); series/continued-fraction
// split at x = a+1 (classic Lentz evaluation).
inline double gamma_q(double a, double x) {
    require(a > 0 && x >= 0, "gamma_q: domain");
    auto gln = std::lgamma(a);
    if (x < a + 1.0) {
        // P(a,x) by series, return 1 - P.
        double ap = a, sum = 1.0 / a, del = sum;
        for (int i = 0; i < 500; ++i) {
            ap += 1.0;
            del *= x / ap;
            sum += del;
            if (std::fabs(del) < std::fabs(sum) * 1e-15) break;
        }
        double p = sum * std::exp(-x + a * std::log(x) - gln);
        return 1.0 - p;
    }
    // Q(a,x) by continued fraction.
    double b = x + 1.0 - a, c = 1e300, d = 1.0 / b, h = d;
    for (int i = 1; i <= 500; ++i) {
        double an = -double(i) * (double(i) - a);
        b += 2.0;
        d = an * d + b;
        if (std::fabs(d) < 1e-300) d = 1e-300;
        c = b + an / c;
        if (std::fabs(c) < 1e-300) c = 1e-300;
        d = 1.0 / d;
        double del = d * c;
        h *= del;
        if (std::fabs(del - 1.0) < 1e-15) break;
    }
    return std::exp(-x + a * std::log(x) - gln) * h;
}

// P-value of a chi-square statistic with `dof` degrees of freedom.
inline double chi2_pvalue(double stat, std::uint32_t dof) {
    if (stat <= 0) return 1.0;
    return gamma_q(dof / 2.0, stat / 2.0);
}

inline double chi2_statistic(const std::vector<std::uint64_t>& observed,
                             const std::vector<double>& expected) {
    require(observed.size() == expected.size(), "chi2: size mismatch");
    double stat = 0;
    for (std::size_t i = 0; i < observed.size(); ++i) {
        require(expected[i] > 0, "chi2: non-positive expected count");
        double d = double(observed[i]) - expected[i];
        stat += d * d / expected[i];
    }
    return stat;
}

// Three-sigma binomial band around an analytic failure probability: a
// Monte Carlo estimate from `trials` runs PASSes while
//   empirical <= bound + 3 * sqrt(bound_clamped * (1 - bound_clamped) / trials).
inline double binomial_band(double bound, std::uint64_t trials) {
    double p = bound;
    if (p < 0) p = 0;
    if (p > 1) p = 1;
    double sigma = std::sqrt(p * (1 - p) / double(trials));
    // A zero/degenerate analytic bound still deserves slack of a few trials.
    double floor_sigma = std::sqrt(0.5 * 0.5 / double(trials));
    return 3.0 * std::max(sigma, floor_sigma * 0.1);
}

struct PowerFit {
    double scale = 0;    // a in y = a * x^b
    double exponent = 0; // b
    double max_residual = 0;
};

// Least squares on (ln x, ln y); caller supplies x already transformed
// (e.g. x = log2 n when fitting polylog growth).
inline PowerFit fit_power(const std::vector<double>& x, const std::vector<double>& y) {
    require(x.size() == y.size() && x.size() >= 2, "fit_power: need >= 2 points");
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    std::size_t m = x.size();
    std::vector<double> lx(m), ly(m);
    for (std::size_t i = 0; i < m; ++i) {
        require(x[i] > 0 && y[i] > 0, "fit_power: positive data only");
        lx[i] = std::log(x[i]);
        ly[i] = std::log(y[i]);
        sx += lx[i]; sy += ly[i]; sxx += lx[i] * lx[i]; sxy += lx[i] * ly[i];
    }
    double denom = double(m) * sxx - sx * sx;
    PowerFit fit;
    fit.exponent = (double(m) * sxy - sx * sy) / denom;
    fit.scale = std::exp((sy - fit.exponent * sx) / double(m));
    for (std::size_t i = 0; i < m; ++i) {
        double pred = std::log(fit.scale) + fit.exponent * lx[i];
        fit.max_residual = std::max(fit.max_residual, std::fabs(pred - ly[i]));
    }
    return fit;
}

} // namespace gmpc
