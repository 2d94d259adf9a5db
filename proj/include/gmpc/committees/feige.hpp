#pragma once

// Closed-form failure bound for lightest-bin committee election: with n
// parties, committee target size n', corrupted fraction alpha, the chance
// that the elected committee reaches corrupted fraction alpha' is below
// (n/n') * exp(-(alpha'-alpha)^2 * n' / (2*(1-alpha))).

#include <cmath>

#include "gmpc/common.hpp"

namespace gmpc {

inline double feige_err(double n, double n_prime, double alpha, double alpha_prime) {
    require(n_prime > 0 && n_prime < n, "feige_err: need 0 < n' < n");
    require(alpha >= 0 && alpha <= alpha_prime && alpha_prime < 1,
            "feige_err: need 0 <= alpha <= alpha' < 1");
    double exponent = -((alpha_prime - alpha) * (alpha_prime - alpha) * n_prime) /
                      (2.0 * (1.0 - alpha));
    return (n / n_prime) * std::exp(exponent);
}

} // namespace gmpc
