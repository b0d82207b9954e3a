#pragma once

#include <cmath>

/// Small-argument-stable building blocks shared by the segment-exact
/// mean-reversion integrals and the Hull-White closed forms. Every function
/// has a removable singularity at 0 handled by a truncated Taylor series.
namespace ca::stable {

/// (1 - exp(-x)) / x, -> 1 as x -> 0.
inline double expm1_ratio(double x) {
    if (std::abs(x) < 1e-5)
        return 1.0 + x * (-0.5 + x * (1.0 / 6.0 + x * (-1.0 / 24.0 + x / 120.0)));
    return -std::expm1(-x) / x;
}

/// ((1 - exp(-x)) / x - 1) / x, -> -1/2 as x -> 0.
inline double expm1_ratio2(double x) {
    if (std::abs(x) < 1e-3)
        return -0.5 + x * (1.0 / 6.0 +
                           x * (-1.0 / 24.0 + x * (1.0 / 120.0 + x * (-1.0 / 720.0 + x / 5040.0))));
    return (expm1_ratio(x) - 1.0) / x;
}

/// Phi(u) / u^2 with Phi(u) = E(2u) - 2 exp(-u) E(u) + exp(-2u),
/// E as expm1_ratio; -> 1/3 as u -> 0. Appears in the Hull-White
/// value of the integrated squared OIS kernel.
inline double gamma_phi_ratio(double u) {
    if (std::abs(u) < 5e-2) {
        return 1.0 / 3.0 +
               u * (-5.0 / 12.0 +
                    u * (17.0 / 60.0 +
                         u * (-49.0 / 360.0 +
                              u * (43.0 / 840.0 + u * (-107.0 / 6720.0 + u * 769.0 / 181440.0)))));
    }
    const double phi =
        expm1_ratio(2.0 * u) - 2.0 * std::exp(-u) * expm1_ratio(u) + std::exp(-2.0 * u);
    return phi / (u * u);
}

/// (1 - (1 + v) exp(-v)) / v^2, -> 1/2 as v -> 0.
inline double one_minus_linexp_ratio(double v) {
    if (std::abs(v) < 1e-3)
        return 0.5 + v * (-1.0 / 3.0 +
                          v * (1.0 / 8.0 + v * (-1.0 / 30.0 + v * (1.0 / 144.0 - v / 840.0))));
    return (1.0 - (1.0 + v) * std::exp(-v)) / (v * v);
}

}  // namespace ca::stable
