#pragma once

#include <functional>

namespace ca {

/// Result of an adaptive quadrature: value plus an estimate of the
/// remaining absolute error.
struct QuadResult {
    double value = 0.0;
    double error_estimate = 0.0;
};

/// Adaptive Simpson integration of f over [a, b].
///
/// Recursion stops when the local Richardson error estimate is below the
/// tolerance (scaled by interval share) or max_depth is reached. The
/// accumulated error estimate is returned alongside the value.
QuadResult integrate(const std::function<double(double)>& f, double a, double b,
                     double abs_tol = 1e-12, int max_depth = 40);

/// Convenience wrapper returning only the value.
double integrate_value(const std::function<double(double)>& f, double a, double b,
                       double abs_tol = 1e-12, int max_depth = 40);

}  // namespace ca
