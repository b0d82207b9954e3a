#include "ca/quadrature.hpp"

#include <cmath>
#include <stdexcept>

namespace ca {

namespace {

struct Accum {
    double value = 0.0;
    double error = 0.0;
};

void simpson_step(const std::function<double(double)>& f, double a, double b, double fa,
                  double fm, double fb, double whole, double tol, int depth, int max_depth,
                  Accum& acc) {
    const double m = 0.5 * (a + b);
    const double lm = 0.5 * (a + m);
    const double rm = 0.5 * (m + b);
    const double flm = f(lm);
    const double frm = f(rm);
    const double h = b - a;
    const double left = h / 12.0 * (fa + 4.0 * flm + fm);
    const double right = h / 12.0 * (fm + 4.0 * frm + fb);
    const double delta = left + right - whole;
    if (!std::isfinite(delta)) {
        // a non-finite sample never passes the tolerance test, so stop the
        // recursion here and let the caller report the bad integrand
        acc.value = delta;
        acc.error = delta;
        return;
    }
    // Richardson: |S2 - S1| / 15 estimates the error of S2.
    if (depth >= max_depth || std::abs(delta) <= 15.0 * tol) {
        acc.value += left + right + delta / 15.0;
        acc.error += std::abs(delta) / 15.0;
        return;
    }
    simpson_step(f, a, m, fa, flm, fm, left, 0.5 * tol, depth + 1, max_depth, acc);
    simpson_step(f, m, b, fm, frm, fb, right, 0.5 * tol, depth + 1, max_depth, acc);
}

}  // namespace

QuadResult integrate(const std::function<double(double)>& f, double a, double b,
                     double abs_tol, int max_depth) {
    if (!(b >= a)) throw std::domain_error("integrate: b < a");
    if (a == b) return {0.0, 0.0};
    const double fa = f(a);
    const double m = 0.5 * (a + b);
    const double fm = f(m);
    const double fb = f(b);
    const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    Accum acc;
    simpson_step(f, a, b, fa, fm, fb, whole, abs_tol, 0, max_depth, acc);
    if (!std::isfinite(acc.value)) throw std::runtime_error("integrate: non-finite integrand");
    return {acc.value, acc.error};
}

double integrate_value(const std::function<double(double)>& f, double a, double b,
                       double abs_tol, int max_depth) {
    return integrate(f, a, b, abs_tol, max_depth).value;
}

}  // namespace ca
