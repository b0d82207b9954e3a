#pragma once

#include <cmath>
#include <functional>

// Independent numerical oracles for the test suite. Deliberately different
// methods from the library's adaptive Simpson: composite trapezoid and
// fixed-node Simpson with explicit node counts.
namespace oracle {

inline double trapezoid(const std::function<double(double)>& f, double a, double b, long n) {
    const double h = (b - a) / static_cast<double>(n);
    double acc = 0.5 * (f(a) + f(b));
    for (long i = 1; i < n; ++i) acc += f(a + static_cast<double>(i) * h);
    return acc * h;
}

inline double simpson(const std::function<double(double)>& f, double a, double b, long n) {
    if (n % 2 != 0) ++n;
    const double h = (b - a) / static_cast<double>(n);
    double acc = f(a) + f(b);
    for (long i = 1; i < n; ++i) acc += f(a + static_cast<double>(i) * h) * (i % 2 ? 4.0 : 2.0);
    return acc * h / 3.0;
}

inline double central_diff(const std::function<double(double)>& f, double x, double h) {
    return (f(x + h) - f(x - h)) / (2.0 * h);
}

}  // namespace oracle
