#pragma once

#include <algorithm>
#include <stdexcept>
#include <utility>
#include <vector>

namespace ca {

/// Right-continuous piecewise-constant function of time.
///
/// Defined by breakpoints t_0 < t_1 < ... and values v_i on [t_i, t_{i+1});
/// the last value extends flat to +infinity, the first value extends flat
/// below t_0. Integrals are evaluated segment-exactly.
class PiecewiseConstant {
public:
    PiecewiseConstant() = default;

    explicit PiecewiseConstant(double constant) : breaks_{0.0}, values_{constant} {}

    PiecewiseConstant(std::vector<double> breaks, std::vector<double> values)
        : breaks_(std::move(breaks)), values_(std::move(values)) {
        if (breaks_.empty() || breaks_.size() != values_.size())
            throw std::invalid_argument("PiecewiseConstant: breaks/values size mismatch");
        if (!std::is_sorted(breaks_.begin(), breaks_.end()))
            throw std::invalid_argument("PiecewiseConstant: breakpoints must be sorted");
    }

    double operator()(double t) const {
        auto it = std::upper_bound(breaks_.begin(), breaks_.end(), t);
        if (it == breaks_.begin()) return values_.front();
        return values_[static_cast<std::size_t>(it - breaks_.begin()) - 1];
    }

    /// Exact integral over [a, b], a <= b.
    double integral(double a, double b) const {
        if (b < a) throw std::domain_error("PiecewiseConstant::integral: b < a");
        double acc = 0.0;
        double lo = a;
        while (lo < b) {
            const std::size_t i = segment_index(lo);
            const double seg_hi = (i + 1 < breaks_.size()) ? breaks_[i + 1] : b;
            const double hi = std::min(b, std::max(seg_hi, lo));
            acc += values_[i] * (hi - lo);
            if (hi <= lo) break;
            lo = hi;
        }
        return acc;
    }

    double min_value() const { return *std::min_element(values_.begin(), values_.end()); }
    double max_value() const { return *std::max_element(values_.begin(), values_.end()); }

    const std::vector<double>& breakpoints() const { return breaks_; }
    const std::vector<double>& values() const { return values_; }

private:
    std::size_t segment_index(double t) const {
        auto it = std::upper_bound(breaks_.begin(), breaks_.end(), t);
        if (it == breaks_.begin()) return 0;
        return static_cast<std::size_t>(it - breaks_.begin()) - 1;
    }

    std::vector<double> breaks_;
    std::vector<double> values_;
};

}  // namespace ca
