#include "ca/curves.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace ca {

DiscountCurve DiscountCurve::flat(double rate) {
    DiscountCurve c;
    c.times_ = {0.0};
    c.log_df_ = {-rate};  // slope holder: ln P(0,t) = -rate * t
    return c;
}

DiscountCurve DiscountCurve::from_knots(std::vector<std::pair<double, double>> knots) {
    if (knots.empty()) throw std::invalid_argument("DiscountCurve: no knots");
    std::sort(knots.begin(), knots.end());
    DiscountCurve c;
    c.times_.push_back(0.0);
    c.log_df_.push_back(0.0);
    for (const auto& [t, z] : knots) {
        if (t <= 0.0) throw std::invalid_argument("DiscountCurve: knot time must be > 0");
        if (t <= c.times_.back()) throw std::invalid_argument("DiscountCurve: duplicate knot");
        c.times_.push_back(t);
        c.log_df_.push_back(-z * t);
    }
    return c;
}

double DiscountCurve::log_df_at(double t) const {
    if (is_flat()) return log_df_[0] * t;
    if (t <= 0.0) return 0.0;
    // Log-linear interpolation between knots, flat last zero rate beyond.
    auto it = std::upper_bound(times_.begin(), times_.end(), t);
    if (it == times_.end()) {
        const double z_last = -log_df_.back() / times_.back();
        return -z_last * t;
    }
    const std::size_t i = static_cast<std::size_t>(it - times_.begin());
    const double t0 = times_[i - 1], t1 = times_[i];
    const double w = (t - t0) / (t1 - t0);
    return (1.0 - w) * log_df_[i - 1] + w * log_df_[i];
}

double DiscountCurve::df(double t) const {
    if (t < 0.0) throw std::domain_error("DiscountCurve::df: t < 0");
    return std::exp(log_df_at(t));
}

double DiscountCurve::df(double t, double T) const {
    if (t < 0.0 || T < t) throw std::domain_error("DiscountCurve::df: need 0 <= t <= T");
    return std::exp(log_df_at(T) - log_df_at(t));
}

double DiscountCurve::instantaneous_forward(double t) const {
    if (is_flat()) return -log_df_[0];
    if (t < 0.0) throw std::domain_error("instantaneous_forward: t < 0");
    auto it = std::upper_bound(times_.begin(), times_.end(), t);
    if (it == times_.end()) {
        // Flat extrapolation of the last zero rate: f = z_last beyond the last knot.
        return -log_df_.back() / times_.back();
    }
    std::size_t i = static_cast<std::size_t>(it - times_.begin());
    if (i == 0) i = 1;
    return -(log_df_[i] - log_df_[i - 1]) / (times_[i] - times_[i - 1]);
}

double DiscountCurve::integrated_forward(double t0, double t1) const {
    if (t1 < t0) throw std::domain_error("integrated_forward: t1 < t0");
    return log_df_at(t0) - log_df_at(t1);
}

double BasisSpread::factor(double t, double T) const {
    if (T < t) throw std::domain_error("BasisSpread::factor: T < t");
    return std::exp(-integral(t, T));
}

void SwapSchedule::validate() const {
    auto check_leg = [](const std::vector<double>& leg) {
        if (leg.size() < 2) throw std::domain_error("SwapSchedule: leg needs >= 2 dates");
        for (std::size_t i = 1; i < leg.size(); ++i)
            if (leg[i] <= leg[i - 1]) throw std::domain_error("SwapSchedule: dates not increasing");
    };
    check_leg(estimation_dates);
    check_leg(funding_dates);
    if (estimation_dates.front() != funding_dates.front() ||
        estimation_dates.back() != funding_dates.back())
        throw std::domain_error("SwapSchedule: legs must share endpoints");
    if (!(payment_date > start() && payment_date <= end()))
        throw std::domain_error("SwapSchedule: need t_a < t_p <= t_b");
}

SwapSchedule SwapSchedule::uniform(double t_a, double t_b, double estimation_period,
                                   double funding_period, double payment_date) {
    auto build = [](double a, double b, double dt) {
        std::vector<double> dates{a};
        const auto n = static_cast<std::size_t>(std::lround((b - a) / dt));
        for (std::size_t i = 1; i < n; ++i) dates.push_back(a + static_cast<double>(i) * dt);
        dates.push_back(b);
        return dates;
    };
    SwapSchedule s;
    s.estimation_dates = build(t_a, t_b, estimation_period);
    s.funding_dates = build(t_a, t_b, funding_period);
    s.payment_date = payment_date;
    s.validate();
    return s;
}

double df_ois(const CurveSet& curve, double t, double T) {
    if (!(t >= 0.0 && T >= t)) throw std::domain_error("df_ois: need 0 <= t <= T");
    return curve.ois.df(t, T);
}

double df_estimation(const CurveSet& curve, double t, double T) {
    if (!(t >= 0.0 && T >= t)) throw std::domain_error("df_estimation: need 0 <= t <= T");
    return curve.basis.factor(t, T) * curve.ois.df(t, T);
}

double forward_rate(const CurveSet& curve, double t0, double t1, double t2) {
    if (!(t0 <= t1 && t1 < t2)) throw std::domain_error("forward_rate: need t0 <= t1 < t2");
    const double delta = year_fraction(t1, t2);
    return (df_estimation(curve, t0, t1) / df_estimation(curve, t0, t2) - 1.0) / delta;
}

double annuity(const CurveSet& curve, const SwapSchedule& sched, double t) {
    sched.validate();
    if (t > sched.start()) throw std::domain_error("annuity: t > t_a");
    double acc = 0.0;
    const auto& d = sched.funding_dates;
    for (std::size_t j = 1; j < d.size(); ++j)
        acc += year_fraction(d[j - 1], d[j]) * df_ois(curve, t, d[j]);
    return acc;
}

SwapRates swap_rates(const CurveSet& curve, const SwapSchedule& sched, double t) {
    sched.validate();
    if (t > sched.start()) throw std::domain_error("swap_rates: t > t_a");
    const double a01 = annuity(curve, sched, t);
    if (!(a01 > 0.0)) throw std::runtime_error("swap_rates: non-positive annuity");

    SwapRates out;
    out.s_ois = (df_ois(curve, t, sched.start()) - df_ois(curve, t, sched.end())) / a01;

    // Frozen basis term, always taken from the t = 0 curves.
    const double a01_0 = annuity(curve, sched, 0.0);
    double basis_sum = 0.0;
    const auto& e = sched.estimation_dates;
    for (std::size_t i = 1; i < e.size(); ++i) {
        const double delta = year_fraction(e[i - 1], e[i]);
        const double alpha =
            (curve.basis.factor(0.0, e[i - 1]) / curve.basis.factor(0.0, e[i]) - 1.0) / delta;
        basis_sum += delta * alpha * curve.ois.df(e[i]);
    }
    out.frozen_spread = basis_sum / a01_0;
    out.s_ab = out.s_ois + out.frozen_spread;
    return out;
}

}  // namespace ca
