#pragma once

#include <cstddef>
#include <vector>

#include "ca/piecewise.hpp"

namespace ca {

/// Year fraction between two times: delta(t1, t2) = t2 - t1.
/// All times in this library are year fractions from the valuation date.
inline double year_fraction(double t1, double t2) { return t2 - t1; }

/// Risk-free (OIS) discount curve.
///
/// Either a flat continuously-compounded zero rate, or a set of
/// (time, zero_rate) knots with log-linear interpolation of discount
/// factors and flat extrapolation of the last zero rate.
class DiscountCurve {
public:
    /// Defaults to a flat zero rate (all discount factors 1).
    DiscountCurve() : times_{0.0}, log_df_{0.0} {}

    static DiscountCurve flat(double rate);
    static DiscountCurve from_knots(std::vector<std::pair<double, double>> knots);

    /// P(0, t); P(0, 0) = 1.
    double df(double t) const;

    /// Forward discount factor P(t, T) = P(0, T) / P(0, t).
    double df(double t, double T) const;

    /// Instantaneous forward rate f(0, t) = -d/dt ln P(0, t)
    /// (piecewise constant between knots).
    double instantaneous_forward(double t) const;

    /// Exact integral of the instantaneous forward over [t0, t1],
    /// i.e. -ln(P(0, t1) / P(0, t0)).
    double integrated_forward(double t0, double t1) const;

    bool is_flat() const { return times_.size() == 1; }

private:
    // log_df_[i] = ln P(0, times_[i]); times_[0] = 0, log_df_[0] = 0.
    std::vector<double> times_;
    std::vector<double> log_df_;
    double log_df_at(double t) const;
};

/// Deterministic basis spread between the estimation and OIS forward
/// curves, piecewise constant in tenor: s(t, t + u) = s(0, u).
class BasisSpread {
public:
    BasisSpread() : spread_(0.0) {}
    explicit BasisSpread(PiecewiseConstant spread) : spread_(std::move(spread)) {}
    static BasisSpread zero() { return BasisSpread(); }

    /// Integral of the spread over maturities [t, T] as seen from t,
    /// i.e. int_t^T s(t, u) du = int_0^{T-t} s(0, v) dv.
    double integral(double t, double T) const { return spread_.integral(0.0, T - t); }

    /// Multiplicative basis factor H(t, T) = exp(-int_t^T s(t, u) du).
    double factor(double t, double T) const;

    const PiecewiseConstant& spread() const { return spread_; }

private:
    PiecewiseConstant spread_;
};

/// The two-curve world: OIS discounting plus a deterministic basis giving
/// the estimation curve P_E(t, T) = H(t, T) P_ois(t, T).
/// Immutable after construction; all queries are pure.
struct CurveSet {
    DiscountCurve ois;
    BasisSpread basis;
};

/// Swap schedule: estimation (floating) and funding (fixed/annuity) legs
/// sharing the endpoints t_a and t_b, plus the payment date of the CMS coupon.
struct SwapSchedule {
    std::vector<double> estimation_dates;  // t_a = d_0 < ... < d_nE = t_b
    std::vector<double> funding_dates;     // t_a = d_0 < ... < d_nf = t_b
    double payment_date = 0.0;             // t_a < t_p <= t_b

    double start() const { return funding_dates.front(); }
    double end() const { return funding_dates.back(); }
    void validate() const;

    /// Uniform schedule builder: both legs with the given period lengths.
    static SwapSchedule uniform(double t_a, double t_b, double estimation_period,
                                double funding_period, double payment_date);
};

/// Swap-rate decomposition at time t: S_ab = S_ois + frozen basis spread.
struct SwapRates {
    double s_ab = 0.0;
    double s_ois = 0.0;
    double frozen_spread = 0.0;
};

double df_ois(const CurveSet& curve, double t, double T);
double df_estimation(const CurveSet& curve, double t, double T);

/// Simple forward rate on the estimation curve,
/// L_E(t0, t1, t2) = (P_E(t0,t1)/P_E(t0,t2) - 1) / delta(t1, t2).
double forward_rate(const CurveSet& curve, double t0, double t1, double t2);

/// Annuity 01(t, t_a, t_b) over the funding leg.
double annuity(const CurveSet& curve, const SwapSchedule& sched, double t);

/// OIS swap rate, full swap rate and the frozen (t = 0) basis spread term.
SwapRates swap_rates(const CurveSet& curve, const SwapSchedule& sched, double t);

}  // namespace ca
