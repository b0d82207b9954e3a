#pragma once

#include <functional>
#include <memory>
#include <string>

#include "ca/curves.hpp"
#include "ca/piecewise.hpp"

namespace ca {

/// Piecewise-constant positive mean-reversion speed k(t).
/// Integrals of k and the damping factors exp(-int k) are segment-exact.
class MeanReversion {
public:
    explicit MeanReversion(double constant);
    explicit MeanReversion(PiecewiseConstant k);

    double operator()(double t) const { return k_(t); }

    /// int_a^b k(s) ds, exact on segments.
    double integral(double a, double b) const { return k_.integral(a, b); }

    /// exp(-int_a^b k(s) ds).
    double damping(double a, double b) const;

    /// G(a, b) = int_a^b exp(-int_a^u k) du, segment-exact.
    double G(double a, double b) const;

    /// Accumulation factor exp(int_0^t k(s) ds).
    double accumulation(double t) const;

    double lower_bound() const { return k_.min_value(); }
    double upper_bound() const { return k_.max_value(); }

private:
    PiecewiseConstant k_;
};

/// Volatility specification eta(t, x, y) of the Cheyette state equation.
///
/// Two flavours: purely time-dependent (the convexity formulas are exact),
/// or state-dependent with bounds and Lipschitz constant per the model
/// hypotheses. Analytic partials may be supplied; otherwise central finite
/// differences with relative step 1e-6 are used and flagged.
class Volatility {
public:
    using Fn = std::function<double(double, double, double)>;

    static Volatility time_dependent(std::function<double(double)> eta_t);

    static Volatility state_dependent(Fn eta, Fn deta_dx = nullptr, Fn deta_dy = nullptr,
                                      Fn d2eta_dx2 = nullptr);

    /// sigma * exp(-k t): the Hull-White reduction (h = sigma, g(T) = exp(-kT)).
    static Volatility hull_white(double sigma, double k);

    /// Built-in state-dependent test case
    /// eta(t, x, y) = sigma * exp(-k t) * (1 + c * tanh(x));
    /// bounded, Lipschitz and differentiable for |c| < 1.
    static Volatility tanh_test(double sigma, double k, double c);

    double eta(double t, double x, double y) const { return eta_(t, x, y); }
    double deta_dx(double t, double x, double y) const;
    double deta_dy(double t, double x, double y) const;
    double d2eta_dx2(double t, double x, double y) const;

    bool state_dependent_vol() const { return state_dependent_; }
    bool uses_fd_partials() const { return state_dependent_ && !dx_; }

private:
    Volatility() = default;
    Fn eta_;
    Fn dx_, dy_, dxx_;
    bool state_dependent_ = false;
};

/// State of the Cheyette pair (x, y) at a given time. Carrying the time
/// makes mixing states of different times detectable.
struct ModelState {
    double t = 0.0;
    double x = 0.0;
    double y = 0.0;
};

/// One-factor Cheyette model: mean reversion, separable volatility and the
/// initial two-curve set. Immutable; all member queries are pure.
class CheyetteSpec {
public:
    CheyetteSpec(MeanReversion k, Volatility vol, CurveSet curve);

    const MeanReversion& k() const { return k_; }
    const Volatility& vol() const { return vol_; }
    const CurveSet& curve() const { return curve_; }

    /// G(t, T) = int_t^T exp(-int_t^u k) du.
    double G(double t, double T) const;

    /// Zero-coupon bond reconstruction
    /// P_ois(t, T, x, y) = P(0,T)/P(0,t) * exp(-G x - G^2 y / 2).
    double bond_reconstruct(double t, double T, const ModelState& state) const;

    /// Locally-deterministic approximation
    /// ybar(t) = int_0^t exp(-2 int_u^t k) eta^2(u, 0, 0) du.
    double y_bar(double t) const;

    /// Deterministic part of xbar(t):
    /// int_0^t exp(-int_u^t k) ybar(u) du (excludes xbar_0 and the noise term).
    double x_bar_drift(double t) const;

    /// E^Q[int_{t0}^{t1} r_ois(u) du]
    ///   = -ln(P(0,t1)/P(0,t0)) + int_{t0}^{t1} x_bar_drift(u) du.
    double expected_integrated_short_rate(double t0, double t1) const;

private:
    MeanReversion k_;
    Volatility vol_;
    CurveSet curve_;
};

/// Hull-White parameters: sigma and constant mean reversion k.
///
/// Reduces the Cheyette model via g(T) = exp(-kT), h(t) = sigma, hence
/// eta_t = sigma * exp(-kt). Note this is the separable-volatility
/// convention sigma(t,T) = sigma * exp(-kT), not the textbook
/// sigma * exp(-k(T-t)); all closed forms here rely on it.
struct HullWhiteSpec {
    double sigma = 0.0;
    double k = 0.0;

    CheyetteSpec to_cheyette(CurveSet curve) const;
};

}  // namespace ca
