#pragma once

#include <optional>

#include "ca/curves.hpp"
#include "ca/model.hpp"

namespace ca {

/// Evaluation context for the Girsanov/Clark-Ocone kernels: the model, the
/// chosen expansion point xbar_0, and (for annuity-measure kernels) the swap
/// schedule. Pure functions over an immutable context.
class KernelContext {
public:
    KernelContext(const CheyetteSpec& spec, double x0,
                  std::optional<SwapSchedule> schedule = std::nullopt);

    const CheyetteSpec& spec() const { return *spec_; }
    double x0() const { return x0_; }

    /// beta(s, t) = exp(-int_s^t k) * eta(s, x0, ybar_s).
    double beta(double s, double t) const;

    /// HJM volatility-integral kernel nu(s, T) = eta(s, x0, ybar_s) * G(s, T).
    double nu(double s, double T) const;

    /// nubar(t, tp) = int_t^{tp} eta(s, x0, ybar_s) ds.
    double nu_bar(double t, double tp) const;

    /// d/dx0 of nu_bar.
    double nu_bar_dx(double t, double tp) const;

    /// Gamma(s, t0, t1) = eta(s, x0, 0) * int_{max(s,t0)}^{t1} exp(-int_s^u k) du;
    /// zero when s >= t1.
    double gamma(double s, double t0, double t1) const;

    /// Deterministic conditional-expectation factor DMbar(s, t) with nubar
    /// taken to the payment date tp. Identically 1 for time-dependent
    /// volatility.
    double dm_bar(double s, double t, double tp) const;

    /// Frozen-weight annuity volatility sum_i w_i(0) nu(t, t_i, x0).
    double sigma01_frozen(double t) const;

    /// int_s^{ta} d/dx [beta(u,ta,x,ybar_u) mu(u,x,ybar_u,ta,tb)] |_{x=x0} du
    /// with mu the frozen-weight annuity drift kernel. Zero for
    /// time-dependent volatility.
    double annuity_drift_exponent(double s, double ta) const;

    /// Frozen annuity weight w_i(0) = delta_i P_ois(0, t_i) / 01(0, t_a, t_b).
    double frozen_weight(std::size_t i) const;

    /// ybar(s) when the volatility actually reads its y argument, else 0
    /// (the value is unused by a time-dependent eta).
    double y_arg(double s) const;

private:
    const SwapSchedule& schedule_or_throw() const;
    double eta_at(double s) const;
    double weighted_g(double u) const;
    double mu(double u, double x, double ta, double tb) const;

    const CheyetteSpec* spec_;
    double x0_;
    std::optional<SwapSchedule> schedule_;
};

}  // namespace ca
