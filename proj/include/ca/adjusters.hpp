#pragma once

#include <optional>
#include <variant>

#include "ca/kernels.hpp"
#include "ca/model.hpp"
#include "ca/quadrature.hpp"

namespace ca {

/// Quarterly-style futures contract on the simple forward L_E(t0, t1, t2).
struct Future {
    double t0 = 0.0;  // expiry of the future
    double t1 = 0.0;  // accrual start
    double t2 = 0.0;  // accrual end / payment
};

enum class OisMode { compounding, average };

/// Futures on the realised overnight rate over [t0, t1], either compounded
/// or averaged.
struct OisFuture {
    double t0 = 0.0;
    double t1 = 0.0;
    OisMode mode = OisMode::compounding;
};

/// FRA whose rate fixes at t1 for the period [t1, t2] and pays at t1.
struct FraInArrears {
    double t1 = 0.0;
    double t2 = 0.0;
};

/// CMS coupon: swap rate S_{a,b} fixing at t_a, paid at t_p in (t_a, t_b].
struct Cms {
    SwapSchedule schedule;
    double ta = 0.0;
    double tb = 0.0;
    double tp = 0.0;

    void validate() const;

    static Cms from_schedule(SwapSchedule schedule);
};

using ProductSpec = std::variant<Future, OisFuture, FraInArrears, Cms>;

enum class CaMethod { generic, hull_white_closed_form };

struct CaResult {
    double adjustment = 0.0;     // rate units
    double base_rate = 0.0;      // curve value with no convexity
    double adjusted_rate = 0.0;  // base_rate + adjustment
    CaMethod method = CaMethod::generic;
    double quadrature_error_estimate = 0.0;
    // FRA only: the alternative published integrand form, reported side
    // by side with the primary one.
    std::optional<double> variant_adjustment;
};

/// Change-of-measure template: the convexity adjustment is
/// int_a^b E_s[D_s F] lambda(s) ds with lambda the Girsanov drift between
/// the pricing measure and the payoff's natural martingale measure.
/// lambda == 0 (same measure) gives adjustment 0.
QuadResult measure_change_adjustment(const std::function<double(double)>& conditional_dsf,
                                     const std::function<double(double)>& lambda, double a,
                                     double b, double abs_tol = 1e-12);

CaResult ca_future(const CheyetteSpec& spec, const Future& p);
CaResult ca_future_hw(const HullWhiteSpec& hw, const CurveSet& curve, const Future& p);

CaResult ca_ois_future(const CheyetteSpec& spec, const OisFuture& p);
CaResult ca_ois_future_hw(const HullWhiteSpec& hw, const CurveSet& curve, const OisFuture& p);

CaResult ca_fra_arrears(const CheyetteSpec& spec, const FraInArrears& p);
CaResult ca_fra_arrears_hw(const HullWhiteSpec& hw, const CurveSet& curve, const FraInArrears& p);

CaResult ca_cms(const CheyetteSpec& spec, const Cms& p);
CaResult ca_cms_hw(const HullWhiteSpec& hw, const CurveSet& curve, const Cms& p);

}  // namespace ca
