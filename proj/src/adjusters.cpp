#include "ca/adjusters.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

#include "ca/stable_math.hpp"

namespace ca {

namespace {

// |k| below this uses the k -> 0 Taylor limits of the closed forms; every
// printed formula has a removable singularity there.
constexpr double kSeriesThreshold = 1e-6;

void check_future(const Future& p) {
    if (!(p.t0 >= 0.0 && p.t0 <= p.t1 && p.t1 < p.t2))
        throw std::domain_error("Future: need 0 <= t0 <= t1 < t2");
}

void check_ois(const OisFuture& p) {
    if (!(p.t0 >= 0.0 && p.t0 < p.t1)) throw std::domain_error("OisFuture: need 0 <= t0 < t1");
}

void check_fra(const FraInArrears& p) {
    if (!(p.t1 > 0.0 && p.t1 < p.t2)) throw std::domain_error("FraInArrears: need 0 < t1 < t2");
}

// Forward on the estimation curve seen from today, the no-convexity value of
// the futures and FRA rates.
double base_simple_forward(const CurveSet& curve, double t1, double t2) {
    return forward_rate(curve, 0.0, t1, t2);
}

// Statics of the CMS adjustment at the fixing date: the expansion point
// xbar_0 (root of S(t_a, x, ybar) = S(0)), the swap-rate and numeraire-ratio
// sensitivities there, and M(0, t_p). Parameterised on G so the generic and
// Hull-White paths share one implementation.
struct CmsCore {
    double x0 = 0.0;
    double dx_s = 0.0;
    double dx_m = 0.0;
    double m0 = 0.0;
    SwapRates rates0;
};

CmsCore cms_core(const CurveSet& curve, const Cms& p,
                 const std::function<double(double, double)>& G, double y_ta) {
    const auto& d = p.schedule.funding_dates;
    CmsCore out;
    out.rates0 = swap_rates(curve, p.schedule, 0.0);

    auto bond = [&](double T, double x) {
        const double g = G(p.ta, T);
        return curve.ois.df(p.ta, T) * std::exp(-g * x - 0.5 * g * g * y_ta);
    };
    auto s_ois_at = [&](double x) {
        double a = 0.0;
        for (std::size_t j = 1; j < d.size(); ++j)
            a += year_fraction(d[j - 1], d[j]) * bond(d[j], x);
        return (1.0 - bond(p.tb, x)) / a;
    };

    // Bisection for xbar_0 on a wide fixed bracket.
    double lo = -0.5, hi = 0.5;
    double flo = s_ois_at(lo) - out.rates0.s_ois;
    double fhi = s_ois_at(hi) - out.rates0.s_ois;
    if (flo * fhi > 0.0) {
        std::ostringstream msg;
        msg << "cms expansion point: no sign change on [" << lo << ", " << hi << "], f(lo)=" << flo
            << ", f(hi)=" << fhi;
        throw std::runtime_error(msg.str());
    }
    while (hi - lo > 1e-12) {
        const double mid = 0.5 * (lo + hi);
        const double fmid = s_ois_at(mid) - out.rates0.s_ois;
        if (flo * fmid <= 0.0) {
            hi = mid;
            fhi = fmid;
        } else {
            lo = mid;
            flo = fmid;
        }
    }
    out.x0 = 0.5 * (lo + hi);

    // d/dx P(t_a, T) = -G(t_a, T) P; chain rule through S = (1 - P_b) / A
    // and M = P_p / A evaluated at (x0, ybar(t_a)).
    double a01 = 0.0, d_a01 = 0.0;
    for (std::size_t j = 1; j < d.size(); ++j) {
        const double delta = year_fraction(d[j - 1], d[j]);
        const double pj = bond(d[j], out.x0);
        a01 += delta * pj;
        d_a01 += delta * G(p.ta, d[j]) * pj;
    }
    const double pb = bond(p.tb, out.x0);
    out.dx_s = G(p.ta, p.tb) * pb / a01 + (1.0 - pb) * d_a01 / (a01 * a01);
    const double pp = bond(p.tp, out.x0);
    out.dx_m = (pp / a01) * (d_a01 / a01 - G(p.ta, p.tp));
    out.m0 = curve.ois.df(p.tp) / annuity(curve, p.schedule, 0.0);
    return out;
}

}  // namespace

void Cms::validate() const {
    schedule.validate();
    if (ta != schedule.start() || tb != schedule.end() || tp != schedule.payment_date)
        throw std::domain_error("Cms: (ta, tb, tp) must match the schedule");
    if (!(ta > 0.0)) throw std::domain_error("Cms: need ta > 0");
}

Cms Cms::from_schedule(SwapSchedule schedule) {
    Cms p;
    p.ta = schedule.start();
    p.tb = schedule.end();
    p.tp = schedule.payment_date;
    p.schedule = std::move(schedule);
    return p;
}

QuadResult measure_change_adjustment(const std::function<double(double)>& conditional_dsf,
                                     const std::function<double(double)>& lambda, double a,
                                     double b, double abs_tol) {
    if (b < a) throw std::domain_error("measure_change_adjustment: b < a");
    if (a == b) return {0.0, 0.0};
    return integrate([&](double s) { return conditional_dsf(s) * lambda(s); }, a, b, abs_tol);
}

CaResult ca_future(const CheyetteSpec& spec, const Future& p) {
    check_future(p);
    const CurveSet& curve = spec.curve();
    const double delta = year_fraction(p.t1, p.t2);
    const double pref = df_estimation(curve, 0.0, p.t1) / (delta * df_estimation(curve, 0.0, p.t2));
    const double g_diff = spec.G(p.t0, p.t2) - spec.G(p.t0, p.t1);

    KernelContext kc(spec, 0.0);
    QuadResult q{0.0, 0.0};
    if (p.t0 > 0.0)
        q = measure_change_adjustment([&](double s) { return kc.beta(s, p.t0); },
                                      [&](double s) { return kc.nu(s, p.t2); }, 0.0, p.t0);

    CaResult r;
    r.method = CaMethod::generic;
    r.adjustment = pref * g_diff * q.value;
    r.base_rate = base_simple_forward(curve, p.t1, p.t2);
    r.adjusted_rate = r.base_rate + r.adjustment;
    r.quadrature_error_estimate = pref * g_diff * q.error_estimate;
    return r;
}

CaResult ca_future_hw(const HullWhiteSpec& hw, const CurveSet& curve, const Future& p) {
    check_future(p);
    const double k = hw.k;
    if (k < 0.0) throw std::domain_error("ca_future_hw: k < 0");
    const double delta = year_fraction(p.t1, p.t2);
    const double pref = df_estimation(curve, 0.0, p.t1) / (delta * df_estimation(curve, 0.0, p.t2));
    // G(t0,t2) - G(t0,t1) = exp(-k (t1 - t0)) (t2 - t1) E(k (t2 - t1)).
    const double g_diff =
        std::exp(-k * (p.t1 - p.t0)) * delta * stable::expm1_ratio(k * delta);
    // int_0^{t0} beta(s,t0) nu(s,t2) ds
    //   = sigma^2 e^{-k t0} ((1 - e^{-k t0})/k^2 - t0 e^{-k t2}/k)
    //   = sigma^2 e^{-k t0} t0 (t0 F(k t0) + t2 E(k t2)).
    const double bracket =
        p.t0 * (p.t0 * stable::expm1_ratio2(k * p.t0) + p.t2 * stable::expm1_ratio(k * p.t2));
    CaResult r;
    r.method = CaMethod::hull_white_closed_form;
    r.adjustment = pref * g_diff * hw.sigma * hw.sigma * std::exp(-k * p.t0) * bracket;
    r.base_rate = base_simple_forward(curve, p.t1, p.t2);
    r.adjusted_rate = r.base_rate + r.adjustment;
    return r;
}

namespace {

// Assemble the OIS futures rates from E^Q[I] and half the integrated
// squared Clark-Ocone kernel. The compounding expectation is
// (exp(E[I] + V/2) - 1)/delta: with a deterministic kernel, I is Gaussian
// with variance V = int Gamma^2, so the formula is exact in that case.
struct OisParts {
    double expected_i = 0.0;
    double half_v = 0.0;
};

CaResult assemble_ois(const CurveSet& curve, const OisFuture& p, const OisParts& parts,
                      CaMethod method, double err) {
    const double delta = year_fraction(p.t0, p.t1);
    const double r_comp = std::expm1(parts.expected_i + parts.half_v) / delta;
    CaResult r;
    r.method = method;
    r.quadrature_error_estimate = err;
    if (p.mode == OisMode::compounding) {
        r.base_rate = (curve.ois.df(p.t0) / curve.ois.df(p.t1) - 1.0) / delta;
        r.adjusted_rate = r_comp;
    } else {
        r.base_rate = curve.ois.integrated_forward(p.t0, p.t1) / delta;
        r.adjusted_rate = (std::log1p(delta * r_comp) - parts.half_v) / delta;
    }
    r.adjustment = r.adjusted_rate - r.base_rate;
    return r;
}

}  // namespace

CaResult ca_ois_future(const CheyetteSpec& spec, const OisFuture& p) {
    check_ois(p);
    OisParts parts;
    parts.expected_i = spec.expected_integrated_short_rate(p.t0, p.t1);

    KernelContext kc(spec, 0.0);
    auto gamma2 = [&](double s) {
        const double g = kc.gamma(s, p.t0, p.t1);
        return g * g;
    };
    // The kernel has a kink at t0; integrate the two branches separately.
    QuadResult head{0.0, 0.0};
    if (p.t0 > 0.0) head = integrate(gamma2, 0.0, p.t0);
    const QuadResult tail = integrate(gamma2, p.t0, p.t1);
    parts.half_v = 0.5 * (head.value + tail.value);

    return assemble_ois(spec.curve(), p, parts, CaMethod::generic,
                        0.5 * (head.error_estimate + tail.error_estimate));
}

CaResult ca_ois_future_hw(const HullWhiteSpec& hw, const CurveSet& curve, const OisFuture& p) {
    check_ois(p);
    const double k = hw.k, s2 = hw.sigma * hw.sigma;
    if (k < 0.0) throw std::domain_error("ca_ois_future_hw: k < 0");
    const double t0 = p.t0, t1 = p.t1;
    const double delta = year_fraction(t0, t1);

    OisParts parts;
    double drift;  // int_{t0}^{t1} E^Q[x_u] du
    if (std::abs(k) < kSeriesThreshold) {
        const double c3 = (t1 * t1 * t1 - t0 * t0 * t0) / 6.0;
        const double c4 = (t1 * t1 * t1 * t1 - t0 * t0 * t0 * t0) * (5.0 / 24.0);
        const double t05 = t0 * t0 * t0 * t0 * t0, t15 = t1 * t1 * t1 * t1 * t1;
        const double c5 = (t15 - t05) * (17.0 / 120.0);
        drift = s2 * (c3 - k * c4 + k * k * c5);
    } else {
        using stable::expm1_ratio;
        const double b = std::exp(-k * t0) * delta * expm1_ratio(k * delta) -
                         1.5 * std::exp(-2.0 * k * t0) * delta * expm1_ratio(2.0 * k * delta) +
                         0.5 * (t1 * std::exp(-2.0 * k * t1) - t0 * std::exp(-2.0 * k * t0));
        drift = s2 * b / (k * k);
    }
    parts.expected_i = curve.ois.integrated_forward(t0, t1) + drift;
    parts.half_v = 0.5 * s2 * std::exp(-2.0 * k * t0) * delta * delta *
                   (t0 * stable::expm1_ratio(k * delta) * stable::expm1_ratio(k * delta) +
                    delta * stable::gamma_phi_ratio(k * delta));
    return assemble_ois(curve, p, parts, CaMethod::hull_white_closed_form, 0.0);
}

CaResult ca_fra_arrears(const CheyetteSpec& spec, const FraInArrears& p) {
    check_fra(p);
    const CurveSet& curve = spec.curve();
    const double delta = year_fraction(p.t1, p.t2);
    const double pe_fwd = df_estimation(curve, 0.0, p.t2) / df_estimation(curve, 0.0, p.t1);
    const double pref = spec.G(p.t1, p.t2) / (delta * pe_fwd);

    KernelContext kc(spec, 0.0);
    const QuadResult q = integrate(
        [&](double s) {
            return kc.beta(s, p.t1) * kc.dm_bar(s, p.t1, p.t1) *
                   (kc.nu_bar(s, p.t2) - kc.nu_bar(s, p.t1));
        },
        0.0, p.t1);
    // Alternative published integrand: the volatility enters undamped and the
    // accrual window is fixed at [t1, t2] rather than [s, t2] minus [s, t1].
    const double window = kc.nu_bar(p.t1, p.t2);
    const QuadResult qv = integrate(
        [&](double u) {
            return spec.vol().eta(u, kc.x0(), kc.y_arg(u)) * kc.dm_bar(u, p.t1, p.t1);
        },
        0.0, p.t1);

    CaResult r;
    r.method = CaMethod::generic;
    r.adjustment = pref * q.value;
    r.variant_adjustment = pref * window * qv.value;
    r.base_rate = base_simple_forward(curve, p.t1, p.t2);
    r.adjusted_rate = r.base_rate + r.adjustment;
    r.quadrature_error_estimate = pref * (q.error_estimate + window * qv.error_estimate);
    return r;
}

CaResult ca_fra_arrears_hw(const HullWhiteSpec& hw, const CurveSet& curve, const FraInArrears& p) {
    check_fra(p);
    const double k = hw.k, s2 = hw.sigma * hw.sigma;
    if (k < 0.0) throw std::domain_error("ca_fra_arrears_hw: k < 0");
    const double delta = year_fraction(p.t1, p.t2);
    const double pe_fwd = df_estimation(curve, 0.0, p.t2) / df_estimation(curve, 0.0, p.t1);
    const double g12 = delta * stable::expm1_ratio(k * delta);
    const double pref = g12 / (delta * pe_fwd);

    CaResult r;
    r.method = CaMethod::hull_white_closed_form;
    r.adjustment = pref * s2 * std::exp(-2.0 * k * p.t1) * g12 * p.t1;
    r.variant_adjustment = pref * s2 * std::exp(-k * p.t1) * g12 * p.t1 *
                           stable::expm1_ratio(k * p.t1);
    r.base_rate = base_simple_forward(curve, p.t1, p.t2);
    r.adjusted_rate = r.base_rate + r.adjustment;
    return r;
}

CaResult ca_cms(const CheyetteSpec& spec, const Cms& p) {
    p.validate();
    const double y_ta = spec.y_bar(p.ta);
    const CmsCore core =
        cms_core(spec.curve(), p, [&](double t, double T) { return spec.G(t, T); }, y_ta);

    KernelContext kc(spec, core.x0, p.schedule);
    const QuadResult q = integrate(
        [&](double s) {
            const double b = kc.beta(s, p.ta);
            return b * b * std::exp(-2.0 * kc.annuity_drift_exponent(s, p.ta));
        },
        0.0, p.ta);

    const double scale = core.dx_s * core.dx_m / core.m0;
    CaResult r;
    r.method = CaMethod::generic;
    r.adjustment = scale * q.value;
    r.base_rate = core.rates0.s_ab;
    r.adjusted_rate = r.base_rate + r.adjustment;
    r.quadrature_error_estimate = std::abs(scale) * q.error_estimate;
    return r;
}

CaResult ca_cms_hw(const HullWhiteSpec& hw, const CurveSet& curve, const Cms& p) {
    p.validate();
    const double k = hw.k, s2 = hw.sigma * hw.sigma;
    if (k < 0.0) throw std::domain_error("ca_cms_hw: k < 0");
    const double y_ta = s2 * p.ta * std::exp(-2.0 * k * p.ta);
    auto g = [k](double t, double T) { return (T - t) * stable::expm1_ratio(k * (T - t)); };
    const CmsCore core = cms_core(curve, p, g, y_ta);

    CaResult r;
    r.method = CaMethod::hull_white_closed_form;
    r.adjustment = core.dx_s * core.dx_m / core.m0 * s2 * std::exp(-2.0 * k * p.ta) * p.ta;
    r.base_rate = core.rates0.s_ab;
    r.adjusted_rate = r.base_rate + r.adjustment;
    return r;
}

}  // namespace ca
