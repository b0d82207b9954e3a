#include "ca/model.hpp"

#include <cmath>
#include <stdexcept>

#include "ca/quadrature.hpp"
#include "ca/stable_math.hpp"

namespace ca {

namespace {
constexpr double kFdStep = 1e-6;  // relative central-difference step for eta partials

double fd_step(double x) { return kFdStep * std::max(1.0, std::abs(x)); }
}  // namespace

MeanReversion::MeanReversion(double constant) : k_(constant) {
    if (!(constant > 0.0)) throw std::invalid_argument("MeanReversion: k must be positive");
}

MeanReversion::MeanReversion(PiecewiseConstant k) : k_(std::move(k)) {
    if (!(k_.min_value() > 0.0)) throw std::invalid_argument("MeanReversion: k must be positive");
}

double MeanReversion::damping(double a, double b) const { return std::exp(-integral(a, b)); }

double MeanReversion::G(double a, double b) const {
    if (b < a) throw std::domain_error("MeanReversion::G: b < a");
    // Walk the constant segments of k; each contributes
    // exp(-int_a^lo k) * h * E(k_i h) with h the segment overlap.
    double g = 0.0;
    double damp = 1.0;  // exp(-int_a^lo k)
    double lo = a;
    const auto& breaks = k_.breakpoints();
    while (lo < b) {
        double hi = b;
        for (double bp : breaks) {
            if (bp > lo && bp < hi) {
                hi = bp;
                break;
            }
        }
        const double ki = k_(lo);
        const double h = hi - lo;
        g += damp * h * stable::expm1_ratio(ki * h);
        damp *= std::exp(-ki * h);
        lo = hi;
    }
    return g;
}

double MeanReversion::accumulation(double t) const { return std::exp(integral(0.0, t)); }

Volatility Volatility::time_dependent(std::function<double(double)> eta_t) {
    Volatility v;
    v.eta_ = [f = std::move(eta_t)](double t, double, double) { return f(t); };
    v.state_dependent_ = false;
    return v;
}

Volatility Volatility::state_dependent(Fn eta, Fn deta_dx, Fn deta_dy, Fn d2eta_dx2) {
    Volatility v;
    v.eta_ = std::move(eta);
    v.dx_ = std::move(deta_dx);
    v.dy_ = std::move(deta_dy);
    v.dxx_ = std::move(d2eta_dx2);
    v.state_dependent_ = true;
    return v;
}

Volatility Volatility::hull_white(double sigma, double k) {
    return time_dependent([sigma, k](double t) { return sigma * std::exp(-k * t); });
}

Volatility Volatility::tanh_test(double sigma, double k, double c) {
    if (!(std::abs(c) < 1.0))
        throw std::invalid_argument("tanh_test: |c| must be < 1 to keep eta positive");
    auto base = [sigma, k](double t) { return sigma * std::exp(-k * t); };
    return state_dependent(
        [base, c](double t, double x, double) { return base(t) * (1.0 + c * std::tanh(x)); },
        [base, c](double t, double x, double) {
            const double th = std::tanh(x);
            return base(t) * c * (1.0 - th * th);
        },
        [](double, double, double) { return 0.0; },
        [base, c](double t, double x, double) {
            const double th = std::tanh(x);
            return base(t) * c * (-2.0 * th * (1.0 - th * th));
        });
}

double Volatility::deta_dx(double t, double x, double y) const {
    if (!state_dependent_) return 0.0;
    if (dx_) return dx_(t, x, y);
    const double h = fd_step(x);
    return (eta_(t, x + h, y) - eta_(t, x - h, y)) / (2.0 * h);
}

double Volatility::deta_dy(double t, double x, double y) const {
    if (!state_dependent_) return 0.0;
    if (dy_) return dy_(t, x, y);
    const double h = fd_step(y);
    return (eta_(t, x, y + h) - eta_(t, x, y - h)) / (2.0 * h);
}

double Volatility::d2eta_dx2(double t, double x, double y) const {
    if (!state_dependent_) return 0.0;
    if (dxx_) return dxx_(t, x, y);
    const double h = fd_step(x);
    return (eta_(t, x + h, y) - 2.0 * eta_(t, x, y) + eta_(t, x - h, y)) / (h * h);
}

CheyetteSpec::CheyetteSpec(MeanReversion k, Volatility vol, CurveSet curve)
    : k_(std::move(k)), vol_(std::move(vol)), curve_(std::move(curve)) {}

double CheyetteSpec::G(double t, double T) const {
    if (T < t) throw std::domain_error("CheyetteSpec::G: T < t");
    return k_.G(t, T);
}

double CheyetteSpec::bond_reconstruct(double t, double T, const ModelState& state) const {
    if (T < t) throw std::domain_error("bond_reconstruct: T < t");
    if (std::abs(state.t - t) > 1e-12)
        throw std::domain_error("bond_reconstruct: state time does not match t");
    const double g = G(t, T);
    return curve_.ois.df(t, T) * std::exp(-g * state.x - 0.5 * g * g * state.y);
}

double CheyetteSpec::y_bar(double t) const {
    if (t == 0.0) return 0.0;
    return integrate_value(
        [this, t](double u) {
            const double e = vol_.eta(u, 0.0, 0.0);
            return std::exp(-2.0 * k_.integral(u, t)) * e * e;
        },
        0.0, t, 1e-14);
}

double CheyetteSpec::x_bar_drift(double t) const {
    if (t == 0.0) return 0.0;
    // Fubini reduction of int_0^t exp(-int_u^t k) ybar(u) du to a single
    // integral: int_0^t eta^2(v,0,0) exp(-int_v^t k) G(v,t) dv.
    return integrate_value(
        [this, t](double v) {
            const double e = vol_.eta(v, 0.0, 0.0);
            return e * e * k_.damping(v, t) * k_.G(v, t);
        },
        0.0, t, 1e-13);
}

double CheyetteSpec::expected_integrated_short_rate(double t0, double t1) const {
    if (!(t0 >= 0.0 && t1 > t0)) {
        if (t0 >= 0.0 && t1 == t0) return 0.0;
        throw std::domain_error("expected_integrated_short_rate: need 0 <= t0 < t1");
    }
    const double log_term = curve_.ois.integrated_forward(t0, t1);
    // int_{t0}^{t1} x_bar_drift(u) du collapses (Fubini, dG/du = exp(-int k))
    // to (1/2) int_0^{t1} eta^2(v) (G^2(v,t1) - G^2(v,max(v,t0))) dv.
    const double drift = integrate_value(
        [this, t0, t1](double v) {
            const double e = vol_.eta(v, 0.0, 0.0);
            const double g1 = k_.G(v, t1);
            const double g0 = (v < t0) ? k_.G(v, t0) : 0.0;
            return 0.5 * e * e * (g1 * g1 - g0 * g0);
        },
        0.0, t1, 1e-13);
    return log_term + drift;
}

CheyetteSpec HullWhiteSpec::to_cheyette(CurveSet curve) const {
    return CheyetteSpec(MeanReversion(k), Volatility::hull_white(sigma, k), std::move(curve));
}

}  // namespace ca
