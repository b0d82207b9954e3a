#include "ca/kernels.hpp"

#include <cmath>
#include <stdexcept>

#include "ca/quadrature.hpp"

namespace ca {

KernelContext::KernelContext(const CheyetteSpec& spec, double x0,
                             std::optional<SwapSchedule> schedule)
    : spec_(&spec), x0_(x0), schedule_(std::move(schedule)) {
    if (!std::isfinite(x0_)) throw std::invalid_argument("KernelContext: x0 must be finite");
    if (schedule_) schedule_->validate();
}

const SwapSchedule& KernelContext::schedule_or_throw() const {
    if (!schedule_)
        throw std::logic_error("KernelContext: annuity kernel requires a swap schedule");
    return *schedule_;
}

double KernelContext::y_arg(double s) const {
    return spec_->vol().state_dependent_vol() ? spec_->y_bar(s) : 0.0;
}

double KernelContext::eta_at(double s) const { return spec_->vol().eta(s, x0_, y_arg(s)); }

double KernelContext::beta(double s, double t) const {
    if (s > t) throw std::domain_error("beta: s > t");
    return spec_->k().damping(s, t) * eta_at(s);
}

double KernelContext::nu(double s, double T) const {
    if (s > T) throw std::domain_error("nu: s > T");
    return eta_at(s) * spec_->k().G(s, T);
}

double KernelContext::nu_bar(double t, double tp) const {
    if (t > tp) throw std::domain_error("nu_bar: t > tp");
    if (t == tp) return 0.0;
    return integrate_value([this](double s) { return eta_at(s); }, t, tp, 1e-13);
}

double KernelContext::nu_bar_dx(double t, double tp) const {
    if (t > tp) throw std::domain_error("nu_bar_dx: t > tp");
    if (!spec_->vol().state_dependent_vol() || t == tp) return 0.0;
    return integrate_value(
        [this](double s) { return spec_->vol().deta_dx(s, x0_, y_arg(s)); }, t, tp, 1e-13);
}

double KernelContext::gamma(double s, double t0, double t1) const {
    if (!(t0 < t1)) throw std::domain_error("gamma: need t0 < t1");
    if (s > t1) throw std::domain_error("gamma: s > t1");
    if (s >= t1) return 0.0;
    const double a = std::max(s, t0);
    // int_a^{t1} exp(-int_s^u k) du = exp(-int_s^a k) G(a, t1).
    return spec_->vol().eta(s, x0_, 0.0) * spec_->k().damping(s, a) * spec_->k().G(a, t1);
}

double KernelContext::dm_bar(double s, double t, double tp) const {
    if (!(s <= t && t <= tp)) throw std::domain_error("dm_bar: need s <= t <= tp");
    if (!spec_->vol().state_dependent_vol() || s == t) return 1.0;
    const double exponent = integrate_value(
        [this, t, tp](double u) {
            const double y = y_arg(u);
            const double term = spec_->vol().deta_dx(u, x0_, y) * nu_bar(u, tp) +
                                spec_->vol().eta(u, x0_, y) * nu_bar_dx(u, tp);
            return spec_->k().damping(u, t) * term;
        },
        s, t, 1e-11);
    return std::exp(-exponent);
}

double KernelContext::frozen_weight(std::size_t i) const {
    const auto& sched = schedule_or_throw();
    const auto& d = sched.funding_dates;
    if (i + 1 >= d.size()) throw std::out_of_range("frozen_weight: period index");
    const double a01 = annuity(spec_->curve(), sched, 0.0);
    return year_fraction(d[i], d[i + 1]) * spec_->curve().ois.df(d[i + 1]) / a01;
}

double KernelContext::sigma01_frozen(double t) const {
    const auto& sched = schedule_or_throw();
    if (t > sched.start()) throw std::domain_error("sigma01_frozen: t > t_a");
    const auto& d = sched.funding_dates;
    const double a01 = annuity(spec_->curve(), sched, 0.0);
    double acc = 0.0;
    for (std::size_t j = 1; j < d.size(); ++j) {
        const double w = year_fraction(d[j - 1], d[j]) * spec_->curve().ois.df(d[j]) / a01;
        acc += w * nu(t, d[j]);
    }
    return acc;
}

double KernelContext::weighted_g(double u) const {
    const auto& d = schedule_or_throw().funding_dates;
    const double a01 = annuity(spec_->curve(), *schedule_, 0.0);
    double acc = 0.0;
    for (std::size_t j = 1; j < d.size(); ++j) {
        const double w = year_fraction(d[j - 1], d[j]) * spec_->curve().ois.df(d[j]) / a01;
        acc += w * spec_->k().G(u, d[j]);
    }
    return acc;
}

double KernelContext::mu(double u, double x, double, double) const {
    // mu = sum_i w_i(0) d/dx h(u,x,y) G(u,t_i) / beta_{u,k}; the accumulation
    // factors in h and beta_{u,k} cancel, leaving d/dx eta times the
    // weighted G sum.
    return spec_->vol().deta_dx(u, x, y_arg(u)) * weighted_g(u);
}

double KernelContext::annuity_drift_exponent(double s, double ta) const {
    schedule_or_throw();
    if (s > ta) throw std::domain_error("annuity_drift_exponent: s > ta");
    if (!spec_->vol().state_dependent_vol() || s == ta) return 0.0;
    return integrate_value(
        [this, ta](double u) {
            const double y = y_arg(u);
            // d/dx [eta * deta_dx] * W(u) = W * ((deta_dx)^2 + eta * d2eta_dx2).
            const double dx = spec_->vol().deta_dx(u, x0_, y);
            const double dxx = spec_->vol().d2eta_dx2(u, x0_, y);
            const double eta = spec_->vol().eta(u, x0_, y);
            return spec_->k().damping(u, ta) * weighted_g(u) * (dx * dx + eta * dxx);
        },
        s, ta, 1e-10);
}

}  // namespace ca
