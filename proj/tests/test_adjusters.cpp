#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "ca/adjusters.hpp"
#include "oracles.hpp"

using namespace ca;

namespace {

CurveSet flat_world(double r) { return CurveSet{DiscountCurve::flat(r), BasisSpread::zero()}; }

Cms cms_5y_annual(double ta, double tp_offset = 1.0) {
    return Cms::from_schedule(SwapSchedule::uniform(ta, ta + 5.0, 1.0, 1.0, ta + tp_offset));
}

double rel_diff(double a, double b) { return std::abs(a - b) / std::max(std::abs(a), std::abs(b)); }

}  // namespace

TEST_CASE("measure change template") {
    auto dsf = [](double s) { return 1.0 + s; };
    CHECK(measure_change_adjustment(dsf, [](double) { return 0.0; }, 0.0, 2.0).value == 0.0);
    CHECK(measure_change_adjustment(dsf, dsf, 1.0, 1.0).value == 0.0);
    CHECK_THROWS_AS(measure_change_adjustment(dsf, dsf, 2.0, 1.0), std::domain_error);
    // int_0^1 (1+s)^2 ds = 7/3
    CHECK(measure_change_adjustment(dsf, dsf, 0.0, 1.0).value ==
          doctest::Approx(7.0 / 3.0).epsilon(1e-13));
}

TEST_CASE("zero volatility gives exactly zero adjustment") {
    const auto curve = flat_world(0.01);
    const auto spec = HullWhiteSpec{0.0, 0.003}.to_cheyette(curve);
    CHECK(ca_future(spec, Future{1.0, 1.0, 1.25}).adjustment == 0.0);
    CHECK(std::abs(ca_ois_future(spec, OisFuture{1.0, 1.25, OisMode::compounding}).adjustment) <
          1e-15);
    CHECK(std::abs(ca_ois_future(spec, OisFuture{1.0, 1.25, OisMode::average}).adjustment) < 1e-15);
    const auto fra = ca_fra_arrears(spec, FraInArrears{1.0, 1.5});
    CHECK(fra.adjustment == 0.0);
    CHECK(*fra.variant_adjustment == 0.0);
    CHECK(ca_cms(spec, cms_5y_annual(1.0)).adjustment == 0.0);
}

TEST_CASE("zero volatility OIS rates collapse to the flat curve values") {
    const double r = 0.01, t0 = 1.0, t1 = 1.25, delta = 0.25;
    const auto spec = HullWhiteSpec{0.0, 0.003}.to_cheyette(flat_world(r));
    const auto comp = ca_ois_future(spec, OisFuture{t0, t1, OisMode::compounding});
    CHECK(comp.base_rate == doctest::Approx(std::expm1(r * delta) / delta).epsilon(1e-14));
    CHECK(comp.adjusted_rate == doctest::Approx(comp.base_rate).epsilon(1e-14));
    const auto avg = ca_ois_future(spec, OisFuture{t0, t1, OisMode::average});
    CHECK(avg.base_rate == doctest::Approx(r).epsilon(1e-14));
    CHECK(avg.adjusted_rate == doctest::Approx(r).epsilon(1e-14));
}

TEST_CASE("futures adjustment") {
    const auto curve = flat_world(0.01);
    const HullWhiteSpec hw{0.015, 0.003};
    const auto spec = hw.to_cheyette(curve);

    SUBCASE("expiring now has no adjustment") {
        const auto r = ca_future(spec, Future{0.0, 0.0, 0.25});
        CHECK(r.adjustment == 0.0);
        CHECK(r.adjusted_rate == r.base_rate);
    }
    SUBCASE("positive and increasing in expiry") {
        double prev = 0.0;
        for (double t0 : {0.25, 0.5, 1.0, 2.0, 5.0, 10.0}) {
            const double a = ca_future(spec, Future{t0, t0, t0 + 0.25}).adjustment;
            CHECK(a > prev);
            prev = a;
        }
    }
    SUBCASE("generic quadrature against a 1e6-node trapezoid oracle") {
        const Future p{1.0, 1.0, 1.25};
        const double sig = hw.sigma, k = hw.k;
        auto integrand = [&](double s) {
            // beta(s, t0) nu(s, t2) with eta_s = sigma e^{-ks}
            const double g = (1.0 - std::exp(-k * (p.t2 - s))) / k;
            return sig * std::exp(-k * p.t0) * sig * std::exp(-k * s) * g;
        };
        const double q = oracle::trapezoid(integrand, 0.0, p.t0, 1000000);
        const double delta = 0.25;
        const double pref = df_estimation(curve, 0.0, p.t1) / (delta * df_estimation(curve, 0.0, p.t2));
        const double g_diff = std::exp(-k * (p.t1 - p.t0)) * (1.0 - std::exp(-k * delta)) / k;
        const auto r = ca_future(spec, p);
        CHECK(std::abs(r.adjustment - pref * g_diff * q) < 1e-12);
        CHECK(r.quadrature_error_estimate < 1e-10);
    }
    SUBCASE("closed form matches the generic path") {
        for (double t0 : {1.0, 5.0, 10.0}) {
            const Future p{t0, t0, t0 + 0.25};
            CHECK(rel_diff(ca_future(spec, p).adjustment, ca_future_hw(hw, curve, p).adjustment) <
                  1e-8);
        }
    }
    SUBCASE("invalid dates") {
        CHECK_THROWS_AS(ca_future(spec, Future{2.0, 1.0, 1.25}), std::domain_error);
        CHECK_THROWS_AS(ca_future(spec, Future{-1.0, 1.0, 1.25}), std::domain_error);
        CHECK_THROWS_AS(ca_future(spec, Future{1.0, 1.0, 1.0}), std::domain_error);
    }
}

TEST_CASE("OIS futures adjustment") {
    const auto curve = flat_world(0.01);
    const HullWhiteSpec hw{0.01, 0.003};
    const auto spec = hw.to_cheyette(curve);

    SUBCASE("closed form matches the generic path, both modes") {
        for (double t0 : {1.0, 5.0, 10.0}) {
            for (OisMode m : {OisMode::compounding, OisMode::average}) {
                const OisFuture p{t0, t0 + 0.25, m};
                CHECK(rel_diff(ca_ois_future(spec, p).adjustment,
                               ca_ois_future_hw(hw, curve, p).adjustment) < 1e-8);
            }
        }
    }
    SUBCASE("Gamma squared integral against a 1e6-node trapezoid oracle") {
        const OisFuture p{1.0, 1.25, OisMode::compounding};
        const double sig = hw.sigma, k = hw.k;
        auto gamma2 = [&](double s) {
            const double a = std::max(s, p.t0);
            const double g = (sig / k) * (std::exp(-k * a) - std::exp(-k * p.t1));
            return g * g;
        };
        // split at the kernel kink
        const double v = oracle::trapezoid(gamma2, 0.0, p.t0, 500000) +
                         oracle::trapezoid(gamma2, p.t0, p.t1, 500000);
        const auto r = ca_ois_future(spec, p);
        const double delta = p.t1 - p.t0;
        const double ei = spec.expected_integrated_short_rate(p.t0, p.t1);
        const double half_v = std::log1p(delta * r.adjusted_rate) - ei;
        CHECK(std::abs(half_v - 0.5 * v) < 1e-12);
    }
    SUBCASE("average rate equals the expected integrated rate over delta") {
        for (double t0 : {1.0, 4.0, 10.0}) {
            const OisFuture p{t0, t0 + 0.25, OisMode::average};
            const auto r = ca_ois_future(spec, p);
            const double want = spec.expected_integrated_short_rate(p.t0, p.t1) / 0.25;
            CHECK(std::abs(r.adjusted_rate - want) < 1e-14);
        }
    }
    SUBCASE("compounding exceeds average adjustment") {
        const auto c = ca_ois_future(spec, OisFuture{5.0, 5.25, OisMode::compounding});
        const auto a = ca_ois_future(spec, OisFuture{5.0, 5.25, OisMode::average});
        CHECK(c.adjustment > a.adjustment);
        CHECK(a.adjustment > 0.0);
    }
    SUBCASE("invalid dates") {
        CHECK_THROWS_AS(ca_ois_future(spec, OisFuture{1.25, 1.0, OisMode::average}),
                        std::domain_error);
    }
}

TEST_CASE("FRA in arrears adjustment") {
    const auto curve = flat_world(0.01);
    const HullWhiteSpec hw{0.1, 0.007};
    const auto spec = hw.to_cheyette(curve);

    SUBCASE("closed form matches the generic path, both forms") {
        for (double t1 : {1.0, 5.0, 10.0}) {
            const FraInArrears p{t1, t1 + 0.5};
            const auto g = ca_fra_arrears(spec, p);
            const auto c = ca_fra_arrears_hw(hw, curve, p);
            CHECK(rel_diff(g.adjustment, c.adjustment) < 1e-8);
            REQUIRE(g.variant_adjustment.has_value());
            REQUIRE(c.variant_adjustment.has_value());
            CHECK(rel_diff(*g.variant_adjustment, *c.variant_adjustment) < 1e-8);
        }
    }
    SUBCASE("both forms positive, same order of magnitude") {
        const auto r = ca_fra_arrears(spec, FraInArrears{5.0, 5.5});
        CHECK(r.adjustment > 0.0);
        CHECK(*r.variant_adjustment > 0.0);
        CHECK(rel_diff(r.adjustment, *r.variant_adjustment) < 0.1);
    }
    SUBCASE("invalid dates") {
        CHECK_THROWS_AS(ca_fra_arrears(spec, FraInArrears{0.0, 0.5}), std::domain_error);
        CHECK_THROWS_AS(ca_fra_arrears(spec, FraInArrears{1.0, 1.0}), std::domain_error);
    }
}

TEST_CASE("CMS adjustment") {
    const auto curve = flat_world(0.01);
    const HullWhiteSpec hw{0.01, 0.0007};
    const auto spec = hw.to_cheyette(curve);

    SUBCASE("closed form matches the generic path") {
        for (double ta : {1.0, 5.0}) {
            const Cms p = cms_5y_annual(ta);
            CHECK(rel_diff(ca_cms(spec, p).adjustment, ca_cms_hw(hw, curve, p).adjustment) < 1e-8);
        }
    }
    SUBCASE("positive adjustment, base equals the par swap rate") {
        const Cms p = cms_5y_annual(5.0);
        const auto r = ca_cms(spec, p);
        CHECK(r.adjustment > 0.0);
        CHECK(r.base_rate ==
              doctest::Approx(swap_rates(curve, p.schedule, 0.0).s_ab).epsilon(1e-15));
        CHECK(r.adjusted_rate == doctest::Approx(r.base_rate + r.adjustment).epsilon(1e-15));
    }
    SUBCASE("failed expansion-point search reports the bracket") {
        const auto wild = HullWhiteSpec{5.0, 0.0007}.to_cheyette(curve);
        CHECK_THROWS_AS(ca_cms(wild, cms_5y_annual(10.0)), std::runtime_error);
    }
    SUBCASE("product validation") {
        Cms p = cms_5y_annual(1.0);
        p.tp = p.tb + 1.0;
        CHECK_THROWS_AS(ca_cms(spec, p), std::domain_error);
        Cms zero_start = cms_5y_annual(1.0);
        zero_start.ta = 0.0;
        CHECK_THROWS_AS(ca_cms(spec, zero_start), std::domain_error);
    }
}

TEST_CASE("closed forms are continuous as k tends to zero") {
    const auto curve = flat_world(0.01);
    const HullWhiteSpec lo{0.015, 0.0}, hi{0.015, 1e-8};
    CHECK(std::abs(ca_future_hw(lo, curve, Future{1.0, 1.0, 1.25}).adjustment -
                   ca_future_hw(hi, curve, Future{1.0, 1.0, 1.25}).adjustment) < 1e-10);
    for (OisMode m : {OisMode::compounding, OisMode::average}) {
        CHECK(std::abs(ca_ois_future_hw(lo, curve, OisFuture{1.0, 1.25, m}).adjustment -
                       ca_ois_future_hw(hi, curve, OisFuture{1.0, 1.25, m}).adjustment) < 1e-10);
    }
    CHECK(std::abs(ca_fra_arrears_hw(lo, curve, FraInArrears{1.0, 1.5}).adjustment -
                   ca_fra_arrears_hw(hi, curve, FraInArrears{1.0, 1.5}).adjustment) < 1e-10);
    CHECK(std::abs(ca_cms_hw(lo, curve, cms_5y_annual(1.0)).adjustment -
                   ca_cms_hw(hi, curve, cms_5y_annual(1.0)).adjustment) < 1e-10);
    CHECK_THROWS_AS(ca_future_hw(HullWhiteSpec{0.015, -0.01}, curve, Future{1.0, 1.0, 1.25}),
                    std::domain_error);
}

TEST_CASE("closed-form adjustments scale with sigma squared") {
    const auto curve = flat_world(0.01);
    auto scaled = [](const HullWhiteSpec& hw) { return HullWhiteSpec{2.0 * hw.sigma, hw.k}; };

    SUBCASE("futures and FRA scale exactly") {
        const HullWhiteSpec hw{0.015, 0.003};
        const Future f{5.0, 5.0, 5.25};
        CHECK(rel_diff(ca_future_hw(scaled(hw), curve, f).adjustment,
                       4.0 * ca_future_hw(hw, curve, f).adjustment) < 1e-12);
        const HullWhiteSpec hf{0.1, 0.007};
        const FraInArrears p{5.0, 5.5};
        const auto a = ca_fra_arrears_hw(hf, curve, p);
        const auto b = ca_fra_arrears_hw(scaled(hf), curve, p);
        CHECK(rel_diff(b.adjustment, 4.0 * a.adjustment) < 1e-12);
        CHECK(rel_diff(*b.variant_adjustment, 4.0 * *a.variant_adjustment) < 1e-12);
    }
    SUBCASE("OIS scales exactly on the log transform") {
        // log1p(delta R) - log1p(delta Rbase) = drift + V/2, which is linear
        // in sigma^2; the rate-space adjustment is not exactly homogeneous.
        const HullWhiteSpec hw{0.01, 0.003};
        const double delta = 0.25;
        for (OisMode m : {OisMode::compounding, OisMode::average}) {
            const OisFuture p{5.0, 5.25, m};
            const auto a = ca_ois_future_hw(hw, curve, p);
            const auto b = ca_ois_future_hw(scaled(hw), curve, p);
            double ea, eb;
            if (m == OisMode::compounding) {
                ea = std::log1p(delta * a.adjusted_rate) - std::log1p(delta * a.base_rate);
                eb = std::log1p(delta * b.adjusted_rate) - std::log1p(delta * b.base_rate);
            } else {
                ea = a.adjustment;
                eb = b.adjustment;
            }
            CHECK(rel_diff(eb, 4.0 * ea) < 1e-12);
        }
    }
    SUBCASE("CMS scales to first order only") {
        // The expansion point and curve sensitivities depend on sigma through
        // ybar(ta), so homogeneity holds only up to that second-order effect.
        const HullWhiteSpec hw{0.01, 0.0007};
        const Cms p = cms_5y_annual(5.0);
        CHECK(rel_diff(ca_cms_hw(scaled(hw), curve, p).adjustment,
                       4.0 * ca_cms_hw(hw, curve, p).adjustment) < 1e-2);
    }
}
