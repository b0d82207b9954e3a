#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <stdexcept>

#include "ca/adjusters.hpp"
#include "ca/mc.hpp"

using namespace ca;

namespace {

CurveSet flat_world(double r) { return CurveSet{DiscountCurve::flat(r), BasisSpread::zero()}; }

CheyetteSpec hw_spec(double sigma, double k, double r = 0.01) {
    return HullWhiteSpec{sigma, k}.to_cheyette(flat_world(r));
}

McConfig cfg(std::size_t paths, bool antithetic = true, int spy = 24, std::uint64_t seed = 42) {
    McConfig c;
    c.paths = paths;
    c.steps_per_year = spy;
    c.seed = seed;
    c.antithetic = antithetic;
    return c;
}

}  // namespace

TEST_CASE("config validation") {
    CHECK_THROWS_AS(cfg(1).validate(), std::domain_error);
    CHECK_THROWS_AS(cfg(100, true, 6).validate(), std::domain_error);
    CHECK_THROWS_AS(cfg(101, true).validate(), std::domain_error);
    CHECK_NOTHROW(cfg(101, false).validate());
}

TEST_CASE("path states are well formed") {
    const auto spec = CheyetteSpec(MeanReversion(0.003), Volatility::tanh_test(0.02, 0.003, 0.5),
                                   flat_world(0.01));
    std::size_t seen = 0;
    simulate(spec, cfg(8, true, 24), 2.0, {0.5, 2.0}, [&](std::size_t, const PathState& p) {
        ++seen;
        CHECK(p.integrated_r.front() == 0.0);
        CHECK(p.t.front() == 0.0);
        CHECK(p.t.back() == 2.0);
        for (double yv : p.y) CHECK(yv >= 0.0);
        CHECK(p.index_of(0.5) > 0);
        CHECK_THROWS_AS(p.index_of(0.123456), std::logic_error);
    });
    CHECK(seen == 8);
    CHECK_THROWS_AS(simulate(spec, cfg(8), 1.0, {2.0}, [](std::size_t, const PathState&) {}),
                    std::domain_error);
}

TEST_CASE("deterministic reruns are bit-identical") {
    const auto spec = hw_spec(0.015, 0.003);
    const Future p{1.0, 1.0, 1.25};
    const auto a = mc_future_rate(spec, cfg(4096 * 3), p);
    const auto b = mc_future_rate(spec, cfg(4096 * 3), p);
    CHECK(a.mean == b.mean);
    CHECK(a.std_error == b.std_error);
    const auto c = mc_future_rate(spec, cfg(4096 * 3, true, 24, 43), p);
    CHECK(a.mean != c.mean);
}

TEST_CASE("zero volatility collapses to curve values with zero variance") {
    const double r = 0.01;
    const auto spec = hw_spec(0.0, 0.003, r);
    const auto mc = cfg(64);

    const auto fut = mc_future_rate(spec, mc, Future{1.0, 1.0, 1.25});
    CHECK(fut.mean == doctest::Approx(forward_rate(spec.curve(), 0.0, 1.0, 1.25)).epsilon(1e-14));
    CHECK(fut.std_error == 0.0);

    const auto comp = mc_ois_future(spec, mc, OisFuture{1.0, 1.25, OisMode::compounding});
    CHECK(comp.mean == doctest::Approx(std::expm1(r * 0.25) / 0.25).epsilon(1e-13));
    const auto avg = mc_ois_future(spec, mc, OisFuture{1.0, 1.25, OisMode::average});
    CHECK(avg.mean == doctest::Approx(r).epsilon(1e-13));

    const auto fra = mc_fra_arrears(spec, mc, FraInArrears{1.0, 1.5});
    CHECK(fra.mean == doctest::Approx(forward_rate(spec.curve(), 0.0, 1.0, 1.5)).epsilon(1e-12));

    const Cms cp = Cms::from_schedule(SwapSchedule::uniform(1.0, 6.0, 1.0, 1.0, 2.0));
    const auto cms = mc_cms(spec, mc, cp);
    CHECK(cms.mean ==
          doctest::Approx(swap_rates(spec.curve(), cp.schedule, 0.0).s_ab).epsilon(1e-12));
}

TEST_CASE("state variance matches the deterministic y") {
    const auto spec = hw_spec(0.015, 0.003);
    for (double t : {1.0, 5.0, 10.0}) {
        const double mean_x = spec.x_bar_drift(t);
        const auto est = mc_estimate(spec, cfg(40000, false), t, {t}, [&](const PathState& p) {
            const double d = p.x[p.index_of(t)] - mean_x;
            return d * d;
        });
        CHECK(std::abs(est.mean - spec.y_bar(t)) < 3.0 * est.std_error);
    }
}

TEST_CASE("numeraire identity") {
    const auto spec = hw_spec(0.015, 0.003);
    for (double t : {1.0, 5.0, 10.0}) {
        const auto est = mc_numeraire_check(spec, cfg(40000), t);
        CHECK(std::abs(est.mean - 1.0) < 3.0 * est.std_error);
    }
}

TEST_CASE("deflated futures payoff reprices the curve forward") {
    const auto spec = hw_spec(0.015, 0.003);
    const Future p{5.0, 5.0, 5.25};
    const auto est = mc_future_forward(spec, cfg(40000), p);
    CHECK(std::abs(est.mean - forward_rate(spec.curve(), 0.0, p.t1, p.t2)) <
          3.0 * est.std_error);
}

TEST_CASE("OIS futures against the analytic values") {
    const auto spec = hw_spec(0.01, 0.003);
    const HullWhiteSpec hw{0.01, 0.003};
    for (OisMode m : {OisMode::compounding, OisMode::average}) {
        const OisFuture p{5.0, 5.25, m};
        const auto mc = mc_ois_future(spec, cfg(60000, false), p);
        const auto an = ca_ois_future_hw(hw, spec.curve(), p);
        CHECK(std::abs(mc.mean - an.adjusted_rate) < 3.0 * mc.std_error);
    }
    SUBCASE("average payoff is linear, so antithetic kills all noise") {
        const OisFuture p{5.0, 5.25, OisMode::average};
        const auto mc = mc_ois_future(spec, cfg(1024, true), p);
        CHECK(mc.std_error < 1e-9);
        // remaining gap is the trapezoid-in-time discretization bias
        CHECK(std::abs(mc.mean - ca_ois_future_hw(hw, spec.curve(), p).adjusted_rate) < 1e-6);
    }
}

TEST_CASE("standard error shrinks like one over root paths") {
    const auto spec = hw_spec(0.015, 0.003);
    const Future p{2.0, 2.0, 2.25};
    const auto small = mc_future_rate(spec, cfg(20000, false), p);
    const auto large = mc_future_rate(spec, cfg(80000, false), p);
    CHECK(large.std_error / small.std_error == doctest::Approx(0.5).epsilon(0.2));
}

TEST_CASE("antithetic and plain estimates agree") {
    const auto spec = hw_spec(0.015, 0.003);
    const Future p{2.0, 2.0, 2.25};
    const auto a = mc_future_rate(spec, cfg(40000, true), p);
    const auto b = mc_future_rate(spec, cfg(40000, false), p);
    const double combined = std::hypot(a.std_error, b.std_error);
    CHECK(std::abs(a.mean - b.mean) < 3.0 * combined);
    CHECK(a.std_error < b.std_error);
}

TEST_CASE("halving the step leaves the estimate within noise") {
    const auto spec = hw_spec(0.01, 0.003);
    const OisFuture p{2.0, 2.25, OisMode::compounding};
    const auto coarse = mc_ois_future(spec, cfg(30000, false, 24), p);
    const auto fine = mc_ois_future(spec, cfg(30000, false, 48), p);
    CHECK(std::abs(coarse.mean - fine.mean) < 3.0 * std::hypot(coarse.std_error, fine.std_error));
}

TEST_CASE("frozen-coefficient approximation error") {
    SUBCASE("identically zero for time-dependent volatility") {
        const auto spec = hw_spec(0.015, 0.003);
        for (double t : {0.5, 5.0, 30.0}) {
            const auto est = state_approx_error(spec, cfg(256), t);
            CHECK(est.mean == 0.0);
            CHECK(est.std_error == 0.0);
        }
    }
    SUBCASE("short-time decay and long-run boundedness for the tanh test") {
        const auto spec = CheyetteSpec(MeanReversion(0.003),
                                       Volatility::tanh_test(0.02, 0.003, 0.5), flat_world(0.01));
        const double e1 = state_approx_error(spec, cfg(2000, true, 960, 7), 0.1).mean;
        const double e2 = state_approx_error(spec, cfg(2000, true, 960, 7), 0.2).mean;
        const double e3 = state_approx_error(spec, cfg(2000, true, 960, 7), 0.4).mean;
        const double slope1 = std::log(e2 / e1) / std::log(2.0);
        const double slope2 = std::log(e3 / e2) / std::log(2.0);
        CHECK(slope1 >= 2.5);
        CHECK(slope2 >= 2.5);
        const auto far = state_approx_error(spec, cfg(512, true, 24, 7), 30.0);
        CHECK(std::isfinite(far.mean));
        CHECK(far.mean < 1.0);
    }
}

TEST_CASE("non-finite states abort the run with a diagnostic") {
    const auto bad = CheyetteSpec(
        MeanReversion(0.003),
        Volatility::state_dependent([](double t, double, double) {
            return t > 0.5 ? std::nan("") : 0.01;
        }),
        flat_world(0.01));
    CHECK_THROWS_AS(mc_estimate(bad, cfg(16), 1.0, {1.0},
                                [](const PathState& p) { return p.x.back(); }),
                    std::runtime_error);
}
