#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "ca/adjusters.hpp"
#include "ca/model.hpp"

namespace ca {

struct McConfig {
    std::size_t paths = 100000;
    int steps_per_year = 250;
    std::uint64_t seed = 0;
    bool antithetic = true;

    void validate() const;
};

struct McEstimate {
    double mean = 0.0;
    double std_error = 0.0;
    std::size_t paths = 0;
};

/// One simulated path on the time grid: states and the running integral of
/// the short rate r = f_ois(0, t) + x.
struct PathState {
    std::vector<double> t;
    std::vector<double> x;
    std::vector<double> y;
    std::vector<double> integrated_r;

    /// Index of a grid time previously registered as an event time.
    std::size_t index_of(double time) const;
};

/// Runs every path sequentially (in path-index order) and hands each to the
/// visitor. The grid is the uniform steps_per_year lattice merged with
/// event_times. Antithetic paths appear as adjacent odd indices.
void simulate(const CheyetteSpec& spec, const McConfig& cfg, double horizon,
              const std::vector<double>& event_times,
              const std::function<void(std::size_t, const PathState&)>& visit);

/// Threaded estimator of E^Q[payoff(path)]; bit-deterministic for a fixed
/// (seed, cfg, spec) regardless of worker count. Worker count is capped by
/// the CA_ENGINE_THREADS environment variable.
McEstimate mc_estimate(const CheyetteSpec& spec, const McConfig& cfg, double horizon,
                       const std::vector<double>& event_times,
                       const std::function<double(const PathState&)>& payoff);

/// Futures rate E^Q[L_E(t0, t1, t2)] from the reconstructed bonds at t0.
McEstimate mc_future_rate(const CheyetteSpec& spec, const McConfig& cfg, const Future& p);

/// Forward benchmark E^{Q^{t2}}[L_E] via the deflated payoff
/// E^Q[e^{-int r} L_E] / P_ois(0, t2); must match the curve forward.
McEstimate mc_future_forward(const CheyetteSpec& spec, const McConfig& cfg, const Future& p);

/// Compounding mode: mean of (e^{I(t0,t1)} - 1)/delta; average: I/delta.
McEstimate mc_ois_future(const CheyetteSpec& spec, const McConfig& cfg, const OisFuture& p);

/// E^{Q^{t1}}[L_E(t1, t1, t2)] by deflation to t1.
McEstimate mc_fra_arrears(const CheyetteSpec& spec, const McConfig& cfg, const FraInArrears& p);

/// E^{t_p}[S_ab(t_a)]: the t_p-paid coupon deflated through
/// e^{-int_0^{ta} r} P_ois(t_a, t_p, x, y) and normalised by P_ois(0, t_p).
McEstimate mc_cms(const CheyetteSpec& spec, const McConfig& cfg, const Cms& p);

/// Numeraire identity: mean of e^{-int_0^T r} / P_ois(0, T), expected 1.
McEstimate mc_numeraire_check(const CheyetteSpec& spec, const McConfig& cfg, double T);

/// E[(x_t - xbar_t)^2] by co-simulating the model dynamics and the
/// locally-deterministic approximation (y pinned to ybar) on shared noise.
/// Identically zero when the volatility is time-dependent (the two
/// dynamics coincide).
McEstimate state_approx_error(const CheyetteSpec& spec, const McConfig& cfg, double t);

}  // namespace ca
