#include "mmfill/dynamics.hpp"

#include <cmath>

namespace mmfill {

double arrival_probability(double intensity, double dt) { return -std::expm1(-intensity * dt); }

MOArrivals sample_mo_arrivals(double lambda_plus, double lambda_minus, double dt, RngStream& rng) {
    const double u_buy = rng.uniform();
    const double u_sell = rng.uniform();
    return MOArrivals{
        .buy = u_buy < arrival_probability(lambda_plus, dt),
        .sell = u_sell < arrival_probability(lambda_minus, dt),
    };
}

double step_alpha(double alpha, MOArrivals arrivals, double dt, const MarketParams& params, RngStream& rng) {
    const double z = rng.normal();
    double next = alpha * (1.0 - params.zeta * dt) + params.eta * std::sqrt(dt) * z;
    if (arrivals.buy) next += params.eps_plus;
    if (arrivals.sell) next -= params.eps_minus;
    return next;
}

double tick_price(std::int64_t ticks, double tick) {
    const double per_unit = std::round(1.0 / tick);
    if (per_unit >= 1.0 && std::abs(per_unit * tick - 1.0) < 1e-12) return static_cast<double>(ticks) / per_unit;
    return static_cast<double>(ticks) * tick;
}

double round_to_tick(double price, double tick) { return tick_price(std::llround(price / tick), tick); }

double step_midprice(double s, double alpha, double dt, const MarketParams& params, RngStream& rng,
                     MidpriceOptions options) {
    const double z = rng.normal();
    const double next = s + (params.nu + alpha) * dt + params.sigma * std::sqrt(dt) * z;
    if (!options.round_to_tick) return next;
    const double half = 0.5 * params.delta;
    return round_to_tick(next - half, params.tick) + half;
}

SyntheticPath simulate_synthetic_path(const MarketParams& params, int n_steps, RngStream& rng,
                                      SyntheticPathOptions options) {
    SyntheticPath path;
    const auto n = static_cast<std::size_t>(n_steps);
    path.mid.reserve(n + 1);
    path.alpha.reserve(n + 1);
    path.arrivals.reserve(n);

    const MidpriceOptions mid_opts{.round_to_tick = options.round_to_tick};
    double s = options.s0;
    if (options.round_to_tick) s = round_to_tick(s - 0.5 * params.delta, params.tick) + 0.5 * params.delta;
    double alpha = options.alpha0;
    path.mid.push_back(s);
    path.alpha.push_back(alpha);
    for (int i = 0; i < n_steps; ++i) {
        const auto arrivals = sample_mo_arrivals(params.lambda_plus, params.lambda_minus, params.dt, rng);
        // the midprice drifts with the alpha in force over the step
        s = step_midprice(s, alpha, params.dt, params, rng, mid_opts);
        alpha = step_alpha(alpha, arrivals, params.dt, params, rng);
        path.arrivals.push_back(arrivals);
        path.mid.push_back(s);
        path.alpha.push_back(alpha);
    }

    path.bid.reserve(n + 1);
    path.ask.reserve(n + 1);
    for (double m : path.mid) {
        double bid = m - 0.5 * params.delta;
        double ask = m + 0.5 * params.delta;
        if (options.round_to_tick) {
            bid = round_to_tick(bid, params.tick);
            ask = round_to_tick(ask, params.tick);
        }
        path.bid.push_back(bid);
        path.ask.push_back(ask);
    }
    return path;
}

} // namespace mmfill
