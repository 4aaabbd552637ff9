#pragma once

#include <cstdint>
#include <vector>

#include "mmfill/params.hpp"
#include "mmfill/rng.hpp"

namespace mmfill {

struct PathState {
    double s = 0.0;     // midprice
    double alpha = 0.0; // short-term drift
    int t_index = 0;
};

/// Market-order arrivals within one step, at most one per side.
struct MOArrivals {
    bool buy = false;
    bool sell = false;

    bool operator==(const MOArrivals&) const = default;
};

/// Probability that a Poisson stream of the given intensity fires within dt.
double arrival_probability(double intensity, double dt);

/// Draws exactly two uniforms (buy side first).
MOArrivals sample_mo_arrivals(double lambda_plus, double lambda_minus, double dt, RngStream& rng);

/// Euler step of the mean-reverting alpha with market-order jumps.
/// Always consumes one normal draw, even when eta is zero.
double step_alpha(double alpha, MOArrivals arrivals, double dt, const MarketParams& params, RngStream& rng);

/// Price of a whole number of ticks. When the tick divides one unit evenly the
/// result is ticks / (1 / tick), the same double a CSV parser would produce.
double tick_price(std::int64_t ticks, double tick);

/// Round a price to the nearest multiple of tick.
double round_to_tick(double price, double tick);

struct MidpriceOptions {
    bool round_to_tick = false;
};

/// Euler step of the midprice. With rounding on, the quotes (mid -/+ delta/2)
/// are snapped to the tick grid and the returned mid sits halfway between them.
/// Always consumes one normal draw.
double step_midprice(double s, double alpha, double dt, const MarketParams& params, RngStream& rng,
                     MidpriceOptions options = {});

struct SyntheticPathOptions {
    double s0 = 100.005;
    double alpha0 = 0.0;
    bool round_to_tick = true;
};

/// States have n_steps + 1 entries, arrivals have n_steps.
struct SyntheticPath {
    std::vector<double> mid;
    std::vector<double> bid;
    std::vector<double> ask;
    std::vector<double> alpha;
    std::vector<MOArrivals> arrivals;
};

SyntheticPath simulate_synthetic_path(const MarketParams& params, int n_steps, RngStream& rng,
                                      SyntheticPathOptions options = {});

} // namespace mmfill
