#include "mmfill/dpe_solver.hpp"

#include <algorithm>
#include <cmath>

#include <fmt/format.h>

namespace mmfill {

std::vector<double> AlphaGrid::nodes() const {
    std::vector<double> out(static_cast<std::size_t>(n));
    for (int j = 0; j < n; ++j) out[static_cast<std::size_t>(j)] = node(j);
    return out;
}

int AlphaGrid::nearest(double alpha) const {
    const long k = std::lround((alpha - alpha_min) / step);
    return static_cast<int>(std::clamp<long>(k, 0, n - 1));
}

double interp_alpha(std::span<const double> slice, const AlphaGrid& grid, double alpha) {
    const double x = (alpha - grid.alpha_min) / grid.step;
    if (x <= 0.0) return slice.front();
    const auto last = static_cast<double>(grid.n - 1);
    if (x >= last) return slice.back();
    const auto k = static_cast<std::size_t>(std::floor(x));
    const double w = x - static_cast<double>(k);
    if (w == 0.0) return slice[k];
    return (1.0 - w) * slice[k] + w * slice[k + 1];
}

ValueSurface::ValueSurface(int n_times, AlphaGrid grid, int q_max, std::uint64_t params_fingerprint)
    : n_times_(n_times), grid_(grid), q_max_(q_max), fingerprint_(params_fingerprint),
      values_(static_cast<std::size_t>(n_times) * static_cast<std::size_t>(2 * q_max + 1) *
                  static_cast<std::size_t>(grid.n),
              0.0) {}

PostingPolicy::PostingPolicy(int n_times, AlphaGrid grid, int q_max)
    : n_times_(n_times), grid_(grid), q_max_(q_max),
      ask_(static_cast<std::size_t>(n_times) * static_cast<std::size_t>(2 * q_max + 1) *
               static_cast<std::size_t>(grid.n),
           0),
      bid_(ask_.size(), 0) {}

double terminal_condition(int q, const MarketParams& params) {
    return -q * (0.5 * params.delta + params.varphi * q);
}

void explicit_substep(std::span<const double> next, std::span<double> out, double tau, const MarketParams& p,
                      const AlphaGrid& grid) {
    const int n = grid.n;
    const int q_max = p.q_max;
    const double da = grid.step;
    const double half_spread = 0.5 * p.delta;
    auto row = [&](int q) {
        return next.subspan(static_cast<std::size_t>(q + q_max) * static_cast<std::size_t>(n),
                            static_cast<std::size_t>(n));
    };

    for (int q = -q_max; q <= q_max; ++q) {
        const auto h = row(q);
        const auto out_row = out.subspan(static_cast<std::size_t>(q + q_max) * static_cast<std::size_t>(n),
                                         static_cast<std::size_t>(n));
        for (int j = 0; j < n; ++j) {
            const auto k = static_cast<std::size_t>(j);
            const double alpha = grid.node(j);
            const double v = h[k];

            double d1 = 0.0;
            double d2 = 0.0;
            if (j == 0) {
                d1 = (h[1] - h[0]) / da;
                d2 = (h[0] - 2.0 * h[1] + h[2]) / (da * da);
            } else if (j == n - 1) {
                d1 = (h[k] - h[k - 1]) / da;
                d2 = (h[k] - 2.0 * h[k - 1] + h[k - 2]) / (da * da);
            } else {
                d1 = (h[k + 1] - h[k - 1]) / (2.0 * da);
                d2 = (h[k + 1] - 2.0 * h[k] + h[k - 1]) / (da * da);
            }
            const double generator = -p.zeta * alpha * d1 + 0.5 * p.eta * p.eta * d2 + alpha * q - p.phi * q * q;

            // buy market order: alpha jumps up, a posted ask sells one lot
            const double up = interp_alpha(h, grid, alpha + p.eps_plus);
            double sell_gain = 0.0;
            if (q > -q_max) {
                const double filled = interp_alpha(row(q - 1), grid, alpha + p.eps_plus);
                sell_gain = std::max(0.0, p.rho * (half_spread + filled - up));
            }
            const double ask_term = p.lambda_plus * (sell_gain + up - v);

            // sell market order: alpha jumps down, a posted bid buys one lot
            const double down = interp_alpha(h, grid, alpha - p.eps_minus);
            double buy_gain = 0.0;
            if (q < q_max) {
                const double filled = interp_alpha(row(q + 1), grid, alpha - p.eps_minus);
                buy_gain = std::max(0.0, p.rho * (half_spread + filled - down));
            }
            const double bid_term = p.lambda_minus * (buy_gain + down - v);

            out_row[k] = v + tau * (generator + ask_term + bid_term);
        }
    }
}

ValueSurface solve_dpe(const MarketParams& params, const SolverGrid& grid) {
    ensure_valid(params, grid);
    const AlphaGrid alpha_grid = AlphaGrid::from(grid);
    if (params.eps_plus >= grid.alpha_max || params.eps_minus >= grid.alpha_max) {
        throw Error(ErrorCode::GridTooCoarse,
                    fmt::format("alpha jump ({}, {}) reaches past the grid half-width {}", params.eps_plus,
                                params.eps_minus, grid.alpha_max));
    }

    ValueSurface surface(params.n_dt + 1, alpha_grid, params.q_max, fingerprint(params, grid));
    const int n_dt = params.n_dt;
    for (int q = -params.q_max; q <= params.q_max; ++q) {
        std::ranges::fill(surface.slice(n_dt, q), terminal_condition(q, params));
    }

    const double tau = params.dt / grid.substeps;
    std::vector<double> current(surface.slice_size());
    std::vector<double> earlier(surface.slice_size());
    for (int t = n_dt - 1; t >= 0; --t) {
        std::ranges::copy(surface.time_slice(t + 1), current.begin());
        for (int s = 0; s < grid.substeps; ++s) {
            explicit_substep(current, earlier, tau, params, alpha_grid);
            current.swap(earlier);
        }
        std::ranges::copy(current, surface.time_slice(t).begin());
        const auto values = surface.time_slice(t);
        if (!std::ranges::all_of(values, [](double v) { return std::isfinite(v); })) {
            throw Error(ErrorCode::UnstableScheme, fmt::format("non-finite value at time slice {}", t));
        }
    }
    return surface;
}

PostingPolicy extract_policy(const ValueSurface& surface, const MarketParams& params) {
    const auto& grid = surface.grid();
    const int q_max = surface.q_max();
    PostingPolicy policy(surface.n_times(), grid, q_max);
    const double half_spread = 0.5 * params.delta;
    for (int t = 0; t < surface.n_times(); ++t) {
        for (int q = -q_max; q <= q_max; ++q) {
            for (int j = 0; j < grid.n; ++j) {
                const double alpha = grid.node(j);
                if (q > -q_max) {
                    const double a = alpha + params.eps_plus;
                    const double diff = surface.interpolate(t, a, q - 1) - surface.interpolate(t, a, q);
                    policy.set_post_ask(t, j, q, half_spread + params.rho * diff > 0.0);
                }
                if (q < q_max) {
                    const double a = alpha - params.eps_minus;
                    const double diff = surface.interpolate(t, a, q + 1) - surface.interpolate(t, a, q);
                    policy.set_post_bid(t, j, q, half_spread + params.rho * diff > 0.0);
                }
            }
        }
    }
    return policy;
}

double reconstruct_value(const ValueSurface& surface, double cash, double price, double alpha, int q, int t_index) {
    return cash + q * price + surface.interpolate(t_index, alpha, q);
}

} // namespace mmfill
