#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "mmfill/error.hpp"

namespace mmfill {

/// Model constants for the market-making problem. Prices are in price units,
/// times in seconds, inventory in lots.
struct MarketParams {
    double sigma = 0.005;        // midprice volatility
    double nu = 0.0;             // long-term drift
    double zeta = 0.05;          // alpha mean-reversion rate
    double eta = 0.001;          // alpha diffusion volatility
    double eps_plus = 0.002;     // alpha jump on a buy market order
    double eps_minus = 0.002;    // alpha jump on a sell market order
    double lambda_plus = 0.5833; // buy market-order intensity
    double lambda_minus = 0.5833;
    double delta = 0.01;         // bid-ask spread
    double varphi = 0.01;        // terminal inventory penalty
    double phi = 0.0;            // running inventory penalty
    double rho = 0.2;            // non-adverse fill probability
    int q_max = 7;
    double horizon = 120.0;
    double dt = 1.0;
    int n_dt = 120;
    double tick = 0.01;          // quote grid for synthetic prices

    bool operator==(const MarketParams&) const = default;
};

/// Alpha grid and time substepping for the value-function solver.
struct SolverGrid {
    double alpha_min = -0.04;
    double alpha_max = 0.04;
    int n_alpha = 51;
    int substeps = 2;

    double alpha_step() const { return (alpha_max - alpha_min) / (n_alpha - 1); }

    bool operator==(const SolverGrid&) const = default;
};

struct ValidationIssue {
    ErrorCode code;
    std::string message;
};

MarketParams default_params();
SolverGrid default_grid();

/// Returns every violated invariant; an empty list means the inputs are valid.
std::vector<ValidationIssue> validate(const MarketParams& params, const SolverGrid& grid);

/// Throws Error(ValidationError) listing all issues if validate() finds any.
void ensure_valid(const MarketParams& params, const SolverGrid& grid);

struct Config {
    MarketParams params;
    SolverGrid grid;

    bool operator==(const Config&) const = default;
};

/// Parses a `key = value` document; absent keys keep their defaults.
Config load_config(std::string_view text);

/// Inverse of load_config: every key, one per line, shortest round-trip form.
std::string render_config(const MarketParams& params, const SolverGrid& grid);

/// 64-bit FNV-1a over the rendered configuration.
std::uint64_t fingerprint(const MarketParams& params, const SolverGrid& grid);

} // namespace mmfill
