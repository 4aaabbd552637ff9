#pragma once

#include <cstdint>
#include <iosfwd>
#include <vector>

#include "mmfill/dpe_solver.hpp"
#include "mmfill/dynamics.hpp"
#include "mmfill/fill_engine.hpp"
#include "mmfill/market_data.hpp"
#include "mmfill/params.hpp"
#include "mmfill/rng.hpp"

namespace mmfill {

/// One strategy window. State arrays hold n_dt + 1 entries (index i is the
/// state at the start of step i, the last entry is the horizon); per-step
/// arrays hold n_dt entries.
struct SimResult {
    std::vector<int> inventory;
    std::vector<double> cash;
    std::vector<double> wealth;
    std::vector<double> mid;
    std::vector<double> alpha;
    std::vector<FillCounters> counters;
    std::vector<FillEvent> fills;
    std::vector<bool> posted_bid;
    std::vector<bool> posted_ask;
    std::vector<bool> mo_buy;
    std::vector<bool> mo_sell;
    double terminal_wealth = 0.0;
    double running_penalty = 0.0;
    double objective = 0.0;

    int n_steps() const { return static_cast<int>(posted_bid.size()); }
    const FillCounters& totals() const { return counters.back(); }

    bool operator==(const SimResult&) const = default;
};

struct BatchResult {
    std::vector<double> terminal_wealths;
    FillCounters fill_totals;
    std::size_t n_paths = 0;
    std::vector<SimResult> paths;

    bool operator==(const BatchResult&) const = default;
};

/// q + #bid fills - #ask fills; throws InventoryBoundBreach outside [-q_max, q_max].
int update_inventory(int q, const std::vector<FillEvent>& fills, int q_max);

/// c + ask fill prices - bid fill prices.
double update_cash(double c, const std::vector<FillEvent>& fills);

/// Marks inventory at the horizon: c + q (s - (delta/2 + varphi q)).
double terminal_wealth(double c, int q, double s, const MarketParams& params);

/// Runs the posting policy over series[0..n_dt]. Prices beyond n_dt are ignored.
SimResult run_simulation(const PostingPolicy& policy, const PriceSeries& series, const EnvMode& mode,
                         const MarketParams& params, RngStream& rng);

/// Number of consecutive windows of n_dt steps (sharing boundary samples).
std::size_t window_count(std::size_t series_length, int n_dt);

/// Window k of a session, seeded with stream id k.
SimResult run_window(const PostingPolicy& policy, const PriceSeries& session, std::size_t k, const EnvMode& mode,
                     const MarketParams& params, std::uint64_t master_seed);

/// All windows of a session. Windows run on up to `threads` workers
/// (0 = hardware concurrency); the result does not depend on scheduling.
BatchResult run_batch(const PostingPolicy& policy, const PriceSeries& session, const EnvMode& mode,
                      const MarketParams& params, std::uint64_t master_seed, unsigned threads = 0);

/// Path snapshot CSV: t_index,bid,ask,mid,posted_bid,posted_ask,fill_side,fill_kind,q,cash,wealth
void write_snapshot(std::ostream& out, const SimResult& result, const PriceSeries& window);

} // namespace mmfill
