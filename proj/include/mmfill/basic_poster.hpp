#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "mmfill/fill_engine.hpp"
#include "mmfill/market_data.hpp"

namespace mmfill {

struct RestingOrder {
    Side side = Side::Bid;
    double price = 0.0;
    std::int64_t queue_ahead = 0; // lots ahead of us at this price

    bool operator==(const RestingOrder&) const = default;
};

struct FillLog {
    std::vector<FillEvent> fills;
    FillCounters totals;
};

/// Fill counts for one session: total, adverse, non-adverse.
struct FillTypeRow {
    long total = 0;
    long adverse = 0;
    long non_adverse = 0;

    bool operator==(const FillTypeRow&) const = default;
};

/// Always posted at the touch on a tick random walk; one market order per
/// step hits the bid or the ask with equal odds and always fills.
FillLog run_example1(int n_steps, double walk_p, std::uint64_t seed);

/// The queue shrinks by traded volume; the order fills once volume strictly
/// exceeds what was ahead of it.
std::pair<bool, RestingOrder> queue_fill_check(const RestingOrder& order, std::int64_t traded_at_price);

struct BasicPostingConfig {
    double trade_intensity = 0.5833; // market orders per second and side hitting the touch
    double mean_trade_size = 3.47;   // lots, geometric sizes
    std::optional<int> cancel_distance_ticks; // cancel orders further than this from the touch
};

/// Ladder state after the last processed step, for inspection.
struct LadderSnapshot {
    std::vector<RestingOrder> bids; // ascending price
    std::vector<RestingOrder> asks; // ascending price
};

struct BasicPostingRun {
    FillLog log;
    std::vector<LadderSnapshot> ladders; // one per series sample, taken after that sample's reposts
};

/// Static-offset posting with a repost ladder: after a fill at price p the
/// ladder holds a bid at p - offset and an ask at p + offset, unless one is
/// already resting there or it would cross the opposite side. Trade-throughs
/// always fill; orders at the touch fill through the queue model.
BasicPostingRun run_basic_posting_detailed(const PriceSeries& series, int offset_ticks, double tick,
                                           std::uint64_t seed, const BasicPostingConfig& config = {});

FillLog run_basic_posting(const PriceSeries& series, int offset_ticks, double tick, std::uint64_t seed,
                          const BasicPostingConfig& config = {});

FillTypeRow fill_type_table(const FillLog& log);

/// Per-contract posting offsets (ES/CL 4 ticks, NQ 16, ZN 1).
std::optional<int> offset_preset(std::string_view contract);

/// CSV: date,contract,total,adverse,non_adverse
void write_fill_type_summary(std::ostream& out, std::string_view date, std::string_view contract,
                             const FillTypeRow& row);

} // namespace mmfill
