#include "mmfill/basic_poster.hpp"

#include <cmath>
#include <ostream>
#include <random>

#include <fmt/format.h>

#include "mmfill/params.hpp"
#include "mmfill/rng.hpp"

namespace mmfill {

namespace {

class TickGrid {
public:
    explicit TickGrid(double tick) : tick_(tick) {}

    std::int64_t ticks(double price) const { return std::llround(price / tick_); }
    double price(std::int64_t ticks) const { return tick_price(ticks, tick_); }

private:
    double tick_;
};

std::int64_t sample_volume(RngStream& rng, double intensity, double mean_size) {
    const auto count = std::poisson_distribution<int>(std::max(intensity, 0.0))(rng.engine());
    std::geometric_distribution<std::int64_t> extra(1.0 / std::max(mean_size, 1.0));
    std::int64_t volume = 0;
    for (int k = 0; k < count; ++k) volume += 1 + extra(rng.engine());
    return volume;
}

} // namespace

FillLog run_example1(int n_steps, double walk_p, std::uint64_t seed) {
    FillLog log;
    if (n_steps <= 0) return log;
    const auto params = default_params();
    const auto quotes = synthetic_quotes(params, n_steps, seed, SyntheticQuoteConfig{.walk_p = walk_p});
    RngStream side_rng(seed, 1);
    for (int i = 0; i < n_steps; ++i) {
        const auto k = static_cast<std::size_t>(i);
        const Side side = side_rng.uniform() < 0.5 ? Side::Bid : Side::Ask;
        const double now = side == Side::Bid ? quotes.bid[k] : quotes.ask[k];
        const double next = side == Side::Bid ? quotes.bid[k + 1] : quotes.ask[k + 1];
        log.fills.push_back({i, side, now, classify_fill(side, now, next)});
    }
    log.totals = accumulate({}, log.fills);
    return log;
}

std::pair<bool, RestingOrder> queue_fill_check(const RestingOrder& order, std::int64_t traded_at_price) {
    RestingOrder next = order;
    next.queue_ahead = std::max<std::int64_t>(0, order.queue_ahead - traded_at_price);
    return {traded_at_price > order.queue_ahead, next};
}

BasicPostingRun run_basic_posting_detailed(const PriceSeries& series, int offset_ticks, double tick,
                                           std::uint64_t seed, const BasicPostingConfig& config) {
    if (series.empty()) throw Error(ErrorCode::EmptySeries, "basic posting needs at least one sample");
    if (offset_ticks < 1) throw Error(ErrorCode::ValidationError, "offset_ticks must be >= 1");

    const TickGrid grid(tick);
    RngStream rng(seed);
    std::map<std::int64_t, RestingOrder> bids;
    std::map<std::int64_t, RestingOrder> asks;
    BasicPostingRun run;

    auto place_bid = [&](std::int64_t p, std::size_t at) {
        if (bids.contains(p)) return;
        if (!asks.empty() && p >= asks.begin()->first) return;
        bids[p] = RestingOrder{Side::Bid, grid.price(p), series.level1_bid_sz[at]};
    };
    auto place_ask = [&](std::int64_t p, std::size_t at) {
        if (asks.contains(p)) return;
        if (!bids.empty() && p <= bids.rbegin()->first) return;
        asks[p] = RestingOrder{Side::Ask, grid.price(p), series.level1_ask_sz[at]};
    };
    auto snapshot = [&] {
        LadderSnapshot s;
        for (const auto& [p, o] : bids) s.bids.push_back(o);
        for (const auto& [p, o] : asks) s.asks.push_back(o);
        run.ladders.push_back(std::move(s));
    };

    // opening pair: offset ticks apart, straddling the first mid
    const double mid0 = series.mid(0);
    const auto bid0 = static_cast<std::int64_t>(std::floor((mid0 - 0.5 * offset_ticks * tick) / tick + 1e-9));
    place_bid(bid0, 0);
    place_ask(bid0 + offset_ticks, 0);
    snapshot();

    for (std::size_t i = 0; i + 1 < series.size(); ++i) {
        const auto bid_now = grid.ticks(series.bid[i]);
        const auto ask_now = grid.ticks(series.ask[i]);
        const auto bid_next = grid.ticks(series.bid[i + 1]);
        const auto ask_next = grid.ticks(series.ask[i + 1]);
        const auto sold_at_bid = sample_volume(rng, config.trade_intensity * series.dt, config.mean_trade_size);
        const auto bought_at_ask = sample_volume(rng, config.trade_intensity * series.dt, config.mean_trade_size);

        std::vector<std::pair<Side, std::int64_t>> filled;
        for (auto it = bids.begin(); it != bids.end();) {
            const auto p = it->first;
            bool fill = p > bid_next; // traded through
            if (!fill && p >= bid_now) {
                auto [queue_filled, updated] = queue_fill_check(it->second, sold_at_bid);
                fill = queue_filled;
                it->second = updated;
            }
            if (fill) {
                filled.emplace_back(Side::Bid, p);
                it = bids.erase(it);
            } else {
                ++it;
            }
        }
        for (auto it = asks.begin(); it != asks.end();) {
            const auto p = it->first;
            bool fill = p < ask_next;
            if (!fill && p <= ask_now) {
                auto [queue_filled, updated] = queue_fill_check(it->second, bought_at_ask);
                fill = queue_filled;
                it->second = updated;
            }
            if (fill) {
                filled.emplace_back(Side::Ask, p);
                it = asks.erase(it);
            } else {
                ++it;
            }
        }

        for (const auto& [side, p] : filled) {
            const double price = grid.price(p);
            const double touch_next = grid.price(side == Side::Bid ? bid_next : ask_next);
            run.log.fills.push_back({static_cast<int>(i), side, price, classify_fill(side, price, touch_next)});
        }
        for (const auto& [side, p] : filled) {
            place_bid(p - offset_ticks, i + 1);
            place_ask(p + offset_ticks, i + 1);
        }

        if (config.cancel_distance_ticks) {
            const auto limit = *config.cancel_distance_ticks;
            std::erase_if(bids, [&](const auto& kv) { return bid_next - kv.first > limit; });
            std::erase_if(asks, [&](const auto& kv) { return kv.first - ask_next > limit; });
        }
        snapshot();
    }
    run.log.totals = accumulate({}, run.log.fills);
    return run;
}

FillLog run_basic_posting(const PriceSeries& series, int offset_ticks, double tick, std::uint64_t seed,
                          const BasicPostingConfig& config) {
    return run_basic_posting_detailed(series, offset_ticks, tick, seed, config).log;
}

FillTypeRow fill_type_table(const FillLog& log) {
    FillTypeRow row;
    for (const auto& f : log.fills) {
        ++row.total;
        ++(f.kind == FillKind::Adverse ? row.adverse : row.non_adverse);
    }
    return row;
}

std::optional<int> offset_preset(std::string_view contract) {
    if (contract == "ES" || contract == "CL") return 4;
    if (contract == "NQ") return 16;
    if (contract == "ZN") return 1;
    return std::nullopt;
}

void write_fill_type_summary(std::ostream& out, std::string_view date, std::string_view contract,
                             const FillTypeRow& row) {
    out << "date,contract,total,adverse,non_adverse\n";
    out << fmt::format("{},{},{},{},{}\n", date, contract, row.total, row.adverse, row.non_adverse);
}

} // namespace mmfill
