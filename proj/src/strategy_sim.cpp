#include "mmfill/strategy_sim.hpp"

#include <algorithm>
#include <atomic>
#include <ostream>
#include <thread>

#include <fmt/format.h>

namespace mmfill {

int update_inventory(int q, const std::vector<FillEvent>& fills, int q_max) {
    int next = q;
    for (const auto& f : fills) next += f.side == Side::Bid ? 1 : -1;
    if (next > q_max || next < -q_max) {
        throw Error(ErrorCode::InventoryBoundBreach,
                    fmt::format("inventory {} -> {} leaves [-{}, {}]", q, next, q_max, q_max));
    }
    return next;
}

double update_cash(double c, const std::vector<FillEvent>& fills) {
    for (const auto& f : fills) c += f.side == Side::Ask ? f.price : -f.price;
    return c;
}

double terminal_wealth(double c, int q, double s, const MarketParams& params) {
    return c + q * (s - (0.5 * params.delta + params.varphi * q));
}

SimResult run_simulation(const PostingPolicy& policy, const PriceSeries& series, const EnvMode& mode,
                         const MarketParams& params, RngStream& rng) {
    const int n = params.n_dt;
    if (series.size() < static_cast<std::size_t>(n) + 1) {
        throw Error(ErrorCode::SeriesTooShort,
                    fmt::format("series has {} samples, window needs {}", series.size(), n + 1));
    }
    if (policy.n_times() != n + 1 || policy.q_max() != params.q_max) {
        throw Error(ErrorCode::PolicyShapeMismatch,
                    fmt::format("policy covers {} slices and q_max {}, parameters need {} and {}", policy.n_times(),
                                policy.q_max(), n + 1, params.q_max));
    }

    SimResult r;
    const auto size = static_cast<std::size_t>(n);
    r.inventory.reserve(size + 1);
    r.cash.reserve(size + 1);
    r.wealth.reserve(size + 1);
    r.mid.reserve(size + 1);
    r.alpha.reserve(size + 1);
    r.counters.reserve(size + 1);

    int q = 0;
    double c = 0.0;
    double alpha = 0.0;
    FillCounters counters;
    auto record_state = [&](std::size_t i) {
        r.inventory.push_back(q);
        r.cash.push_back(c);
        r.mid.push_back(series.mid(i));
        r.alpha.push_back(alpha);
        r.counters.push_back(counters);
        r.wealth.push_back(c + q * series.mid(i));
    };
    record_state(0);

    for (int i = 0; i < n; ++i) {
        const auto k = static_cast<std::size_t>(i);
        const auto decision = policy.decide(i, alpha, q);
        const auto arrivals = sample_mo_arrivals(params.lambda_plus, params.lambda_minus, params.dt, rng);

        std::vector<FillEvent> fills;
        if (mode.detects_adverse()) {
            fills = detect_adverse_fills(i, decision.post_bid, decision.post_ask, series.bid[k], series.ask[k],
                                         series.bid[k + 1], series.ask[k + 1]);
        }
        auto adverse_on = [&](Side side) {
            return std::any_of(fills.begin(), fills.end(), [side](const auto& f) { return f.side == side; });
        };
        const bool adverse_ask = adverse_on(Side::Ask);
        const bool adverse_bid = adverse_on(Side::Bid);
        if (sample_nonadverse_fill(decision.post_ask, arrivals.buy, adverse_ask, mode.rho_effective, rng)) {
            fills.push_back({i, Side::Ask, series.ask[k], FillKind::NonAdverse});
        }
        if (sample_nonadverse_fill(decision.post_bid, arrivals.sell, adverse_bid, mode.rho_effective, rng)) {
            fills.push_back({i, Side::Bid, series.bid[k], FillKind::NonAdverse});
        }

        r.running_penalty += params.phi * q * q * params.dt;
        q = update_inventory(q, fills, params.q_max);
        c = update_cash(c, fills);
        counters = accumulate(counters, fills);
        alpha = step_alpha(alpha, arrivals, params.dt, params, rng);

        r.posted_bid.push_back(decision.post_bid);
        r.posted_ask.push_back(decision.post_ask);
        r.mo_buy.push_back(arrivals.buy);
        r.mo_sell.push_back(arrivals.sell);
        r.fills.insert(r.fills.end(), fills.begin(), fills.end());
        record_state(k + 1);
    }

    r.terminal_wealth = terminal_wealth(c, q, series.mid(size), params);
    r.wealth.back() = r.terminal_wealth;
    r.objective = r.terminal_wealth - r.running_penalty;
    return r;
}

std::size_t window_count(std::size_t series_length, int n_dt) {
    if (series_length == 0 || n_dt < 1) return 0;
    return (series_length - 1) / static_cast<std::size_t>(n_dt);
}

SimResult run_window(const PostingPolicy& policy, const PriceSeries& session, std::size_t k, const EnvMode& mode,
                     const MarketParams& params, std::uint64_t master_seed) {
    const auto n = static_cast<std::size_t>(params.n_dt);
    RngStream rng(master_seed, k);
    return run_simulation(policy, session.slice(k * n, n + 1), mode, params, rng);
}

BatchResult run_batch(const PostingPolicy& policy, const PriceSeries& session, const EnvMode& mode,
                      const MarketParams& params, std::uint64_t master_seed, unsigned threads) {
    const std::size_t windows = window_count(session.size(), params.n_dt);
    if (windows == 0) {
        throw Error(ErrorCode::SeriesTooShort,
                    fmt::format("session of {} samples holds no window of {} steps", session.size(), params.n_dt));
    }

    BatchResult batch;
    batch.n_paths = windows;
    batch.paths.resize(windows);
    if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
    threads = static_cast<unsigned>(std::min<std::size_t>(threads, windows));

    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::atomic<bool> failed{false};
    auto worker = [&] {
        for (std::size_t k = next++; k < windows && !failed; k = next++) {
            try {
                batch.paths[k] = run_window(policy, session, k, mode, params, master_seed);
            } catch (...) {
                if (!failed.exchange(true)) failure = std::current_exception();
            }
        }
    };
    if (threads <= 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        for (unsigned t = 0; t < threads; ++t) pool.emplace_back(worker);
    }
    if (failure) std::rethrow_exception(failure);

    batch.terminal_wealths.reserve(windows);
    for (const auto& path : batch.paths) {
        batch.terminal_wealths.push_back(path.terminal_wealth);
        batch.fill_totals += path.totals();
    }
    return batch;
}

void write_snapshot(std::ostream& out, const SimResult& result, const PriceSeries& window) {
    out << "t_index,bid,ask,mid,posted_bid,posted_ask,fill_side,fill_kind,q,cash,wealth\n";
    auto fill = result.fills.begin();
    for (std::size_t i = 0; i < result.inventory.size(); ++i) {
        std::string sides;
        std::string kinds;
        for (; fill != result.fills.end() && fill->t_index == static_cast<int>(i); ++fill) {
            if (!sides.empty()) {
                sides += '|';
                kinds += '|';
            }
            sides += to_string(fill->side);
            kinds += to_string(fill->kind);
        }
        const bool step = i < result.posted_bid.size();
        out << fmt::format("{},{},{},{},{},{},{},{},{},{},{}\n", i, window.bid[i], window.ask[i], result.mid[i],
                           step && result.posted_bid[i] ? 1 : 0, step && result.posted_ask[i] ? 1 : 0, sides, kinds,
                           result.inventory[i], result.cash[i], result.wealth[i]);
    }
}

} // namespace mmfill
