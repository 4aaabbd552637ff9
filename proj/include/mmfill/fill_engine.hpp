#pragma once

#include <iosfwd>
#include <string_view>
#include <vector>

#include "mmfill/rng.hpp"

namespace mmfill {

enum class Side { Bid, Ask };
enum class FillKind { Adverse, NonAdverse };

std::string_view to_string(Side side);
std::string_view to_string(FillKind kind);

/// One executed unit. Bid fills execute at the posted bid, ask fills at the
/// posted ask.
struct FillEvent {
    int t_index = 0;
    Side side = Side::Bid;
    double price = 0.0;
    FillKind kind = FillKind::NonAdverse;

    bool operator==(const FillEvent&) const = default;
};

/// Cumulative fill counts: adverse/non-adverse at the ask (afa/nfa) and at the
/// bid (afb/nfb). n_plus counts ask fills, n_minus bid fills.
struct FillCounters {
    long afa = 0;
    long nfa = 0;
    long afb = 0;
    long nfb = 0;
    long n_plus = 0;
    long n_minus = 0;

    FillCounters& operator+=(const FillCounters& other);
    bool operator==(const FillCounters&) const = default;
};

struct EnvMode {
    enum class Variant { Benchmark, Improved };

    Variant variant = Variant::Benchmark;
    double rho_effective = 1.0;

    static EnvMode benchmark() { return {Variant::Benchmark, 1.0}; }
    static EnvMode improved(double rho) { return {Variant::Improved, rho}; }

    bool detects_adverse() const { return variant == Variant::Improved; }
};

std::string_view to_string(EnvMode::Variant variant);

/// A bid fill is adverse iff the next bid is lower; an ask fill iff the next
/// ask is higher. Unchanged or favourable moves are non-adverse.
FillKind classify_fill(Side side, double price_now, double price_next);

/// Forced fills when the touch moves through a posted quote, at most one per side.
std::vector<FillEvent> detect_adverse_fills(int t_index, bool posted_bid, bool posted_ask, double bid_now,
                                            double ask_now, double bid_next, double ask_next);

/// Bernoulli(rho) thinning of a market-order fill. Consumes exactly one
/// uniform on every call so the stream stays aligned across branches.
bool sample_nonadverse_fill(bool posted, bool mo_arrived, bool adverse_already, double rho, RngStream& rng);

FillCounters accumulate(FillCounters counters, const std::vector<FillEvent>& fills);

/// CSV: t_index,side,price,kind
void write_fill_log(std::ostream& out, const std::vector<FillEvent>& fills);

} // namespace mmfill
