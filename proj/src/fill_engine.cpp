#include "mmfill/fill_engine.hpp"

#include <ostream>

#include <fmt/format.h>

namespace mmfill {

std::string_view to_string(Side side) { return side == Side::Bid ? "bid" : "ask"; }

std::string_view to_string(FillKind kind) { return kind == FillKind::Adverse ? "adverse" : "non_adverse"; }

std::string_view to_string(EnvMode::Variant variant) {
    return variant == EnvMode::Variant::Benchmark ? "benchmark" : "improved";
}

FillCounters& FillCounters::operator+=(const FillCounters& other) {
    afa += other.afa;
    nfa += other.nfa;
    afb += other.afb;
    nfb += other.nfb;
    n_plus += other.n_plus;
    n_minus += other.n_minus;
    return *this;
}

FillKind classify_fill(Side side, double price_now, double price_next) {
    const bool adverse = side == Side::Bid ? price_next < price_now : price_next > price_now;
    return adverse ? FillKind::Adverse : FillKind::NonAdverse;
}

std::vector<FillEvent> detect_adverse_fills(int t_index, bool posted_bid, bool posted_ask, double bid_now,
                                            double ask_now, double bid_next, double ask_next) {
    std::vector<FillEvent> fills;
    if (posted_bid && bid_next < bid_now) fills.push_back({t_index, Side::Bid, bid_now, FillKind::Adverse});
    if (posted_ask && ask_next > ask_now) fills.push_back({t_index, Side::Ask, ask_now, FillKind::Adverse});
    return fills;
}

bool sample_nonadverse_fill(bool posted, bool mo_arrived, bool adverse_already, double rho, RngStream& rng) {
    const double u = rng.uniform();
    return posted && mo_arrived && !adverse_already && u < rho;
}

FillCounters accumulate(FillCounters counters, const std::vector<FillEvent>& fills) {
    for (const auto& f : fills) {
        const bool adverse = f.kind == FillKind::Adverse;
        if (f.side == Side::Ask) {
            ++(adverse ? counters.afa : counters.nfa);
        } else {
            ++(adverse ? counters.afb : counters.nfb);
        }
    }
    counters.n_plus = counters.afa + counters.nfa;
    counters.n_minus = counters.afb + counters.nfb;
    return counters;
}

void write_fill_log(std::ostream& out, const std::vector<FillEvent>& fills) {
    out << "t_index,side,price,kind\n";
    for (const auto& f : fills) out << fmt::format("{},{},{},{}\n", f.t_index, to_string(f.side), f.price, to_string(f.kind));
}

} // namespace mmfill
