#include <catch2/catch_amalgamated.hpp>

#include <random>
#include <sstream>

#include "mmfill/fill_engine.hpp"

using namespace mmfill;

TEST_CASE("[fill_engine] classify_fill", "[fill_engine]") {
    CHECK(classify_fill(Side::Bid, 100.00, 99.99) == FillKind::Adverse);
    CHECK(classify_fill(Side::Bid, 100.00, 100.00) == FillKind::NonAdverse);
    CHECK(classify_fill(Side::Bid, 100.00, 100.01) == FillKind::NonAdverse);
    CHECK(classify_fill(Side::Ask, 81.86, 81.86) == FillKind::NonAdverse);
    CHECK(classify_fill(Side::Ask, 81.90, 81.91) == FillKind::Adverse);
    CHECK(classify_fill(Side::Ask, 81.90, 81.89) == FillKind::NonAdverse);
}

TEST_CASE("[fill_engine] detect_adverse_fills", "[fill_engine]") {
    SECTION("ask moves up through a posted ask") {
        const auto fills = detect_adverse_fills(3, false, true, 81.89, 81.90, 81.90, 81.91);
        REQUIRE(fills.size() == 1);
        CHECK(fills[0] == FillEvent{3, Side::Ask, 81.90, FillKind::Adverse});
    }
    SECTION("nothing posted") {
        CHECK(detect_adverse_fills(0, false, false, 81.86, 81.90, 81.70, 82.00).empty());
    }
    SECTION("both posted, only the bid is traded through") {
        const auto fills = detect_adverse_fills(0, true, true, 81.86, 81.90, 81.82, 81.90);
        REQUIRE(fills.size() == 1);
        CHECK(fills[0].side == Side::Bid);
        CHECK(fills[0].price == 81.86);
    }
    SECTION("multi-tick move is still one fill") {
        CHECK(detect_adverse_fills(0, true, false, 81.86, 81.90, 81.50, 81.54).size() == 1);
    }
}

TEST_CASE("[fill_engine] sample_nonadverse_fill", "[fill_engine]") {
    RngStream rng(17);
    for (int i = 0; i < 1000; ++i) {
        CHECK_FALSE(sample_nonadverse_fill(false, true, false, 1.0, rng));
        CHECK_FALSE(sample_nonadverse_fill(true, false, false, 1.0, rng));
        CHECK_FALSE(sample_nonadverse_fill(true, true, true, 1.0, rng));
        CHECK(sample_nonadverse_fill(true, true, false, 1.0, rng));
    }

    SECTION("bernoulli frequency") {
        RngStream r(18);
        const int n = 100000;
        int hits = 0;
        for (int i = 0; i < n; ++i) hits += sample_nonadverse_fill(true, true, false, 0.2, r);
        CHECK(std::abs(hits / double(n) - 0.2) < 0.005);
    }
    SECTION("every call consumes one uniform") {
        RngStream a(19);
        RngStream b(19);
        sample_nonadverse_fill(false, false, false, 0.5, a);
        b.uniform();
        CHECK(a.uniform() == b.uniform());
    }
}

TEST_CASE("[fill_engine] accumulate", "[fill_engine]") {
    const FillCounters zero;
    CHECK(accumulate(zero, {}) == zero);

    const auto one = accumulate(zero, {{0, Side::Ask, 1.0, FillKind::Adverse}});
    CHECK(one.afa == 1);
    CHECK(one.n_plus == 1);
    CHECK(one.n_minus == 0);

    const auto mixed = accumulate(zero, {{0, Side::Ask, 1.0, FillKind::Adverse},
                                         {0, Side::Ask, 1.0, FillKind::NonAdverse},
                                         {0, Side::Bid, 1.0, FillKind::Adverse},
                                         {0, Side::Bid, 1.0, FillKind::NonAdverse}});
    CHECK(mixed == FillCounters{1, 1, 1, 1, 2, 2});

    FillCounters sum = one;
    sum += mixed;
    CHECK(sum == FillCounters{2, 1, 1, 1, 3, 2});
}

TEST_CASE("[fill_engine] modes", "[fill_engine]") {
    CHECK(EnvMode::benchmark().rho_effective == 1.0);
    CHECK_FALSE(EnvMode::benchmark().detects_adverse());
    CHECK(EnvMode::improved(0.2).rho_effective == 0.2);
    CHECK(EnvMode::improved(0.2).detects_adverse());
}

TEST_CASE("[fill_engine] fill log export", "[fill_engine]") {
    std::ostringstream out;
    write_fill_log(out, {{4, Side::Bid, 81.86, FillKind::Adverse}, {5, Side::Ask, 81.9, FillKind::NonAdverse}});
    CHECK(out.str() == "t_index,side,price,kind\n4,bid,81.86,adverse\n5,ask,81.9,non_adverse\n");
}

namespace {

// The engine rules composed as the simulator uses them: adverse first, then
// the ask (buy MO) and bid (sell MO) draws.
std::vector<FillEvent> engine_step(int i, bool pb, bool pa, bool buy, bool sell, const std::vector<double>& bid,
                                   const std::vector<double>& ask, double rho, RngStream& rng) {
    auto fills = detect_adverse_fills(i, pb, pa, bid[i], ask[i], bid[i + 1], ask[i + 1]);
    bool adverse_bid = false;
    bool adverse_ask = false;
    for (const auto& f : fills) (f.side == Side::Bid ? adverse_bid : adverse_ask) = true;
    if (sample_nonadverse_fill(pa, buy, adverse_ask, rho, rng)) fills.push_back({i, Side::Ask, ask[i], FillKind::NonAdverse});
    if (sample_nonadverse_fill(pb, sell, adverse_bid, rho, rng)) fills.push_back({i, Side::Bid, bid[i], FillKind::NonAdverse});
    return fills;
}

std::vector<FillEvent> naive_step(int i, bool pb, bool pa, bool buy, bool sell, const std::vector<double>& bid,
                                  const std::vector<double>& ask, double rho, std::mt19937_64& engine) {
    std::vector<FillEvent> out;
    const bool bid_through = pb && bid[i + 1] < bid[i];
    const bool ask_through = pa && ask[i + 1] > ask[i];
    if (bid_through) out.push_back({i, Side::Bid, bid[i], FillKind::Adverse});
    if (ask_through) out.push_back({i, Side::Ask, ask[i], FillKind::Adverse});
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    const double u_ask = unit(engine);
    const double u_bid = unit(engine);
    if (pa && buy && !ask_through && u_ask < rho) out.push_back({i, Side::Ask, ask[i], FillKind::NonAdverse});
    if (pb && sell && !bid_through && u_bid < rho) out.push_back({i, Side::Bid, bid[i], FillKind::NonAdverse});
    return out;
}

} // namespace

TEST_CASE("[fill_engine] naive replay agrees on random 50-step series", "[fill_engine][property]") {
    std::mt19937_64 gen(99);
    std::bernoulli_distribution coin(0.5);
    std::uniform_int_distribution<int> move(-2, 2);
    for (int trial = 0; trial < 200; ++trial) {
        std::vector<double> bid{100.00};
        std::vector<double> ask{100.01};
        for (int i = 0; i < 50; ++i) {
            const double b = bid.back() + move(gen) * 0.01;
            bid.push_back(b);
            ask.push_back(b + 0.01);
        }
        const double rho = trial % 3 == 0 ? 1.0 : 0.2;
        RngStream rng(static_cast<std::uint64_t>(trial));
        RngStream mirror(static_cast<std::uint64_t>(trial));
        FillCounters counters;
        for (int i = 0; i < 50; ++i) {
            const bool pb = coin(gen);
            const bool pa = coin(gen);
            const bool buy = coin(gen);
            const bool sell = coin(gen);
            const auto a = engine_step(i, pb, pa, buy, sell, bid, ask, rho, rng);
            const auto b = naive_step(i, pb, pa, buy, sell, bid, ask, rho, mirror.engine());
            REQUIRE(a == b);
            counters = accumulate(counters, a);
            REQUIRE(counters.n_plus == counters.afa + counters.nfa);
            REQUIRE(counters.n_minus == counters.afb + counters.nfb);
            // at most one fill per side per step
            int bids = 0;
            int asks = 0;
            for (const auto& f : a) ++(f.side == Side::Bid ? bids : asks);
            REQUIRE(bids <= 1);
            REQUIRE(asks <= 1);
        }
    }
}
