#pragma once

#include <array>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "mmfill/dynamics.hpp"
#include "mmfill/params.hpp"

namespace mmfill {

inline constexpr int kBookLevels = 5;
inline constexpr std::int64_t kNanosPerSecond = 1'000'000'000;

/// One row of the LOB file: up to five levels per side plus an optional trade.
struct LOBRecord {
    std::int64_t ts = 0; // nanoseconds since epoch
    std::array<std::optional<double>, kBookLevels> bid_px{};
    std::array<std::optional<std::int64_t>, kBookLevels> bid_sz{};
    std::array<std::optional<double>, kBookLevels> ask_px{};
    std::array<std::optional<std::int64_t>, kBookLevels> ask_sz{};
    std::optional<double> trade_px;
    std::optional<std::int64_t> trade_sz;

    bool has_top_of_book() const { return bid_px[0].has_value() && ask_px[0].has_value(); }

    bool operator==(const LOBRecord&) const = default;
};

/// Uniformly spaced best bid/ask samples.
struct PriceSeries {
    std::int64_t t0 = 0; // nanoseconds
    double dt = 1.0;     // seconds
    std::vector<double> bid;
    std::vector<double> ask;
    std::vector<std::int64_t> level1_bid_sz;
    std::vector<std::int64_t> level1_ask_sz;

    std::size_t size() const { return bid.size(); }
    bool empty() const { return bid.empty(); }
    double mid(std::size_t i) const { return 0.5 * (bid[i] + ask[i]); }

    /// Samples [first, first + count).
    PriceSeries slice(std::size_t first, std::size_t count) const;
};

struct TradeStats {
    double mean_size = 0.0;
    double median_size = 0.0;
    std::size_t count = 0;
};

/// The fixed LOB header, comma separated.
std::string lob_csv_header();

/// Throws SchemaMismatch, RowError(MalformedRow) or RowError(NonMonotoneTimestamp).
std::vector<LOBRecord> parse_lob_csv(std::istream& in);
void write_lob_csv(std::ostream& out, const std::vector<LOBRecord>& records);

/// Samples at start, start + dt, ... up to end inclusive; each sample copies the
/// level-1 quote of the last record with ts <= boundary. Records without a
/// level-1 bid and ask (trade prints) do not move the quote.
PriceSeries resample_forward_fill(const std::vector<LOBRecord>& records, double dt_seconds, std::int64_t start,
                                  std::int64_t end);

/// Session-aligned resampling: start at the first whole dt boundary at or
/// after the first quote, end at the last record.
PriceSeries resample_session(const std::vector<LOBRecord>& records, double dt_seconds);

TradeStats trade_size_stats(const std::vector<LOBRecord>& records);

struct SyntheticQuoteConfig {
    double walk_p = 0.25;        // probability of a one-tick move in each direction
    double start_bid = 100.00;
    std::int64_t level1_size = 10;
};

/// Tick random walk for the best bid, ask one spread above. n_steps moves,
/// n_steps + 1 samples.
PriceSeries synthetic_quotes(const MarketParams& params, int n_steps, std::uint64_t seed,
                             const SyntheticQuoteConfig& config = {});

/// Quotes from a dynamics path, level-1 sizes set to a constant.
PriceSeries to_price_series(const SyntheticPath& path, double dt, std::int64_t level1_size = 10);

/// A synthetic session long enough for n_windows strategy windows.
PriceSeries synthetic_session(const MarketParams& params, int n_windows, std::uint64_t seed);

} // namespace mmfill
