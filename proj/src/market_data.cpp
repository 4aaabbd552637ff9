#include "mmfill/market_data.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <istream>
#include <ostream>

#include <fmt/format.h>

#include "mmfill/rng.hpp"

namespace mmfill {

namespace {

constexpr std::size_t kColumns = 1 + 4 * kBookLevels + 2;

std::vector<std::string_view> split(std::string_view line) {
    std::vector<std::string_view> out;
    std::size_t pos = 0;
    while (true) {
        auto comma = line.find(',', pos);
        out.push_back(line.substr(pos, comma == std::string_view::npos ? std::string_view::npos : comma - pos));
        if (comma == std::string_view::npos) break;
        pos = comma + 1;
    }
    return out;
}

template <typename T>
std::optional<T> parse_field(std::string_view text, std::size_t line, std::string_view column) {
    if (text.empty()) return std::nullopt;
    T value{};
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc{} || ptr != text.data() + text.size()) {
        throw RowError(ErrorCode::MalformedRow, line, fmt::format("bad value '{}' in column {}", text, column));
    }
    return value;
}

template <typename T>
std::string format_optional(const std::optional<T>& v) {
    return v ? fmt::format("{}", *v) : std::string{};
}

} // namespace

PriceSeries PriceSeries::slice(std::size_t first, std::size_t count) const {
    PriceSeries out;
    out.dt = dt;
    out.t0 = t0 + static_cast<std::int64_t>(std::llround(static_cast<double>(first) * dt * kNanosPerSecond));
    auto take = [&](const auto& v) {
        return std::vector(v.begin() + static_cast<std::ptrdiff_t>(first),
                           v.begin() + static_cast<std::ptrdiff_t>(first + count));
    };
    out.bid = take(bid);
    out.ask = take(ask);
    out.level1_bid_sz = take(level1_bid_sz);
    out.level1_ask_sz = take(level1_ask_sz);
    return out;
}

std::string lob_csv_header() {
    std::string header = "ts";
    for (int level = 1; level <= kBookLevels; ++level) header += fmt::format(",bid_px_{0},bid_sz_{0}", level);
    for (int level = 1; level <= kBookLevels; ++level) header += fmt::format(",ask_px_{0},ask_sz_{0}", level);
    header += ",trade_px,trade_sz";
    return header;
}

std::vector<LOBRecord> parse_lob_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line)) throw Error(ErrorCode::SchemaMismatch, "missing header row");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    const auto expected = lob_csv_header();
    if (line != expected) {
        const auto got = split(line);
        const auto want = split(expected);
        for (const auto& column : want) {
            if (std::find(got.begin(), got.end(), column) == got.end()) {
                throw Error(ErrorCode::SchemaMismatch, fmt::format("header lacks column '{}'", column));
            }
        }
        throw Error(ErrorCode::SchemaMismatch, "header columns out of order or unexpected extra columns");
    }
    const auto columns = split(expected);

    std::vector<LOBRecord> records;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        const auto fields = split(line);
        if (fields.size() != kColumns) {
            throw RowError(ErrorCode::MalformedRow, line_no,
                           fmt::format("expected {} fields, found {}", kColumns, fields.size()));
        }

        LOBRecord r;
        auto ts = parse_field<std::int64_t>(fields[0], line_no, columns[0]);
        if (!ts) throw RowError(ErrorCode::MalformedRow, line_no, "empty timestamp");
        r.ts = *ts;
        std::size_t col = 1;
        for (int level = 0; level < kBookLevels; ++level, col += 2) {
            r.bid_px[level] = parse_field<double>(fields[col], line_no, columns[col]);
            r.bid_sz[level] = parse_field<std::int64_t>(fields[col + 1], line_no, columns[col + 1]);
        }
        for (int level = 0; level < kBookLevels; ++level, col += 2) {
            r.ask_px[level] = parse_field<double>(fields[col], line_no, columns[col]);
            r.ask_sz[level] = parse_field<std::int64_t>(fields[col + 1], line_no, columns[col + 1]);
        }
        r.trade_px = parse_field<double>(fields[col], line_no, columns[col]);
        r.trade_sz = parse_field<std::int64_t>(fields[col + 1], line_no, columns[col + 1]);

        auto negative = [](const auto& sz) { return sz && *sz < 0; };
        if (std::any_of(r.bid_sz.begin(), r.bid_sz.end(), negative) ||
            std::any_of(r.ask_sz.begin(), r.ask_sz.end(), negative) || negative(r.trade_sz)) {
            throw RowError(ErrorCode::MalformedRow, line_no, "negative size");
        }
        if (r.has_top_of_book() && !(*r.bid_px[0] < *r.ask_px[0])) {
            throw RowError(ErrorCode::MalformedRow, line_no,
                           fmt::format("crossed book: bid {} >= ask {}", *r.bid_px[0], *r.ask_px[0]));
        }
        if (!records.empty() && r.ts < records.back().ts) {
            throw RowError(ErrorCode::NonMonotoneTimestamp, line_no,
                           fmt::format("timestamp {} precedes {}", r.ts, records.back().ts));
        }
        records.push_back(r);
    }
    return records;
}

void write_lob_csv(std::ostream& out, const std::vector<LOBRecord>& records) {
    out << lob_csv_header() << '\n';
    for (const auto& r : records) {
        std::string row = fmt::format("{}", r.ts);
        for (int level = 0; level < kBookLevels; ++level) {
            row += fmt::format(",{},{}", format_optional(r.bid_px[level]), format_optional(r.bid_sz[level]));
        }
        for (int level = 0; level < kBookLevels; ++level) {
            row += fmt::format(",{},{}", format_optional(r.ask_px[level]), format_optional(r.ask_sz[level]));
        }
        row += fmt::format(",{},{}", format_optional(r.trade_px), format_optional(r.trade_sz));
        out << row << '\n';
    }
}

PriceSeries resample_forward_fill(const std::vector<LOBRecord>& records, double dt_seconds, std::int64_t start,
                                  std::int64_t end) {
    std::vector<const LOBRecord*> quotes;
    for (const auto& r : records) {
        if (r.has_top_of_book()) quotes.push_back(&r);
    }
    if (quotes.empty()) throw Error(ErrorCode::EmptyInput, "no records carry a level-1 bid and ask");
    if (end < start) throw Error(ErrorCode::EmptyInput, fmt::format("end {} precedes start {}", end, start));
    if (quotes.front()->ts > start) {
        throw Error(ErrorCode::NoDataBeforeStart,
                    fmt::format("first quote at {} is after the first boundary {}", quotes.front()->ts, start));
    }

    const auto step = static_cast<std::int64_t>(std::llround(dt_seconds * kNanosPerSecond));
    PriceSeries series;
    series.t0 = start;
    series.dt = dt_seconds;
    std::size_t cursor = 0;
    for (std::int64_t boundary = start; boundary <= end; boundary += step) {
        while (cursor + 1 < quotes.size() && quotes[cursor + 1]->ts <= boundary) ++cursor;
        const LOBRecord& r = *quotes[cursor];
        series.bid.push_back(*r.bid_px[0]);
        series.ask.push_back(*r.ask_px[0]);
        series.level1_bid_sz.push_back(r.bid_sz[0].value_or(0));
        series.level1_ask_sz.push_back(r.ask_sz[0].value_or(0));
    }
    return series;
}

PriceSeries resample_session(const std::vector<LOBRecord>& records, double dt_seconds) {
    auto first = std::find_if(records.begin(), records.end(), [](const auto& r) { return r.has_top_of_book(); });
    if (first == records.end()) throw Error(ErrorCode::EmptyInput, "no records carry a level-1 bid and ask");
    const auto step = static_cast<std::int64_t>(std::llround(dt_seconds * kNanosPerSecond));
    std::int64_t start = first->ts - first->ts % step;
    if (start < first->ts) start += step;
    return resample_forward_fill(records, dt_seconds, start, records.back().ts);
}

TradeStats trade_size_stats(const std::vector<LOBRecord>& records) {
    std::vector<double> sizes;
    for (const auto& r : records) {
        if (r.trade_sz) sizes.push_back(static_cast<double>(*r.trade_sz));
    }
    if (sizes.empty()) throw Error(ErrorCode::NoTrades, "no record carries a trade size");

    TradeStats stats;
    stats.count = sizes.size();
    double total = 0.0;
    for (double s : sizes) total += s;
    stats.mean_size = total / static_cast<double>(sizes.size());
    std::sort(sizes.begin(), sizes.end());
    const std::size_t mid = sizes.size() / 2;
    stats.median_size = sizes.size() % 2 == 1 ? sizes[mid] : 0.5 * (sizes[mid - 1] + sizes[mid]);
    return stats;
}

PriceSeries synthetic_quotes(const MarketParams& params, int n_steps, std::uint64_t seed,
                             const SyntheticQuoteConfig& config) {
    RngStream rng(seed);
    PriceSeries series;
    series.dt = params.dt;
    auto ticks = std::llround(config.start_bid / params.tick);
    const double spread_ticks = params.delta / params.tick;
    const bool whole_spread = std::abs(spread_ticks - std::round(spread_ticks)) < 1e-9;
    auto push = [&] {
        const double bid = tick_price(ticks, params.tick);
        series.bid.push_back(bid);
        series.ask.push_back(whole_spread ? tick_price(ticks + std::llround(spread_ticks), params.tick)
                                          : bid + params.delta);
        series.level1_bid_sz.push_back(config.level1_size);
        series.level1_ask_sz.push_back(config.level1_size);
    };
    push();
    for (int i = 0; i < n_steps; ++i) {
        const double u = rng.uniform();
        if (u < config.walk_p) {
            ++ticks;
        } else if (u < 2.0 * config.walk_p) {
            --ticks;
        }
        push();
    }
    return series;
}

PriceSeries to_price_series(const SyntheticPath& path, double dt, std::int64_t level1_size) {
    PriceSeries series;
    series.dt = dt;
    series.bid = path.bid;
    series.ask = path.ask;
    series.level1_bid_sz.assign(path.bid.size(), level1_size);
    series.level1_ask_sz.assign(path.ask.size(), level1_size);
    return series;
}

PriceSeries synthetic_session(const MarketParams& params, int n_windows, std::uint64_t seed) {
    // stream id kept clear of the per-window ids used by the simulator
    RngStream rng(seed, ~std::uint64_t{0});
    return to_price_series(simulate_synthetic_path(params, n_windows * params.n_dt, rng), params.dt);
}

} // namespace mmfill
