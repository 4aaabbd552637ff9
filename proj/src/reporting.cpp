#include "mmfill/reporting.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <istream>
#include <map>
#include <ostream>
#include <sstream>

#include <fmt/format.h>

namespace mmfill {

namespace {

std::vector<std::string> split_row(const std::string& line) {
    std::vector<std::string> out;
    std::stringstream ss(line);
    std::string field;
    while (std::getline(ss, field, ',')) out.push_back(field);
    if (!line.empty() && line.back() == ',') out.emplace_back();
    return out;
}

template <typename T>
T parse_cell(const std::string& text, ErrorCode code, std::size_t line) {
    T value{};
    auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (ec != std::errc{} || ptr != text.data() + text.size()) {
        throw RowError(code, line, fmt::format("bad value '{}'", text));
    }
    return value;
}

/// Reads a CSV with an exact header, handing each split row to `on_row`.
template <typename OnRow>
void read_csv(std::istream& in, const std::string& header, ErrorCode code, OnRow on_row) {
    std::string line;
    if (!std::getline(in, line) || line != header) {
        throw Error(code, fmt::format("expected header '{}'", header));
    }
    const auto width = split_row(header).size();
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) continue;
        auto fields = split_row(line);
        if (fields.size() != width) {
            throw RowError(code, line_no, fmt::format("expected {} fields, found {}", width, fields.size()));
        }
        on_row(fields, line_no);
    }
}

} // namespace

Histogram terminal_cash_histogram(const std::vector<double>& values, int n_bins) {
    if (values.empty()) throw Error(ErrorCode::EmptyValues, "histogram of no values");
    if (n_bins < 1) throw Error(ErrorCode::ValidationError, "histogram needs at least one bin");

    const auto [lo_it, hi_it] = std::minmax_element(values.begin(), values.end());
    const double lo = *lo_it;
    double hi = *hi_it;
    if (hi == lo) hi = lo + 1.0;
    const double width = (hi - lo) / n_bins;

    Histogram h;
    for (int b = 0; b <= n_bins; ++b) h.bin_edges.push_back(b == n_bins ? hi : lo + width * b);
    h.counts.assign(static_cast<std::size_t>(n_bins), 0);
    for (double v : values) {
        auto bin = static_cast<long>(std::floor((v - lo) / width));
        bin = std::clamp<long>(bin, 0, n_bins - 1);
        ++h.counts[static_cast<std::size_t>(bin)];
    }
    return h;
}

std::vector<std::pair<std::string, long>> summarize_fills(const FillCounters& t) {
    return {{"AFA", t.afa}, {"NFA", t.nfa}, {"AFB", t.afb}, {"NFB", t.nfb}};
}

std::vector<std::pair<std::string, long>> summarize_fills(const BatchResult& batch) {
    return summarize_fills(batch.fill_totals);
}

void write_surface_csv(std::ostream& out, const ValueSurface& surface, const PostingPolicy& policy) {
    out << "t_index,alpha,q,h,post_bid,post_ask\n";
    const auto& grid = surface.grid();
    for (int t = 0; t < surface.n_times(); ++t) {
        for (int j = 0; j < grid.n; ++j) {
            for (int q = -surface.q_max(); q <= surface.q_max(); ++q) {
                out << fmt::format("{},{},{},{},{},{}\n", t, grid.node(j), q, surface.at(t, j, q),
                                   policy.post_bid(t, j, q) ? 1 : 0, policy.post_ask(t, j, q) ? 1 : 0);
            }
        }
    }
}

void write_policy_csv(std::ostream& out, const PostingPolicy& policy) {
    out << "t_index,alpha,q,post_bid,post_ask\n";
    const auto& grid = policy.grid();
    for (int t = 0; t < policy.n_times(); ++t) {
        for (int j = 0; j < grid.n; ++j) {
            for (int q = -policy.q_max(); q <= policy.q_max(); ++q) {
                out << fmt::format("{},{},{},{},{}\n", t, grid.node(j), q, policy.post_bid(t, j, q) ? 1 : 0,
                                   policy.post_ask(t, j, q) ? 1 : 0);
            }
        }
    }
}

PostingPolicy read_policy_csv(std::istream& in) {
    struct Row {
        int t;
        double alpha;
        int q;
        bool bid;
        bool ask;
    };
    std::vector<Row> rows;
    read_csv(in, "t_index,alpha,q,post_bid,post_ask", ErrorCode::PolicyShapeMismatch,
             [&](const std::vector<std::string>& f, std::size_t line) {
                 const auto code = ErrorCode::PolicyShapeMismatch;
                 rows.push_back({parse_cell<int>(f[0], code, line), parse_cell<double>(f[1], code, line),
                                 parse_cell<int>(f[2], code, line), parse_cell<int>(f[3], code, line) != 0,
                                 parse_cell<int>(f[4], code, line) != 0});
             });
    if (rows.empty()) throw Error(ErrorCode::PolicyShapeMismatch, "policy file has no rows");

    int max_t = 0;
    int max_q = 0;
    std::vector<double> alphas;
    for (const auto& r : rows) {
        max_t = std::max(max_t, r.t);
        max_q = std::max(max_q, std::abs(r.q));
        alphas.push_back(r.alpha);
    }
    std::sort(alphas.begin(), alphas.end());
    alphas.erase(std::unique(alphas.begin(), alphas.end()), alphas.end());
    if (alphas.size() < 2) throw Error(ErrorCode::PolicyShapeMismatch, "policy needs at least two alpha nodes");

    const AlphaGrid grid{alphas.front(), (alphas.back() - alphas.front()) / static_cast<double>(alphas.size() - 1),
                         static_cast<int>(alphas.size())};
    const std::size_t expected =
        static_cast<std::size_t>(max_t + 1) * alphas.size() * static_cast<std::size_t>(2 * max_q + 1);
    if (rows.size() != expected) {
        throw Error(ErrorCode::PolicyShapeMismatch,
                    fmt::format("policy has {} rows, a full grid needs {}", rows.size(), expected));
    }

    PostingPolicy policy(max_t + 1, grid, max_q);
    std::vector<std::uint8_t> seen(expected, 0);
    for (const auto& r : rows) {
        if (r.t < 0) throw Error(ErrorCode::PolicyShapeMismatch, "negative t_index");
        const int j = grid.nearest(r.alpha);
        if (std::abs(grid.node(j) - r.alpha) > 1e-9 * std::max(1.0, std::abs(grid.step))) {
            throw Error(ErrorCode::PolicyShapeMismatch, fmt::format("alpha {} is not on a uniform grid", r.alpha));
        }
        auto& mark = seen[(static_cast<std::size_t>(r.t) * static_cast<std::size_t>(2 * max_q + 1) +
                           static_cast<std::size_t>(r.q + max_q)) *
                              alphas.size() +
                          static_cast<std::size_t>(j)];
        if (mark) throw Error(ErrorCode::PolicyShapeMismatch, "duplicate policy node");
        mark = 1;
        policy.set_post_bid(r.t, j, r.q, r.bid);
        policy.set_post_ask(r.t, j, r.q, r.ask);
    }
    return policy;
}

void write_batch_wealth_csv(std::ostream& out, const BatchResult& batch) {
    out << "window,terminal_wealth\n";
    for (std::size_t k = 0; k < batch.terminal_wealths.size(); ++k) {
        out << fmt::format("{},{}\n", k, batch.terminal_wealths[k]);
    }
}

std::vector<double> read_batch_wealth_csv(std::istream& in) {
    std::vector<double> values;
    read_csv(in, "window,terminal_wealth", ErrorCode::MalformedRow,
             [&](const std::vector<std::string>& f, std::size_t line) {
                 values.push_back(parse_cell<double>(f[1], ErrorCode::MalformedRow, line));
             });
    return values;
}

void write_batch_fills_csv(std::ostream& out, const BatchResult& batch) {
    out << "window,t_index,side,price,kind\n";
    for (std::size_t k = 0; k < batch.paths.size(); ++k) {
        for (const auto& f : batch.paths[k].fills) {
            out << fmt::format("{},{},{},{},{}\n", k, f.t_index, to_string(f.side), f.price, to_string(f.kind));
        }
    }
}

FillCounters read_batch_fills_csv(std::istream& in) {
    std::vector<FillEvent> fills;
    read_csv(in, "window,t_index,side,price,kind", ErrorCode::MalformedRow,
             [&](const std::vector<std::string>& f, std::size_t line) {
                 FillEvent e;
                 e.t_index = parse_cell<int>(f[1], ErrorCode::MalformedRow, line);
                 if (f[2] == "bid") {
                     e.side = Side::Bid;
                 } else if (f[2] == "ask") {
                     e.side = Side::Ask;
                 } else {
                     throw RowError(ErrorCode::MalformedRow, line, fmt::format("unknown side '{}'", f[2]));
                 }
                 e.price = parse_cell<double>(f[3], ErrorCode::MalformedRow, line);
                 if (f[4] == "adverse") {
                     e.kind = FillKind::Adverse;
                 } else if (f[4] == "non_adverse") {
                     e.kind = FillKind::NonAdverse;
                 } else {
                     throw RowError(ErrorCode::MalformedRow, line, fmt::format("unknown kind '{}'", f[4]));
                 }
                 fills.push_back(e);
             });
    return accumulate({}, fills);
}

void write_histogram_csv(std::ostream& out, const Histogram& histogram) {
    out << "bin_lo,bin_hi,count\n";
    for (std::size_t b = 0; b < histogram.counts.size(); ++b) {
        out << fmt::format("{},{},{}\n", histogram.bin_edges[b], histogram.bin_edges[b + 1], histogram.counts[b]);
    }
}

void write_summary_csv(std::ostream& out, const std::vector<std::pair<std::string, long>>& rows) {
    out << "fill_type,amount\n";
    for (const auto& [name, amount] : rows) out << fmt::format("{},{}\n", name, amount);
}

} // namespace mmfill
