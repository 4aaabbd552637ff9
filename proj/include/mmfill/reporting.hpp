#pragma once

#include <iosfwd>
#include <string>
#include <utility>
#include <vector>

#include "mmfill/dpe_solver.hpp"
#include "mmfill/fill_engine.hpp"
#include "mmfill/strategy_sim.hpp"

namespace mmfill {

struct Histogram {
    std::vector<double> bin_edges;
    std::vector<long> counts;
};

/// Equal-width bins over [min, max]; the maximum lands in the last bin. A
/// zero-width range is widened to one unit.
Histogram terminal_cash_histogram(const std::vector<double>& values, int n_bins);

/// Rows AFA, NFA, AFB, NFB in that order.
std::vector<std::pair<std::string, long>> summarize_fills(const FillCounters& totals);
std::vector<std::pair<std::string, long>> summarize_fills(const BatchResult& batch);

// CSV files exchanged between the subcommands. All have a header row.

/// t_index,alpha,q,h,post_bid,post_ask
void write_surface_csv(std::ostream& out, const ValueSurface& surface, const PostingPolicy& policy);
/// t_index,alpha,q,post_bid,post_ask
void write_policy_csv(std::ostream& out, const PostingPolicy& policy);
/// Rebuilds a policy from write_policy_csv output; the alpha grid is read
/// from the file. Throws PolicyShapeMismatch on incomplete or ragged input.
PostingPolicy read_policy_csv(std::istream& in);

/// window,terminal_wealth
void write_batch_wealth_csv(std::ostream& out, const BatchResult& batch);
std::vector<double> read_batch_wealth_csv(std::istream& in);

/// window,t_index,side,price,kind
void write_batch_fills_csv(std::ostream& out, const BatchResult& batch);
FillCounters read_batch_fills_csv(std::istream& in);

/// bin_lo,bin_hi,count
void write_histogram_csv(std::ostream& out, const Histogram& histogram);
/// fill_type,amount
void write_summary_csv(std::ostream& out, const std::vector<std::pair<std::string, long>>& rows);

} // namespace mmfill
