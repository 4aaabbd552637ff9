#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "mmfill/params.hpp"

namespace mmfill {

/// Uniform alpha grid shared by the value surface and the posting policy.
struct AlphaGrid {
    double alpha_min = 0.0;
    double step = 0.0;
    int n = 0;

    static AlphaGrid from(const SolverGrid& grid) { return {grid.alpha_min, grid.alpha_step(), grid.n_alpha}; }

    double node(int j) const { return alpha_min + step * j; }
    double alpha_max() const { return node(n - 1); }
    std::vector<double> nodes() const;
    /// Index of the node closest to alpha, clamped to the grid.
    int nearest(double alpha) const;
};

/// Linear interpolation of one alpha slice; alpha outside the grid clamps to
/// the boundary node.
double interp_alpha(std::span<const double> slice, const AlphaGrid& grid, double alpha);

/// h(t, alpha, q) on (n_dt + 1) time slices. Storage is [t][q][alpha] so that
/// each (t, q) row is a contiguous alpha slice.
class ValueSurface {
public:
    ValueSurface() = default;
    ValueSurface(int n_times, AlphaGrid grid, int q_max, std::uint64_t params_fingerprint);

    int n_times() const { return n_times_; }
    int n_dt() const { return n_times_ - 1; }
    int q_max() const { return q_max_; }
    int n_q() const { return 2 * q_max_ + 1; }
    const AlphaGrid& grid() const { return grid_; }
    std::vector<double> alpha_nodes() const { return grid_.nodes(); }
    std::uint64_t params_fingerprint() const { return fingerprint_; }

    double& at(int t, int j, int q) { return values_[offset(t, q) + static_cast<std::size_t>(j)]; }
    double at(int t, int j, int q) const { return values_[offset(t, q) + static_cast<std::size_t>(j)]; }

    std::span<double> slice(int t, int q) { return {values_.data() + offset(t, q), static_cast<std::size_t>(grid_.n)}; }
    std::span<const double> slice(int t, int q) const {
        return {values_.data() + offset(t, q), static_cast<std::size_t>(grid_.n)};
    }
    /// All q rows of one time slice, contiguous.
    std::span<double> time_slice(int t) { return {values_.data() + offset(t, -q_max_), slice_size()}; }
    std::span<const double> time_slice(int t) const { return {values_.data() + offset(t, -q_max_), slice_size()}; }

    double interpolate(int t, double alpha, int q) const { return interp_alpha(slice(t, q), grid_, alpha); }

    std::size_t slice_size() const { return static_cast<std::size_t>(n_q()) * static_cast<std::size_t>(grid_.n); }

private:
    std::size_t offset(int t, int q) const {
        return static_cast<std::size_t>(t) * slice_size() +
               static_cast<std::size_t>(q + q_max_) * static_cast<std::size_t>(grid_.n);
    }

    int n_times_ = 0;
    AlphaGrid grid_;
    int q_max_ = 0;
    std::uint64_t fingerprint_ = 0;
    std::vector<double> values_;
};

/// Boolean posting decisions on the same nodes as a ValueSurface.
class PostingPolicy {
public:
    PostingPolicy() = default;
    PostingPolicy(int n_times, AlphaGrid grid, int q_max);

    int n_times() const { return n_times_; }
    int q_max() const { return q_max_; }
    const AlphaGrid& grid() const { return grid_; }

    bool post_ask(int t, int j, int q) const { return ask_[index(t, j, q)] != 0; }
    bool post_bid(int t, int j, int q) const { return bid_[index(t, j, q)] != 0; }
    void set_post_ask(int t, int j, int q, bool v) { ask_[index(t, j, q)] = v ? 1 : 0; }
    void set_post_bid(int t, int j, int q, bool v) { bid_[index(t, j, q)] = v ? 1 : 0; }

    struct Decision {
        bool post_bid = false;
        bool post_ask = false;
    };
    /// Nearest-node lookup in alpha.
    Decision decide(int t, double alpha, int q) const {
        const int j = grid_.nearest(alpha);
        return {post_bid(t, j, q), post_ask(t, j, q)};
    }

    bool operator==(const PostingPolicy& other) const {
        return n_times_ == other.n_times_ && q_max_ == other.q_max_ && grid_.n == other.grid_.n &&
               grid_.alpha_min == other.grid_.alpha_min && grid_.step == other.grid_.step && ask_ == other.ask_ &&
               bid_ == other.bid_;
    }

private:
    std::size_t index(int t, int j, int q) const {
        return (static_cast<std::size_t>(t) * static_cast<std::size_t>(2 * q_max_ + 1) +
                static_cast<std::size_t>(q + q_max_)) *
                   static_cast<std::size_t>(grid_.n) +
               static_cast<std::size_t>(j);
    }

    int n_times_ = 0;
    AlphaGrid grid_;
    int q_max_ = 0;
    std::vector<std::uint8_t> ask_;
    std::vector<std::uint8_t> bid_;
};

/// Liquidation value at the horizon: -q (delta/2 + varphi q).
double terminal_condition(int q, const MarketParams& params);

/// One explicit Euler substep of length tau backwards in time. `next` holds
/// all q rows of the later slice (layout as ValueSurface::time_slice); the
/// earlier slice is written to `out`.
void explicit_substep(std::span<const double> next, std::span<double> out, double tau, const MarketParams& params,
                      const AlphaGrid& grid);

/// Solves the reduced dynamic programming equation backwards from the horizon.
/// Throws Error(UnstableScheme) on a non-finite value and Error(GridTooCoarse)
/// if a single alpha jump reaches past the grid half-width.
ValueSurface solve_dpe(const MarketParams& params, const SolverGrid& grid);

/// Posting indicator evaluated on a solved surface.
PostingPolicy extract_policy(const ValueSurface& surface, const MarketParams& params);

/// c + q s + h(t, alpha, q).
double reconstruct_value(const ValueSurface& surface, double cash, double price, double alpha, int q, int t_index);

} // namespace mmfill
