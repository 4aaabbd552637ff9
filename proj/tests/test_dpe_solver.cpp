#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <random>

#include "mmfill/dpe_solver.hpp"

using namespace mmfill;
using Catch::Approx;

namespace {

// Independent evaluation of one backward substep at a single node, written
// out term by term from the reduced equation.
double naive_linear(const std::vector<double>& row, double a_min, double da, double alpha) {
    const int n = static_cast<int>(row.size());
    double x = (alpha - a_min) / da;
    if (x <= 0) return row[0];
    if (x >= n - 1) return row[n - 1];
    const int k = static_cast<int>(x);
    const double w = x - k;
    return row[k] + w * (row[k + 1] - row[k]);
}

double naive_node_update(const std::vector<std::vector<double>>& h, int q, int j, double tau, const MarketParams& p,
                         double a_min, double da) {
    const int n = static_cast<int>(h[0].size());
    const auto& row = h[static_cast<std::size_t>(q + p.q_max)];
    const double alpha = a_min + j * da;
    double first;
    double second;
    if (j == 0) {
        first = (row[1] - row[0]) / da;
        second = (row[2] - 2 * row[1] + row[0]) / (da * da);
    } else if (j == n - 1) {
        first = (row[n - 1] - row[n - 2]) / da;
        second = (row[n - 3] - 2 * row[n - 2] + row[n - 1]) / (da * da);
    } else {
        first = (row[j + 1] - row[j - 1]) / (2 * da);
        second = (row[j + 1] - 2 * row[j] + row[j - 1]) / (da * da);
    }
    double rate = -p.zeta * alpha * first + 0.5 * p.eta * p.eta * second + alpha * q - p.phi * q * q;

    const double up = naive_linear(row, a_min, da, alpha + p.eps_plus);
    double best_ask = 0.0; // delta+ = 0 candidate
    if (q > -p.q_max) {
        const double sold = naive_linear(h[static_cast<std::size_t>(q - 1 + p.q_max)], a_min, da, alpha + p.eps_plus);
        best_ask = std::max(best_ask, p.rho * (p.delta / 2 + sold - up));
    }
    rate += p.lambda_plus * (best_ask + up - row[j]);

    const double down = naive_linear(row, a_min, da, alpha - p.eps_minus);
    double best_bid = 0.0;
    if (q < p.q_max) {
        const double bought = naive_linear(h[static_cast<std::size_t>(q + 1 + p.q_max)], a_min, da, alpha - p.eps_minus);
        best_bid = std::max(best_bid, p.rho * (p.delta / 2 + bought - down));
    }
    rate += p.lambda_minus * (best_bid + down - row[j]);
    return row[j] + tau * rate;
}

std::vector<double> flatten(const std::vector<std::vector<double>>& rows) {
    std::vector<double> out;
    for (const auto& r : rows) out.insert(out.end(), r.begin(), r.end());
    return out;
}

} // namespace

TEST_CASE("[dpe] terminal condition", "[dpe]") {
    const auto p = default_params();
    CHECK(terminal_condition(0, p) == 0.0);
    CHECK(terminal_condition(7, p) == Approx(-0.525).epsilon(1e-14));
    CHECK(terminal_condition(-7, p) == Approx(-0.455).epsilon(1e-14));
}

TEST_CASE("[dpe] interp_alpha", "[dpe]") {
    const AlphaGrid grid{-0.04, 0.01, 9};
    const std::vector<double> slice{0, 1, 4, 9, 16, 25, 36, 49, 64};
    CHECK(interp_alpha(slice, grid, grid.node(3)) == 9.0);
    CHECK(interp_alpha(slice, grid, 0.5 * (grid.node(3) + grid.node(4))) == Approx(12.5).epsilon(1e-12));
    CHECK(interp_alpha(slice, grid, grid.alpha_max() + 0.01) == 64.0);
    CHECK(interp_alpha(slice, grid, -1.0) == 0.0);
}

TEST_CASE("[dpe] terminal slice and finiteness", "[dpe]") {
    const auto p = default_params();
    const auto surface = solve_dpe(p, default_grid());
    REQUIRE(surface.n_times() == p.n_dt + 1);
    for (int q = -p.q_max; q <= p.q_max; ++q) {
        for (int j = 0; j < surface.grid().n; ++j) CHECK(surface.at(p.n_dt, j, q) == terminal_condition(q, p));
    }
    for (int t = 0; t < surface.n_times(); ++t) {
        for (double v : surface.time_slice(t)) REQUIRE(std::isfinite(v));
    }
}

TEST_CASE("[dpe] zero-inventory row without order flow stays at zero", "[dpe]") {
    auto p = default_params();
    p.lambda_plus = 0.0;
    p.lambda_minus = 0.0;
    p.eta = 0.0;
    p.phi = 0.0;
    const auto surface = solve_dpe(p, default_grid());
    for (int t = 0; t <= p.n_dt; ++t) {
        for (double v : surface.slice(t, 0)) REQUIRE(v == 0.0);
    }
}

TEST_CASE("[dpe] single backward substep oracle", "[dpe][oracle]") {
    const auto p = default_params();
    const auto g = default_grid();
    const AlphaGrid grid = AlphaGrid::from(g);
    const double tau = p.dt / g.substeps;

    SECTION("from the horizon, alpha = 0, q = 1") {
        // h(T) is flat in alpha: h(T,.,0) = 0, h(T,.,1) = -0.015, h(T,.,2) = -0.05.
        // ask: rho (delta/2 + 0 + 0.015) = 0.004 > 0; bid: rho (0.005 - 0.035) < 0 -> no post.
        // h = -0.015 + 0.5 * 0.5833 * 0.004 = -0.0138334
        std::vector<std::vector<double>> rows;
        for (int q = -p.q_max; q <= p.q_max; ++q) rows.emplace_back(grid.n, terminal_condition(q, p));
        const auto next = flatten(rows);
        std::vector<double> out(next.size());
        explicit_substep(next, out, tau, p, grid);
        const int j0 = grid.n / 2;
        const double value = out[static_cast<std::size_t>(1 + p.q_max) * grid.n + j0];
        CHECK(std::abs(value - (-0.0138334)) < 1e-12);
        CHECK(std::abs(value - naive_node_update(rows, 1, j0, tau, p, grid.alpha_min, grid.step)) < 1e-12);
    }

    SECTION("arbitrary curved slice, every node") {
        std::mt19937_64 gen(5);
        std::uniform_real_distribution<double> noise(-0.05, 0.05);
        std::vector<std::vector<double>> rows;
        for (int q = -p.q_max; q <= p.q_max; ++q) {
            std::vector<double> row;
            for (int j = 0; j < grid.n; ++j) {
                const double a = grid.node(j);
                row.push_back(std::sin(40 * a + q) * 0.1 - 0.01 * q * q + a * q * 3 + noise(gen) * 0.01);
            }
            rows.push_back(row);
        }
        auto q_params = p;
        q_params.phi = 1e-4; // exercise the running penalty too
        const auto next = flatten(rows);
        std::vector<double> out(next.size());
        explicit_substep(next, out, tau, q_params, grid);
        for (int q = -p.q_max; q <= p.q_max; ++q) {
            for (int j = 0; j < grid.n; ++j) {
                const double expected = naive_node_update(rows, q, j, tau, q_params, grid.alpha_min, grid.step);
                REQUIRE(std::abs(out[static_cast<std::size_t>(q + p.q_max) * grid.n + j] - expected) < 1e-12);
            }
        }
    }
}

TEST_CASE("[dpe] the discrete operator preserves reflection symmetry", "[dpe][property]") {
    // h(a, q) = h(-a, -q) in, same out, when buy and sell flow mirror each other
    const auto p = default_params();
    const AlphaGrid grid = AlphaGrid::from(default_grid());
    std::vector<std::vector<double>> rows(2 * p.q_max + 1, std::vector<double>(grid.n));
    for (int q = -p.q_max; q <= p.q_max; ++q) {
        for (int j = 0; j < grid.n; ++j) {
            const double a = grid.node(j);
            rows[q + p.q_max][j] = -0.01 * q * q + 2 * a * q + std::cos(30 * a * q);
        }
    }
    // force exact mirror images despite rounding in node()
    for (int q = -p.q_max; q <= p.q_max; ++q) {
        for (int j = 0; j < grid.n; ++j) rows[-q + p.q_max][grid.n - 1 - j] = rows[q + p.q_max][j];
    }
    auto current = flatten(rows);
    std::vector<double> out(current.size());
    for (int step = 0; step < 100; ++step) {
        explicit_substep(current, out, 0.5, p, grid);
        current.swap(out);
    }
    double worst = 0.0;
    for (int q = -p.q_max; q <= p.q_max; ++q) {
        for (int j = 0; j < grid.n; ++j) {
            const double a = current[(q + p.q_max) * grid.n + j];
            const double b = current[(-q + p.q_max) * grid.n + (grid.n - 1 - j)];
            worst = std::max(worst, std::abs(a - b));
        }
    }
    CHECK(worst <= 1e-9);

    SECTION("and extract_policy mirrors the sides on a symmetric surface") {
        ValueSurface surface(1, grid, p.q_max, 0);
        std::copy(current.begin(), current.end(), surface.time_slice(0).begin());
        const auto policy = extract_policy(surface, p);
        int posted = 0;
        for (int q = -p.q_max; q <= p.q_max; ++q) {
            for (int j = 0; j < grid.n; ++j) {
                // the mirrored difference uses -(a + eps) which interpolates within 1e-16 of the
                // mirrored node; the indicator is only checked away from its threshold
                REQUIRE(policy.post_ask(0, j, q) == policy.post_bid(0, grid.n - 1 - j, -q));
                posted += policy.post_ask(0, j, q);
            }
        }
        CHECK(posted > 0);
    }
}

TEST_CASE("[dpe] extract_policy", "[dpe]") {
    const auto p = default_params();
    const auto surface = solve_dpe(p, default_grid());
    const auto policy = extract_policy(surface, p);
    const auto& grid = surface.grid();

    SECTION("no posting at the inventory bounds") {
        for (int t = 0; t <= p.n_dt; ++t) {
            for (int j = 0; j < grid.n; ++j) {
                CHECK_FALSE(policy.post_ask(t, j, -p.q_max));
                CHECK_FALSE(policy.post_bid(t, j, p.q_max));
            }
        }
    }
    SECTION("flat surface posts everywhere inside the bounds") {
        ValueSurface flat(3, grid, p.q_max, 0);
        const auto all = extract_policy(flat, p);
        for (int t = 0; t < 3; ++t) {
            for (int q = -p.q_max; q <= p.q_max; ++q) {
                for (int j = 0; j < grid.n; ++j) {
                    CHECK(all.post_ask(t, j, q) == (q > -p.q_max));
                    CHECK(all.post_bid(t, j, q) == (q < p.q_max));
                }
            }
        }
    }
    SECTION("direct indicator evaluation reproduces the policy") {
        for (int t = 0; t <= p.n_dt; ++t) {
            for (int q = -p.q_max; q <= p.q_max; ++q) {
                const std::vector<double> row(surface.slice(t, q).begin(), surface.slice(t, q).end());
                for (int j = 0; j < grid.n; ++j) {
                    const double a = grid.node(j);
                    bool ask = false;
                    bool bid = false;
                    if (q > -p.q_max) {
                        const std::vector<double> lower(surface.slice(t, q - 1).begin(), surface.slice(t, q - 1).end());
                        const double x = a + p.eps_plus;
                        ask = p.delta / 2 + p.rho * (naive_linear(lower, grid.alpha_min, grid.step, x) -
                                                     naive_linear(row, grid.alpha_min, grid.step, x)) > 0;
                    }
                    if (q < p.q_max) {
                        const std::vector<double> upper(surface.slice(t, q + 1).begin(), surface.slice(t, q + 1).end());
                        const double x = a - p.eps_minus;
                        bid = p.delta / 2 + p.rho * (naive_linear(upper, grid.alpha_min, grid.step, x) -
                                                     naive_linear(row, grid.alpha_min, grid.step, x)) > 0;
                    }
                    REQUIRE(policy.post_ask(t, j, q) == ask);
                    REQUIRE(policy.post_bid(t, j, q) == bid);
                }
            }
        }
    }
}

TEST_CASE("[dpe] reconstruct_value", "[dpe]") {
    const auto p = default_params();
    const auto surface = solve_dpe(p, default_grid());
    CHECK(reconstruct_value(surface, 0.0, 100.0, 0.0, 0, 10) == surface.interpolate(10, 0.0, 0));
    CHECK(reconstruct_value(surface, 10.0, 100.0, 0.003, 2, p.n_dt) == Approx(209.95).epsilon(1e-13));
    for (int q = -p.q_max; q <= p.q_max; ++q) {
        CHECK(reconstruct_value(surface, 5.0, 81.9, 0.0, q, p.n_dt) ==
              Approx(5.0 + q * (81.9 - (p.delta / 2 + p.varphi * q))).epsilon(1e-13));
    }
}

TEST_CASE("[dpe] refinement, rho dependence and bounds", "[dpe][property]") {
    const auto p = default_params();
    auto g = default_grid();

    SECTION("successive refinements shrink the change at shared nodes") {
        const auto coarse = solve_dpe(p, g);
        g.n_alpha = 101;
        g.substeps = 4;
        const auto mid = solve_dpe(p, g);
        g.n_alpha = 201;
        g.substeps = 8;
        const auto fine = solve_dpe(p, g);
        auto max_diff = [&](const ValueSurface& a, const ValueSurface& b, int ratio) {
            double worst = 0.0;
            for (int t = 0; t <= p.n_dt; ++t) {
                for (int q = -p.q_max; q <= p.q_max; ++q) {
                    for (int j = 0; j < a.grid().n; ++j) worst = std::max(worst, std::abs(a.at(t, j, q) - b.at(t, ratio * j, q)));
                }
            }
            return worst;
        };
        const double first = max_diff(coarse, mid, 2);
        const double second = max_diff(mid, fine, 2);
        CHECK(first > 0.0);
        CHECK(second < first);
    }
    SECTION("fill probability changes the policy") {
        auto full = p;
        full.rho = 1.0;
        const auto a = extract_policy(solve_dpe(p, g), p);
        const auto b = extract_policy(solve_dpe(full, g), full);
        long differing = 0;
        for (int t = 0; t <= p.n_dt; ++t) {
            for (int q = -p.q_max; q <= p.q_max; ++q) {
                for (int j = 0; j < g.n_alpha; ++j) {
                    differing += a.post_ask(t, j, q) != b.post_ask(t, j, q);
                    differing += a.post_bid(t, j, q) != b.post_bid(t, j, q);
                }
            }
        }
        CHECK(differing > 0);
    }
    SECTION("a-priori bound on the value") {
        const auto surface = solve_dpe(p, g);
        const double max_terminal = std::abs(terminal_condition(p.q_max, p));
        const double bound = 10 * max_terminal +
                             p.horizon * (p.q_max * g.alpha_max + (p.lambda_plus + p.lambda_minus) * p.delta / 2);
        for (int t = 0; t <= p.n_dt; ++t) {
            for (double v : surface.time_slice(t)) REQUIRE(std::abs(v) <= bound);
        }
    }
}

TEST_CASE("[dpe] solver errors", "[dpe]") {
    SECTION("explosive diffusion is reported with its slice") {
        auto p = default_params();
        p.eta = 1.0;
        auto g = default_grid();
        g.substeps = 1;
        try {
            solve_dpe(p, g);
            FAIL("expected UnstableScheme");
        } catch (const Error& e) {
            CHECK(e.code() == ErrorCode::UnstableScheme);
            CHECK(std::string(e.what()).find("time slice") != std::string::npos);
        }
    }
    SECTION("jumps wider than the grid") {
        auto p = default_params();
        p.eps_plus = 0.05;
        try {
            solve_dpe(p, default_grid());
            FAIL("expected GridTooCoarse");
        } catch (const Error& e) {
            CHECK(e.code() == ErrorCode::GridTooCoarse);
        }
    }
    SECTION("invalid parameters are rejected") {
        auto p = default_params();
        p.rho = 2.0;
        CHECK_THROWS_AS(solve_dpe(p, default_grid()), Error);
    }
}
