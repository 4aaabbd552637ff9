#include "mmfill/cli.hpp"

#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>
#include <fmt/format.h>

#include "mmfill/basic_poster.hpp"
#include "mmfill/dpe_solver.hpp"
#include "mmfill/market_data.hpp"
#include "mmfill/params.hpp"
#include "mmfill/reporting.hpp"
#include "mmfill/strategy_sim.hpp"

namespace mmfill {

namespace {

namespace fs = std::filesystem;

struct Options {
    std::string config = "default";
    std::uint64_t seed = 42;
    std::string mode = "improved";
    std::string out = "out";

    // solve
    std::optional<double> rho;

    // simulate
    std::string policy;
    std::string data;
    int windows = 330;
    int snapshots = 1;
    unsigned threads = 0;

    // basic-post / example1
    int steps = 1000;
    double walk_p = 0.25;
    std::string contract = "CL";
    std::optional<int> offset;
    double tick = 0.01;
    std::string date = "synthetic";

    // report
    std::string in;
    int bins = 20;
};

std::string read_file(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCode::IoError, fmt::format("cannot open '{}'", path.string()));
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::ifstream open_input(const fs::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw Error(ErrorCode::IoError, fmt::format("cannot open '{}'", path.string()));
    return in;
}

fs::path prepare_out(const std::string& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw Error(ErrorCode::IoError, fmt::format("cannot create '{}': {}", dir, ec.message()));
    return fs::path(dir);
}

template <typename Writer>
void write_file(const fs::path& path, Writer writer) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error(ErrorCode::IoError, fmt::format("cannot write '{}'", path.string()));
    writer(out);
    out.flush();
    if (!out) throw Error(ErrorCode::IoError, fmt::format("write to '{}' failed", path.string()));
}

Config load_config_option(const std::string& config) {
    if (config == "default") return Config{default_params(), default_grid()};
    return load_config(read_file(config));
}

EnvMode parse_mode(const std::string& mode, const MarketParams& params) {
    if (mode == "benchmark") return EnvMode::benchmark();
    if (mode == "improved") return EnvMode::improved(params.rho);
    throw Error(ErrorCode::ValidationError, fmt::format("unknown mode '{}'", mode));
}

PriceSeries load_series(const std::string& data, double dt) {
    auto in = open_input(data);
    return resample_session(parse_lob_csv(in), dt);
}

void run_solve(const Options& o, std::ostream& log) {
    auto [params, grid] = load_config_option(o.config);
    if (o.rho) params.rho = *o.rho;
    ensure_valid(params, grid);
    const auto surface = solve_dpe(params, grid);
    const auto policy = extract_policy(surface, params);
    const auto dir = prepare_out(o.out);
    write_file(dir / "surface.csv", [&](std::ostream& s) { write_surface_csv(s, surface, policy); });
    write_file(dir / "policy.csv", [&](std::ostream& s) { write_policy_csv(s, policy); });
    log << fmt::format("solved {} x {} x {} nodes (rho = {}) -> {}\n", surface.n_times(), surface.grid().n,
                       surface.n_q(), params.rho, dir.string());
}

void run_simulate(const Options& o, std::ostream& log) {
    if (o.policy.empty()) {
        throw Error(ErrorCode::PolicyShapeMismatch, "simulate needs --policy FILE (write one with `solve`)");
    }
    const auto [params, grid] = load_config_option(o.config);
    const auto mode = parse_mode(o.mode, params);
    auto policy_in = open_input(o.policy);
    const auto policy = read_policy_csv(policy_in);
    const auto session = o.data.empty() ? synthetic_session(params, o.windows, o.seed) : load_series(o.data, params.dt);

    const auto batch = run_batch(policy, session, mode, params, o.seed, o.threads);
    const auto dir = prepare_out(o.out);
    write_file(dir / "batch_wealth.csv", [&](std::ostream& s) { write_batch_wealth_csv(s, batch); });
    write_file(dir / "fills.csv", [&](std::ostream& s) { write_batch_fills_csv(s, batch); });
    const auto n = static_cast<std::size_t>(params.n_dt);
    for (std::size_t k = 0; k < batch.paths.size() && k < static_cast<std::size_t>(std::max(o.snapshots, 0)); ++k) {
        write_file(dir / fmt::format("snapshot_{}.csv", k),
                   [&](std::ostream& s) { write_snapshot(s, batch.paths[k], session.slice(k * n, n + 1)); });
    }
    double mean = 0.0;
    for (double w : batch.terminal_wealths) mean += w;
    mean /= static_cast<double>(batch.n_paths);
    log << fmt::format("{} mode: {} windows, mean terminal wealth {:.6f}\n", to_string(mode.variant), batch.n_paths,
                       mean);
}

void run_basic_post(const Options& o, std::ostream& log) {
    const auto params = default_params();
    const int offset = o.offset ? *o.offset : offset_preset(o.contract).value_or(4);
    SyntheticQuoteConfig quote_config;
    quote_config.walk_p = o.walk_p;
    const auto series = o.data.empty() ? synthetic_quotes(params, o.steps, o.seed, quote_config)
                                       : load_series(o.data, params.dt);
    const auto fill_log = run_basic_posting(series, offset, o.tick, o.seed);
    const auto row = fill_type_table(fill_log);
    const auto dir = prepare_out(o.out);
    write_file(dir / "fills.csv", [&](std::ostream& s) { write_fill_log(s, fill_log.fills); });
    write_file(dir / "summary.csv", [&](std::ostream& s) { write_fill_type_summary(s, o.date, o.contract, row); });
    log << fmt::format("{}: {} fills, {} adverse, {} non-adverse\n", o.contract, row.total, row.adverse,
                       row.non_adverse);
}

void run_example1_cmd(const Options& o, std::ostream& log) {
    const auto fill_log = run_example1(o.steps, o.walk_p, o.seed);
    const auto row = fill_type_table(fill_log);
    const auto dir = prepare_out(o.out);
    write_file(dir / "fills.csv", [&](std::ostream& s) { write_fill_log(s, fill_log.fills); });
    write_file(dir / "summary.csv", [&](std::ostream& s) { write_fill_type_summary(s, o.date, "example1", row); });
    log << fmt::format("example1: {} fills, {} adverse, {} non-adverse\n", row.total, row.adverse, row.non_adverse);
}

void run_report(const Options& o, std::ostream& log) {
    const fs::path in_dir = o.in.empty() ? fs::path(o.out) : fs::path(o.in);
    auto wealth_in = open_input(in_dir / "batch_wealth.csv");
    const auto wealth = read_batch_wealth_csv(wealth_in);
    auto fills_in = open_input(in_dir / "fills.csv");
    const auto totals = read_batch_fills_csv(fills_in);

    const auto histogram = terminal_cash_histogram(wealth, o.bins);
    const auto dir = prepare_out(o.out);
    write_file(dir / "histogram.csv", [&](std::ostream& s) { write_histogram_csv(s, histogram); });
    write_file(dir / "summary.csv", [&](std::ostream& s) { write_summary_csv(s, summarize_fills(totals)); });
    log << fmt::format("report: {} paths, AFA {} NFA {} AFB {} NFB {}\n", wealth.size(), totals.afa, totals.nfa,
                       totals.afb, totals.nfb);
}

} // namespace

int cli_main(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    Options o;
    CLI::App app{"Market-making posting solver and fill-realism backtester", "mmfill"};
    app.require_subcommand(1);

    auto common = [&](CLI::App* sub) {
        sub->add_option("--config", o.config, "parameter file, or 'default'");
        sub->add_option("--seed", o.seed, "master random seed");
        sub->add_option("--out", o.out, "output directory");
    };

    auto* solve = app.add_subcommand("solve", "solve the value function and write surface.csv, policy.csv");
    common(solve);
    solve->add_option("--rho", o.rho, "override the non-adverse fill probability");

    auto* simulate = app.add_subcommand("simulate", "backtest a policy over a session");
    common(simulate);
    simulate->add_option("--policy", o.policy, "policy.csv written by solve");
    simulate->add_option("--mode", o.mode, "benchmark | improved");
    simulate->add_option("--data", o.data, "LOB CSV; synthetic session when omitted");
    simulate->add_option("--windows", o.windows, "synthetic session length in windows");
    simulate->add_option("--snapshots", o.snapshots, "number of snapshot_<i>.csv files");
    simulate->add_option("--threads", o.threads, "worker threads (0 = all cores)");

    auto* basic = app.add_subcommand("basic-post", "static-offset posting ladder with queue fills");
    common(basic);
    basic->add_option("--data", o.data, "LOB CSV; synthetic random walk when omitted");
    basic->add_option("--steps", o.steps, "synthetic walk length");
    basic->add_option("--walk-p", o.walk_p, "synthetic one-tick move probability per direction");
    basic->add_option("--contract", o.contract, "contract label; ES, CL, NQ, ZN select offset presets");
    basic->add_option("--offset", o.offset, "ticks between the posted bid and ask");
    basic->add_option("--tick", o.tick, "tick size");
    basic->add_option("--date", o.date, "date label for summary.csv");

    auto* example1 = app.add_subcommand("example1", "always-posted market maker on a random walk");
    common(example1);
    example1->add_option("--steps", o.steps, "number of market orders");
    example1->add_option("--walk-p", o.walk_p, "one-tick move probability per direction");

    auto* report = app.add_subcommand("report", "histogram and fill summary from simulate outputs");
    common(report);
    report->add_option("--in", o.in, "directory holding simulate outputs (defaults to --out)");
    report->add_option("--bins", o.bins, "histogram bins");

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return 0;
    } catch (const CLI::ParseError& e) {
        err << "ValidationError: " << e.what() << '\n';
        return 1;
    }

    try {
        if (solve->parsed()) run_solve(o, out);
        if (simulate->parsed()) run_simulate(o, out);
        if (basic->parsed()) run_basic_post(o, out);
        if (example1->parsed()) run_example1_cmd(o, out);
        if (report->parsed()) run_report(o, out);
    } catch (const Error& e) {
        err << e.what() << '\n';
        return e.code() == ErrorCode::IoError ? 2 : 1;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return 1;
    }
    return 0;
}

} // namespace mmfill
