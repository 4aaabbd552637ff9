#include "mmfill/params.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <functional>
#include <map>
#include <sstream>

#include <fmt/format.h>

namespace mmfill {

MarketParams default_params() { return MarketParams{}; }

SolverGrid default_grid() { return SolverGrid{}; }

std::vector<ValidationIssue> validate(const MarketParams& p, const SolverGrid& g) {
    std::vector<ValidationIssue> issues;
    auto add = [&](ErrorCode code, std::string msg) { issues.push_back({code, std::move(msg)}); };

    const std::pair<const char*, double> non_negative[] = {
        {"sigma", p.sigma},       {"zeta", p.zeta},
        {"eta", p.eta},           {"eps_plus", p.eps_plus},
        {"eps_minus", p.eps_minus}, {"lambda_plus", p.lambda_plus},
        {"lambda_minus", p.lambda_minus}, {"varphi", p.varphi},
        {"phi", p.phi},
    };
    for (const auto& [name, value] : non_negative) {
        // NaN fails this comparison too
        if (!(value >= 0.0)) add(ErrorCode::NegativeParameter, fmt::format("{} = {} must be >= 0", name, value));
    }
    if (!std::isfinite(p.nu)) add(ErrorCode::NegativeParameter, "nu must be finite");
    if (!(p.delta > 0.0)) add(ErrorCode::SpreadNonPositive, fmt::format("delta = {} must be > 0", p.delta));
    if (!(p.tick > 0.0)) add(ErrorCode::SpreadNonPositive, fmt::format("tick = {} must be > 0", p.tick));
    if (!(p.rho >= 0.0 && p.rho <= 1.0)) add(ErrorCode::RhoOutOfRange, fmt::format("rho = {} outside [0, 1]", p.rho));
    if (p.q_max < 1) add(ErrorCode::InvalidInventoryBound, fmt::format("q_max = {} must be >= 1", p.q_max));
    if (!(p.dt > 0.0)) add(ErrorCode::InvalidHorizon, fmt::format("dt = {} must be > 0", p.dt));
    if (p.n_dt < 1) add(ErrorCode::InvalidHorizon, fmt::format("n_dt = {} must be >= 1", p.n_dt));
    if (!(std::abs(p.n_dt * p.dt - p.horizon) <= 1e-9 * std::max(1.0, std::abs(p.horizon)))) {
        add(ErrorCode::InvalidHorizon, fmt::format("n_dt * dt = {} differs from horizon = {}", p.n_dt * p.dt, p.horizon));
    }

    if (!(g.alpha_max > 0.0) || g.alpha_min != -g.alpha_max) {
        add(ErrorCode::GridAsymmetric,
            fmt::format("alpha grid [{}, {}] must be symmetric about 0", g.alpha_min, g.alpha_max));
    }
    if (g.n_alpha < 11 || g.n_alpha % 2 == 0) {
        add(ErrorCode::GridTooCoarse, fmt::format("n_alpha = {} must be odd and >= 11", g.n_alpha));
    }
    if (g.substeps < 1) add(ErrorCode::GridTooCoarse, fmt::format("substeps = {} must be >= 1", g.substeps));
    return issues;
}

void ensure_valid(const MarketParams& params, const SolverGrid& grid) {
    auto issues = validate(params, grid);
    if (issues.empty()) return;
    std::string msg;
    for (const auto& issue : issues) {
        if (!msg.empty()) msg += "; ";
        msg += fmt::format("{}: {}", error_name(issue.code), issue.message);
    }
    throw Error(ErrorCode::ValidationError, msg);
}

namespace {

struct Field {
    std::function<void(Config&, std::string_view)> set;
    std::function<std::string(const Config&)> get;
};

template <typename T>
T parse_number(std::string_view key, std::string_view text) {
    T value{};
    const char* first = text.data();
    const char* last = text.data() + text.size();
    auto [ptr, ec] = std::from_chars(first, last, value);
    if (ec != std::errc{} || ptr != last) {
        throw Error(ErrorCode::ParseError, fmt::format("invalid value '{}' for key '{}'", text, key));
    }
    return value;
}

template <typename T, typename Member>
Field make_field(std::string_view key, Member member) {
    return Field{
        [key, member](Config& c, std::string_view v) { std::invoke(member, c) = parse_number<T>(key, v); },
        [member](const Config& c) { return fmt::format("{}", std::invoke(member, c)); },
    };
}

// Ordered so render_config output is stable.
const std::vector<std::pair<std::string, Field>>& fields() {
    static const std::vector<std::pair<std::string, Field>> table = [] {
        std::vector<std::pair<std::string, Field>> t;
        auto dbl = [&](const char* key, double MarketParams::*m) {
            t.emplace_back(key, make_field<double>(key, [m](auto& c) -> auto& { return c.params.*m; }));
        };
        auto in = [&](const char* key, int MarketParams::*m) {
            t.emplace_back(key, make_field<int>(key, [m](auto& c) -> auto& { return c.params.*m; }));
        };
        dbl("sigma", &MarketParams::sigma);
        dbl("nu", &MarketParams::nu);
        dbl("zeta", &MarketParams::zeta);
        dbl("eta", &MarketParams::eta);
        dbl("eps_plus", &MarketParams::eps_plus);
        dbl("eps_minus", &MarketParams::eps_minus);
        dbl("lambda_plus", &MarketParams::lambda_plus);
        dbl("lambda_minus", &MarketParams::lambda_minus);
        dbl("delta", &MarketParams::delta);
        dbl("varphi", &MarketParams::varphi);
        dbl("phi", &MarketParams::phi);
        dbl("rho", &MarketParams::rho);
        in("q_max", &MarketParams::q_max);
        dbl("horizon", &MarketParams::horizon);
        dbl("dt", &MarketParams::dt);
        in("n_dt", &MarketParams::n_dt);
        dbl("tick", &MarketParams::tick);
        t.emplace_back("alpha_min", make_field<double>("alpha_min", [](auto& c) -> auto& { return c.grid.alpha_min; }));
        t.emplace_back("alpha_max", make_field<double>("alpha_max", [](auto& c) -> auto& { return c.grid.alpha_max; }));
        t.emplace_back("n_alpha", make_field<int>("n_alpha", [](auto& c) -> auto& { return c.grid.n_alpha; }));
        t.emplace_back("substeps", make_field<int>("substeps", [](auto& c) -> auto& { return c.grid.substeps; }));
        return t;
    }();
    return table;
}

std::string_view trim(std::string_view s) {
    const auto ws = " \t\r";
    auto b = s.find_first_not_of(ws);
    if (b == std::string_view::npos) return {};
    auto e = s.find_last_not_of(ws);
    return s.substr(b, e - b + 1);
}

} // namespace

Config load_config(std::string_view text) {
    Config config{default_params(), default_grid()};
    std::map<std::string, bool> seen;
    std::size_t line_no = 0;
    while (!text.empty()) {
        ++line_no;
        auto nl = text.find('\n');
        auto line = text.substr(0, nl);
        text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);

        if (auto hash = line.find('#'); hash != std::string_view::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;

        auto eq = line.find('=');
        if (eq == std::string_view::npos) {
            throw Error(ErrorCode::ParseError, fmt::format("line {}: expected 'key = value'", line_no));
        }
        auto key = trim(line.substr(0, eq));
        auto value = trim(line.substr(eq + 1));
        if (key.empty() || value.empty()) {
            throw Error(ErrorCode::ParseError, fmt::format("line {}: empty key or value", line_no));
        }
        const auto& table = fields();
        auto it = std::find_if(table.begin(), table.end(), [&](const auto& f) { return f.first == key; });
        if (it == table.end()) {
            throw Error(ErrorCode::ParseError, fmt::format("line {}: unknown key '{}'", line_no, key));
        }
        if (seen[it->first]) {
            throw Error(ErrorCode::ParseError, fmt::format("line {}: duplicate key '{}'", line_no, key));
        }
        seen[it->first] = true;
        it->second.set(config, value);
    }
    ensure_valid(config.params, config.grid);
    return config;
}

std::string render_config(const MarketParams& params, const SolverGrid& grid) {
    const Config c{params, grid};
    std::string out;
    for (const auto& [key, field] : fields()) out += fmt::format("{} = {}\n", key, field.get(c));
    return out;
}

std::uint64_t fingerprint(const MarketParams& params, const SolverGrid& grid) {
    std::uint64_t hash = 0xcbf29ce484222325ULL;
    for (unsigned char ch : render_config(params, grid)) {
        hash ^= ch;
        hash *= 0x100000001b3ULL;
    }
    return hash;
}

} // namespace mmfill
