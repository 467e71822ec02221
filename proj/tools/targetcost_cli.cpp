// targetcost: calibration, oracle, simulation and verification front end.

#include <chrono>
#include <cstdint>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "targetcost.hpp"
#include "verify_suite.hpp"

namespace {

namespace tc = targetcost;
using nlohmann::ordered_json;

constexpr int kExitOk = 0;
constexpr int kExitUsage = 2;
constexpr int kExitCalibration = 3;
constexpr int kExitVerification = 4;
constexpr std::uint64_t kDefaultSeed = 20240611;

void require(bool ok, const std::string& message) {
    if (!ok) throw tc::UsageError(message);
}

ordered_json num(double v) { return std::isfinite(v) ? ordered_json(v) : ordered_json(nullptr); }

void print(const ordered_json& j) { std::cout << j.dump(2) << '\n'; }

std::vector<std::size_t> parse_size_list(const std::string& text, const std::string& flag) {
    std::vector<std::size_t> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        try {
            std::size_t used = 0;
            const long long v = std::stoll(item, &used);
            require(used == item.size() && v > 0, flag + ": bad entry '" + item + "'");
            out.push_back(static_cast<std::size_t>(v));
        } catch (const std::logic_error&) {
            throw tc::UsageError(flag + ": bad entry '" + item + "'");
        }
    }
    require(!out.empty(), flag + ": empty list");
    return out;
}

struct Shared {
    unsigned threads = tc::default_threads();
    std::uint64_t seed = kDefaultSeed;
    std::vector<CLI::Option*> seed_opts;
};

/// Seed precedence: flag > config file > TARGETCOST_SEED > built-in default.
std::uint64_t resolve_seed(const Shared& shared) {
    for (const auto* opt : shared.seed_opts) {
        if (opt->count() > 0) return shared.seed;
    }
    if (const char* env = std::getenv("TARGETCOST_SEED")) {
        try {
            std::size_t used = 0;
            const std::string s(env);
            const unsigned long long v = std::stoull(s, &used);
            require(used == s.size(), "");
            return v;
        } catch (const std::exception&) {
            throw tc::UsageError(std::string("TARGETCOST_SEED: not an unsigned integer: '") + env + "'");
        }
    }
    return kDefaultSeed;
}

// ---------------------------------------------------------------------------
// calibrate

struct CalibrateArgs {
    double p = 2.0;
    double epsilon = 1e-4;
    double boundary_tol = 1e-3;
    std::string out = "g_curve.csv";
};

int cmd_calibrate(const CalibrateArgs& a) {
    require(std::isfinite(a.p) && a.p > 1.0, "--p must be > 1");
    require(a.epsilon > 0.0 && a.epsilon <= 0.01, "--epsilon must lie in (0, 0.01]");
    require(a.boundary_tol > 0.0 && a.boundary_tol < 0.5, "--boundary-tol must lie in (0, 0.5)");
    tc::ShootOptions opts;
    opts.epsilon = a.epsilon;
    opts.boundary_tol = a.boundary_tol;
    const auto shot = tc::shoot(a.p, opts);
    const auto meta = tc::sidecar_of(shot);
    tc::write_curve(a.out, shot.curve, meta);
    ordered_json j = tc::to_json(meta);
    j["curve"] = a.out;
    j["sidecar"] = tc::sidecar_path(a.out).string();
    ordered_json cands = ordered_json::array();
    for (const auto& c : shot.candidates) cands.push_back({{"g_mid", c.g_mid}, {"gamma", c.gamma}});
    j["candidates"] = cands;
    print(j);
    if (shot.ambiguous) std::cerr << "warning: more than one bracket satisfied the boundary conditions\n";
    return kExitOk;
}

// ---------------------------------------------------------------------------
// value

struct ValueArgs {
    double p = 2.0, T = 1.0, x = 0.0, c = 0.0;
    std::string curve;
};

int cmd_value(const ValueArgs& a) {
    const auto loaded = tc::read_curve(a.curve);
    if (loaded.meta.p != a.p) {
        throw tc::UsageError("--p " + tc::fmt17(a.p) + " does not match the curve sidecar p = " +
                             tc::fmt17(loaded.meta.p));
    }
    const tc::Params params{a.p, a.T, a.x, a.c};
    tc::validate(params);
    const double level = tc::std_normal_cdf(a.c / std::sqrt(a.T));
    const double v = tc::value_function(loaded.curve, params);
    ordered_json j{{"p", a.p}, {"T", a.T}, {"x", a.x}, {"c", a.c}, {"level", level},
                   {"g_level", loaded.curve.value(level)}, {"value", v}};
    std::cout << "value = " << tc::fmt17(v) << '\n';
    print(j);
    return kExitOk;
}

// ---------------------------------------------------------------------------
// oracle

struct OracleArgs {
    std::size_t n = 2000;
    double T = 1.0, c = 0.0, p = 2.0;
    std::string profile;
    std::string tie = "constrain";
    std::string out;
};

int cmd_oracle(const OracleArgs& a) {
    require(a.n >= 2, "--n must be >= 2");
    const auto tie = a.tie == "free" ? tc::TieRule::FreeAtThreshold : tc::TieRule::ConstrainAtThreshold;
    const double v = tc::dp_value(a.n, a.T, a.c, a.p, tie);
    ordered_json j{{"n", a.n}, {"T", a.T}, {"c", a.c}, {"p", a.p}, {"tie", a.tie}, {"value", v}};
    if (!a.profile.empty()) {
        double lo = 0, hi = 0;
        long long count = 0;
        char c1 = 0, c2 = 0;
        std::istringstream ss(a.profile);
        ss >> lo >> c1 >> hi >> c2 >> count;
        require(ss && ss.peek() == EOF && c1 == ':' && c2 == ':',
                "--profile: expected lo:hi:count, got '" + a.profile + "'");
        require(lo > 0.0 && hi < 1.0 && lo <= hi && count >= 1, "--profile: need 0 < lo <= hi < 1 and count >= 1");
        std::vector<double> levels;
        for (long long i = 0; i < count; ++i) {
            levels.push_back(count == 1 ? lo : lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(count - 1));
        }
        const auto rows = tc::dp_g_profile(a.n, a.p, levels, tie);
        if (!a.out.empty()) {
            tc::write_profile(a.out, rows);
            j["profile_csv"] = a.out;
        }
        ordered_json prof = ordered_json::array();
        for (const auto& r : rows) prof.push_back({{"y", r.y}, {"g_dp", r.g}});
        j["profile"] = prof;
    }
    print(j);
    return kExitOk;
}

// ---------------------------------------------------------------------------
// simulate

struct SimulateArgs {
    std::string curve;
    double T = 1.0, x = 0.0, c = 0.0;
    std::size_t n_steps = 2000, n_paths = 1000;
    std::string dump;
    std::size_t dump_count = 1;
    std::string out;
    bool exclude_terminal_cost = false;
};

int cmd_simulate(const SimulateArgs& a, const Shared& shared) {
    require(a.n_steps >= 2, "--n-steps must be >= 2");
    require(a.n_paths >= 1, "--n-paths must be >= 1");
    const auto loaded = tc::read_curve(a.curve);
    const tc::Params params{loaded.meta.p, a.T, a.x, a.c};
    tc::validate(params);
    const std::uint64_t seed = resolve_seed(shared);
    const auto est = tc::mc_cost_estimate(loaded.curve, params, a.n_paths, a.n_steps, seed,
                                          {.threads = shared.threads,
                                           .include_terminal_cost = !a.exclude_terminal_cost});
    if (!a.dump.empty()) {
        const std::size_t count = std::min(a.dump_count, a.n_paths);
        for (std::size_t i = 0; i < count; ++i) {
            auto path = tc::simulate_brownian(params.T, a.n_steps, tc::derive_seed(seed, i));
            path = tc::run_optimal_control(loaded.curve, params, std::move(path),
                                           {.include_terminal_cost = !a.exclude_terminal_cost});
            char name[32];
            std::snprintf(name, sizeof name, "path_%05zu.csv", i);
            tc::write_path(std::filesystem::path(a.dump) / name, path);
        }
    }
    ordered_json j;
    j["params"] = {{"p", params.p}, {"T", params.T}, {"x", params.x}, {"c", params.c}};
    j["n_paths"] = a.n_paths;
    j["n_steps"] = a.n_steps;
    j["seed"] = seed;
    j["mean_cost"] = est.mean;
    j["stderr"] = num(est.std_error);
    j["feasibility_violations"] = est.feasibility_violations;
    j["value_function"] = tc::value_function(loaded.curve, params);
    if (!a.out.empty()) {
        std::ofstream f(a.out);
        if (!f) throw tc::ResourceError("cannot open " + a.out + " for writing");
        f << j.dump(2) << '\n';
    }
    print(j);
    return est.feasibility_violations == 0 ? kExitOk : kExitVerification;
}

// ---------------------------------------------------------------------------
// bsde-check

struct BsdeArgs {
    std::string curve;
    double T = 1.0, c = 0.0, delta = 0.1;
    std::size_t n_paths = 4000;
    std::string levels = "500,1000,2000";
};

int cmd_bsde(const BsdeArgs& a, const Shared& shared) {
    const auto loaded = tc::read_curve(a.curve);
    const auto levels = parse_size_list(a.levels, "--n-steps");
    require(a.T > 0.0, "--T must be > 0");
    require(a.delta > 0.0 && a.delta < a.T / 2.0, "--delta must lie in (0, T/2)");
    const std::uint64_t seed = resolve_seed(shared);
    ordered_json rows = ordered_json::array();
    bool ok = true;
    double first_rms = 0.0, last_rms = 0.0;
    for (std::size_t n : levels) {
        const auto s = tc::bsde_residual(loaded.curve, loaded.meta.p, a.T, a.c, a.n_paths, n, a.delta, seed,
                                         shared.threads);
        const double z_euler = std::abs(s.mean_residual) / s.std_error;
        const double z_trap = std::abs(s.mean_trapezoid) / s.std_error_trapezoid;
        ok = ok && z_trap <= 3.0 && s.negative_z == 0;
        if (n == levels.front()) first_rms = s.rms_residual;
        last_rms = s.rms_residual;
        rows.push_back({{"n_steps", n},
                        {"window_steps", s.window_steps},
                        {"mean_residual", s.mean_residual},
                        {"stderr", s.std_error},
                        {"euler_z", z_euler},
                        {"mean_trapezoid", s.mean_trapezoid},
                        {"stderr_trapezoid", s.std_error_trapezoid},
                        {"trapezoid_z", z_trap},
                        {"rms_residual", s.rms_residual},
                        {"max_abs_residual", s.max_abs_residual},
                        {"min_z", s.min_z},
                        {"negative_z", s.negative_z}});
    }
    ordered_json j{{"p", loaded.meta.p}, {"T", a.T}, {"c", a.c}, {"delta", a.delta},
                   {"n_paths", a.n_paths}, {"seed", seed}, {"levels", rows}};
    if (levels.size() > 1) {
        j["rms_ratio_last_first"] = last_rms / first_rms;
        ok = ok && last_rms <= 0.6 * first_rms;
    }
    j["passed"] = ok;
    print(j);
    return ok ? kExitOk : kExitVerification;
}

// ---------------------------------------------------------------------------
// expcase

struct ExpArgs {
    double T = 1.0, x = 0.0, lam = 1.0, c = 0.0;
    std::string n_list = "4,8,16,32,64";
    std::string out;
};

int cmd_expcase(const ExpArgs& a) {
    const auto ns = parse_size_list(a.n_list, "--n-list");
    const double w = tc::exp_value(a.T, a.x, a.lam);
    std::vector<tc::WitnessRow> rows;
    for (std::size_t n : ns) {
        require(n >= 2 && n <= 100000, "--n-list: entries must lie in [2, 100000]");
        const auto wit = tc::duality_witness(static_cast<int>(n), a.T, a.c);
        rows.push_back({wit, tc::duality_gap(wit, a.T, a.x, a.lam)});
    }
    bool monotone = true;
    for (std::size_t i = 1; i < rows.size(); ++i) {
        monotone = monotone && rows[i].witness.entropy < rows[i - 1].witness.entropy &&
                   rows[i].witness.mass >= rows[i - 1].witness.mass;
    }
    if (!monotone) std::cerr << "note: entropy/mass are not monotone along the requested sequence\n";
    if (!a.out.empty()) {
        std::ofstream f(a.out);
        if (!f) throw tc::ResourceError("cannot open " + a.out + " for writing");
        tc::write_witnesses(f, rows);
    }
    std::cout << "value = " << tc::fmt17(w) << '\n';
    ordered_json wj = ordered_json::array();
    for (const auto& r : rows) {
        wj.push_back({{"n", r.witness.n}, {"I_n", r.witness.I_n}, {"mass", r.witness.mass},
                      {"entropy", r.witness.entropy}, {"duality_gap", r.duality_gap}});
    }
    print({{"T", a.T}, {"x", a.x}, {"lam", a.lam}, {"c", a.c}, {"value", w},
           {"control", tc::exp_optimal_control(a.T, a.x)}, {"monotone", monotone}, {"witnesses", wj}});
    return kExitOk;
}

// ---------------------------------------------------------------------------
// verify

struct VerifyArgs {
    double p = 2.0;
    std::string budget = "full";
    double inject = 0.0;
    std::string report;
};

int cmd_verify(const VerifyArgs& a, const Shared& shared) {
    require(std::isfinite(a.p) && a.p > 1.0, "--p must be > 1");
    verify::Options opts;
    opts.p = a.p;
    opts.full = a.budget == "full";
    opts.inject = a.inject;
    opts.threads = shared.threads;
    opts.seed = resolve_seed(shared);
    const auto rep = verify::run(opts);
    const auto j = rep.to_json(opts);
    if (!a.report.empty()) {
        std::ofstream f(a.report);
        if (!f) throw tc::ResourceError("cannot open " + a.report + " for writing");
        f << j.dump(2) << '\n';
    }
    print(j);
    if (!rep.passed()) {
        for (const auto& name : j["failed"]) std::cerr << "failed: " << name.get<std::string>() << '\n';
        return kExitVerification;
    }
    return kExitOk;
}

// ---------------------------------------------------------------------------
// config file: flat `key = value` lines, '#' comments. Keys name long flags of
// the selected command (or global flags); underscores stand for dashes.

std::map<std::string, std::string> read_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw tc::UsageError("--config: cannot open '" + path + "'");
    std::map<std::string, std::string> out;
    std::string line;
    int row = 0;
    auto trim = [](std::string s) {
        const auto b = s.find_first_not_of(" \t\r");
        const auto e = s.find_last_not_of(" \t\r");
        return b == std::string::npos ? std::string{} : s.substr(b, e - b + 1);
    };
    while (std::getline(in, line)) {
        ++row;
        if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw tc::UsageError("--config: line " + std::to_string(row) + " is not 'key = value'");
        }
        std::string key = trim(line.substr(0, eq));
        std::string value = trim(line.substr(eq + 1));
        if (value.size() >= 2 && value.front() == '"' && value.back() == '"') value = value.substr(1, value.size() - 2);
        for (auto& ch : key) {
            if (ch == '_') ch = '-';
        }
        out[key] = value;
    }
    return out;
}

bool flag_present(const std::vector<std::string>& args, const std::string& flag) {
    for (const auto& a : args) {
        if (a == flag || a.rfind(flag + "=", 0) == 0) return true;
    }
    return false;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Minimal-cost control under a stochastic target constraint."};
    app.require_subcommand(1);
    app.fallthrough();
    Shared shared;
    std::string config_path;
    app.add_option("--threads", shared.threads, "Worker threads for Monte Carlo runs")
        ->check(CLI::Range(1u, 1024u));
    app.add_option("--config", config_path, "Flat key = value file; command-line flags take precedence");

    auto add_seed = [&](CLI::App* sub) {
        shared.seed_opts.push_back(sub->add_option("--seed", shared.seed, "Master seed (default: $TARGETCOST_SEED or built-in)"));
    };

    CalibrateArgs cal;
    auto* s_cal = app.add_subcommand("calibrate", "Solve the boundary problem for g and write the curve");
    s_cal->add_option("--p", cal.p, "Cost exponent (> 1)")->capture_default_str();
    s_cal->add_option("--epsilon", cal.epsilon, "Boundary offset, in (0, 0.01]")->capture_default_str();
    s_cal->add_option("--boundary-tol", cal.boundary_tol, "Accepted boundary residual")->capture_default_str();
    s_cal->add_option("--out", cal.out, "Curve CSV; the JSON sidecar goes next to it")->capture_default_str();

    ValueArgs val;
    auto* s_val = app.add_subcommand("value", "Evaluate v(T, x, c) from a calibrated curve");
    s_val->add_option("--p", val.p, "Cost exponent; must match the curve")->capture_default_str();
    s_val->add_option("--T", val.T, "Horizon")->capture_default_str();
    s_val->add_option("--x", val.x, "Initial state in [0, 1]")->capture_default_str();
    s_val->add_option("--c", val.c, "Threshold")->capture_default_str();
    s_val->add_option("--curve", val.curve, "Curve CSV written by calibrate")->required();

    OracleArgs orc;
    auto* s_orc = app.add_subcommand("oracle", "Random-walk dynamic programming estimate");
    s_orc->add_option("--n", orc.n, "Walk steps")->capture_default_str();
    s_orc->add_option("--T", orc.T, "Horizon")->capture_default_str();
    s_orc->add_option("--c", orc.c, "Threshold")->capture_default_str();
    s_orc->add_option("--p", orc.p, "Cost exponent (> 1)")->capture_default_str();
    s_orc->add_option("--profile", orc.profile, "Levels lo:hi:count for a g profile");
    s_orc->add_option("--tie", orc.tie, "Terminal node exactly at c: constrain | free")
        ->check(CLI::IsMember({"constrain", "free"}))
        ->capture_default_str();
    s_orc->add_option("--out", orc.out, "Profile CSV (y,g_dp)");

    SimulateArgs sim;
    auto* s_sim = app.add_subcommand("simulate", "Monte Carlo cost of the feedback control");
    s_sim->add_option("--curve", sim.curve, "Curve CSV written by calibrate")->required();
    s_sim->add_option("--T", sim.T, "Horizon")->capture_default_str();
    s_sim->add_option("--x", sim.x, "Initial state in [0, 1]")->capture_default_str();
    s_sim->add_option("--c", sim.c, "Threshold")->capture_default_str();
    s_sim->add_option("--n-steps", sim.n_steps, "Time steps per path")->capture_default_str();
    s_sim->add_option("--n-paths", sim.n_paths, "Number of paths")->capture_default_str();
    add_seed(s_sim);
    s_sim->add_option("--dump", sim.dump, "Directory for per-path CSVs (t,W,M,u,X,cost_running)");
    s_sim->add_option("--dump-count", sim.dump_count, "Paths to dump")->capture_default_str();
    s_sim->add_option("--out", sim.out, "Summary JSON file");
    s_sim->add_flag("--exclude-terminal-cost", sim.exclude_terminal_cost, "Do not charge the completion step");

    BsdeArgs bs;
    auto* s_bs = app.add_subcommand("bsde-check", "Residuals of the explicit BSDE solution");
    s_bs->add_option("--curve", bs.curve, "Curve CSV written by calibrate")->required();
    s_bs->add_option("--T", bs.T, "Horizon")->capture_default_str();
    s_bs->add_option("--c", bs.c, "Threshold")->capture_default_str();
    s_bs->add_option("--delta", bs.delta, "Terminal cutoff, in (0, T/2)")->capture_default_str();
    s_bs->add_option("--n-paths", bs.n_paths, "Number of paths")->capture_default_str();
    s_bs->add_option("--n-steps", bs.levels, "Comma-separated refinement levels")->capture_default_str();
    add_seed(s_bs);

    ExpArgs ex;
    auto* s_ex = app.add_subcommand("expcase", "Exponential cost: closed form and duality witnesses");
    s_ex->add_option("--T", ex.T, "Horizon")->capture_default_str();
    s_ex->add_option("--x", ex.x, "Initial state")->capture_default_str();
    s_ex->add_option("--lam", ex.lam, "Rate lambda (> 0)")->capture_default_str();
    s_ex->add_option("--c", ex.c, "Threshold")->capture_default_str();
    s_ex->add_option("--n-list", ex.n_list, "Witness indices")->capture_default_str();
    s_ex->add_option("--out", ex.out, "Witness CSV (n,I_n,mass,entropy,duality_gap)");

    VerifyArgs ver;
    auto* s_ver = app.add_subcommand("verify", "Run the invariant suites");
    s_ver->add_option("--p", ver.p, "Cost exponent (> 1)")->capture_default_str();
    s_ver->add_option("--budget", ver.budget, "quick | full")
        ->check(CLI::IsMember({"quick", "full"}))
        ->capture_default_str();
    s_ver->add_option("--inject-perturbation", ver.inject, "Test hook: bump amplitude added to g")
        ->capture_default_str();
    s_ver->add_option("--report", ver.report, "Also write the JSON report here");
    add_seed(s_ver);

    // Splice config entries in as flags unless the command line already set them.
    std::vector<std::string> args(argv + 1, argv + argc);
    try {
        for (std::size_t i = 0; i < args.size(); ++i) {
            if (args[i] == "--config" && i + 1 < args.size()) config_path = args[i + 1];
            if (args[i].rfind("--config=", 0) == 0) config_path = args[i].substr(9);
        }
        if (!config_path.empty()) {
            CLI::App* sub = nullptr;
            for (const auto& a : args) {
                for (auto* s : app.get_subcommands({})) {
                    if (s->get_name() == a) sub = s;
                }
                if (sub) break;
            }
            std::vector<std::string> extra;
            for (const auto& [key, value] : read_config(config_path)) {
                const std::string flag = "--" + key;
                if (key == "config" || flag_present(args, flag)) continue;
                CLI::Option* opt = sub ? sub->get_option_no_throw(flag) : nullptr;
                if (!opt) opt = app.get_option_no_throw(flag);
                if (!opt) {
                    bool known_elsewhere = false;
                    for (auto* s : app.get_subcommands({})) {
                        known_elsewhere = known_elsewhere || s->get_option_no_throw(flag) != nullptr;
                    }
                    if (!known_elsewhere) throw tc::UsageError("--config: unknown key '" + key + "'");
                    continue;
                }
                if (opt->get_expected_min() == 0) {
                    if (value == "true" || value == "1" || value == "yes") extra.push_back(flag);
                } else {
                    extra.push_back(flag + "=" + value);
                }
            }
            args.insert(args.end(), extra.begin(), extra.end());
        }
    } catch (const tc::UsageError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return kExitUsage;
    }

    std::vector<const char*> cargv{argv[0]};
    for (const auto& a : args) cargv.push_back(a.c_str());
    try {
        app.parse(static_cast<int>(cargv.size()), cargv.data());
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return kExitUsage;
    }

    try {
        if (s_cal->parsed()) return cmd_calibrate(cal);
        if (s_val->parsed()) return cmd_value(val);
        if (s_orc->parsed()) return cmd_oracle(orc);
        if (s_sim->parsed()) return cmd_simulate(sim, shared);
        if (s_bs->parsed()) return cmd_bsde(bs, shared);
        if (s_ex->parsed()) return cmd_expcase(ex);
        if (s_ver->parsed()) return cmd_verify(ver, shared);
    } catch (const tc::CalibrationError& e) {
        std::cerr << "calibration failed: " << e.what() << '\n';
        return kExitCalibration;
    } catch (const tc::RangeError& e) {
        std::cerr << "calibration failed: " << e.what() << '\n';
        return kExitCalibration;
    } catch (const tc::DivergenceError& e) {
        std::cerr << "calibration failed: " << e.what() << '\n';
        return kExitCalibration;
    } catch (const tc::UsageError& e) {
        std::cerr << "usage error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const tc::DomainError& e) {
        std::cerr << "usage error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return kExitUsage;
}
