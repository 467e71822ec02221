#pragma once

// Monte Carlo of the optimal feedback control
//
//     dX_t / dt = g(M_t)^{1/(p-1)} (1 - X_t) / (T - t),
//
// and of the explicit BSDE pair Y_t = g(M_t) / (T - t)^{p-1}, Z_t = dY/dW.
//
// Discretization: the gain kappa = g(M_k)^{1/(p-1)} is frozen on each step and
// the linear ODE is solved exactly, 1 - X_{k+1} = (1 - X_k) ((T - t_{k+1}) / (T - t_k))^kappa.
// The step cost is the exact integral of u^p for that frozen-gain control. On
// the last step the realized outcome decides: if W_T > c the gap is closed at
// constant speed, otherwise the control is switched off.
//
// Seeding: path i of a run with master seed s uses std::mt19937_64 seeded with
// splitmix64(s ^ splitmix64(i)); increments come from std::normal_distribution.
// Results are reproducible on the same build, not across standard libraries.

#include <algorithm>
#include <cmath>
#include <concepts>
#include <cstddef>
#include <cstdint>
#include <limits>
#include <numbers>
#include <random>
#include <span>
#include <string>
#include <vector>

#include "targetcost/errors.hpp"
#include "targetcost/g_solver.hpp"
#include "targetcost/gaussian.hpp"
#include "targetcost/parallel.hpp"
#include "targetcost/params.hpp"

namespace targetcost {

/// Anything that behaves like g: a value and a slope on (0, 1).
template <class G>
concept GFunction = requires(const G& g, double y) {
    { g.value(y) } -> std::convertible_to<double>;
    { g.derivative(y) } -> std::convertible_to<double>;
};

enum class BumpShape { Flat, Smooth };

/// g + eta * bump(y) on [lo, hi], clamped to [0, 1]. Flat bumps are the
/// indicator of [lo, hi]; smooth ones are sin^2 and carry a consistent slope.
template <GFunction Base>
class PerturbedG {
public:
    PerturbedG(const Base& base, double lo, double hi, double eta, BumpShape shape = BumpShape::Flat)
        : base_(&base), lo_(lo), hi_(hi), eta_(eta), shape_(shape) {
        if (!(lo < hi)) throw DomainError("PerturbedG: need lo < hi");
    }

    double value(double y) const { return std::clamp(base_->value(y) + eta_ * bump(y), 0.0, 1.0); }
    double derivative(double y) const { return base_->derivative(y) + eta_ * bump_slope(y); }

private:
    double bump(double y) const {
        if (y < lo_ || y > hi_) return 0.0;
        if (shape_ == BumpShape::Flat) return 1.0;
        const double s = std::sin(std::numbers::pi * (y - lo_) / (hi_ - lo_));
        return s * s;
    }
    double bump_slope(double y) const {
        if (shape_ == BumpShape::Flat || y < lo_ || y > hi_) return 0.0;
        const double w = std::numbers::pi / (hi_ - lo_);
        return w * std::sin(2.0 * w * (y - lo_));
    }

    const Base* base_;
    double lo_, hi_, eta_;
    BumpShape shape_;
};

inline std::uint64_t splitmix64(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}

/// Seed of path `index` under master seed `seed`.
inline std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t index) {
    return splitmix64(seed ^ splitmix64(index));
}

struct SimPath {
    std::size_t n_steps = 0;
    double T = 1.0;
    std::uint64_t seed = 0;
    std::vector<double> times;  ///< n + 1
    std::vector<double> dW;     ///< n
    std::vector<double> W;      ///< n + 1
    std::vector<double> M;      ///< n + 1; M[n] = 1{W_T < c}
    std::vector<double> u;      ///< n; feedback rate at the left end of each step
    std::vector<double> X;      ///< n + 1
    std::vector<double> cost;   ///< n + 1; running integral of u^p
};

namespace detail {

inline void fill_brownian(SimPath& path, double T, std::size_t n_steps, std::uint64_t seed) {
    path.n_steps = n_steps;
    path.T = T;
    path.seed = seed;
    path.times.resize(n_steps + 1);
    path.dW.resize(n_steps);
    path.W.resize(n_steps + 1);
    const double dt = T / static_cast<double>(n_steps);
    const double sd = std::sqrt(dt);
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    path.times[0] = 0.0;
    path.W[0] = 0.0;
    for (std::size_t k = 0; k < n_steps; ++k) {
        path.dW[k] = sd * normal(rng);
        path.W[k + 1] = path.W[k] + path.dW[k];
        path.times[k + 1] = static_cast<double>(k + 1) * dt;
    }
    path.times[n_steps] = T;
}

inline double power(double base, double p) { return p == 2.0 ? base * base : std::pow(base, p); }

// Per-step constants of the frozen-gain scheme: log((T - t_{k+1}) / (T - t_k))
// and (T - t_k)^{1-p}.
struct StepTable {
    std::vector<double> log_ratio;
    std::vector<double> remaining_pow;

    StepTable(double T, std::size_t n, double p) : log_ratio(n), remaining_pow(n) {
        const double dt = T / static_cast<double>(n);
        for (std::size_t k = 0; k < n; ++k) {
            const double a = T - static_cast<double>(k) * dt;
            const double b = T - static_cast<double>(k + 1) * dt;
            log_ratio[k] = std::log(b / a);
            remaining_pow[k] = std::pow(a, 1.0 - p);
        }
    }
};

template <GFunction G>
void drive(const G& gfun, const Params& params, SimPath& path, const StepTable& table,
           bool include_terminal_cost) {
    const std::size_t n = path.n_steps;
    const double p = params.p, T = params.T, c = params.c;
    const double gain_exponent = 1.0 / (p - 1.0);
    path.M.resize(n + 1);
    path.u.resize(n);
    path.X.resize(n + 1);
    path.cost.resize(n + 1);

    double gap = 1.0 - params.x;
    double running = 0.0;
    path.X[0] = params.x;
    path.cost[0] = 0.0;

    for (std::size_t k = 0; k + 1 < n; ++k) {
        const double remaining = T - path.times[k];
        const double level = std_normal_cdf((c - path.W[k]) / std::sqrt(remaining));
        path.M[k] = level;
        const double g = gfun.value(level);
        const double kappa = p == 2.0 ? g : std::pow(g, gain_exponent);
        path.u[k] = kappa * gap / remaining;

        if (kappa > 0.0 && gap > 0.0) {
            const double L = table.log_ratio[k];
            const double m = 1.0 - p * (1.0 - kappa);
            const double shape = std::abs(m) < 1e-12 ? -L : -std::expm1(m * L) / m;
            running += power(kappa * gap, p) * table.remaining_pow[k] * shape;
            gap *= std::exp(kappa * L);
        }
        path.X[k + 1] = 1.0 - gap;
        path.cost[k + 1] = running;
    }

    const std::size_t last = n - 1;
    const double delta = T - path.times[last];
    path.M[last] = std_normal_cdf((c - path.W[last]) / std::sqrt(delta));
    path.M[n] = path.W[n] < c ? 1.0 : 0.0;
    if (path.W[n] > c) {
        path.u[last] = gap / delta;
        if (include_terminal_cost) running += power(gap, p) * std::pow(delta, 1.0 - p);
        gap = 0.0;
    } else {
        path.u[last] = 0.0;
    }
    path.X[n] = 1.0 - gap;
    path.cost[n] = running;
}

}  // namespace detail

/// Times, increments and Brownian values for one path; deterministic in seed.
inline SimPath simulate_brownian(double T, std::size_t n_steps, std::uint64_t seed) {
    if (n_steps < 2) throw DomainError("simulate_brownian: need n_steps >= 2");
    if (!(T > 0.0) || !std::isfinite(T)) throw DomainError("simulate_brownian: horizon T must be > 0");
    SimPath path;
    detail::fill_brownian(path, T, n_steps, seed);
    return path;
}

struct ControlOptions {
    /// Charge the cost of the final completion step.
    bool include_terminal_cost = true;
};

/// Run the feedback law along a simulated Brownian skeleton.
template <GFunction G>
SimPath run_optimal_control(const G& gfun, const Params& params, SimPath path,
                            const ControlOptions& opts = {}) {
    validate(params);
    if (path.n_steps < 2 || path.W.size() != path.n_steps + 1) {
        throw UsageError("run_optimal_control: path skeleton is incomplete");
    }
    if (path.T != params.T) {
        throw UsageError("run_optimal_control: path horizon " + std::to_string(path.T) +
                         " differs from params.T = " + std::to_string(params.T));
    }
    const detail::StepTable table(params.T, path.n_steps, params.p);
    detail::drive(gfun, params, path, table, opts.include_terminal_cost);
    return path;
}

inline SimPath run_optimal_control(const GCurve& curve, const Params& params, SimPath path,
                                   const ControlOptions& opts = {}) {
    if (params.p != curve.p()) throw UsageError("run_optimal_control: curve/params exponent mismatch");
    return run_optimal_control<GCurve>(curve, params, std::move(path), opts);
}

/// The closed form (1 - x) kappa_t / (T - t) exp(-int_0^t kappa_s / (T - s) ds)
/// evaluated on the left end of each step, with the gain path held piecewise
/// constant as in the simulation. Only the first n - 1 steps are defined.
template <GFunction G>
std::vector<double> explicit_control(const G& gfun, const Params& params, const SimPath& path) {
    const std::size_t n = path.n_steps;
    std::vector<double> out(n - 1);
    double integral = 0.0;
    for (std::size_t k = 0; k + 1 < n; ++k) {
        const double remaining = params.T - path.times[k];
        const double level = martingale_level(path.times[k], path.W[k], params.T, params.c);
        const double kappa = std::pow(gfun.value(level), 1.0 / (params.p - 1.0));
        out[k] = (1.0 - params.x) * kappa / remaining * std::exp(-integral);
        const double next_remaining = params.T - path.times[k + 1];
        integral += kappa * std::log(remaining / next_remaining);
    }
    return out;
}

/// Paths violating X_T >= 1{W_T > c}, X <= 1, u >= 0 or monotone X.
inline std::size_t feasibility_violations(const SimPath& path, double c) {
    std::size_t bad = 0;
    const std::size_t n = path.n_steps;
    const double required = path.W[n] > c ? 1.0 : 0.0;
    if (path.X[n] < required) ++bad;
    for (std::size_t k = 0; k < n; ++k) {
        if (path.u[k] < 0.0 || path.X[k + 1] < path.X[k] || path.X[k + 1] > 1.0 ||
            path.cost[k + 1] < path.cost[k]) {
            ++bad;
            break;
        }
    }
    return bad;
}

struct McOptions {
    unsigned threads = default_threads();
    bool include_terminal_cost = true;
};

struct McEstimate {
    double mean = 0.0;
    double std_error = 0.0;
    std::size_t n_paths = 0;
    std::size_t n_steps = 0;
    std::size_t feasibility_violations = 0;
    /// Per-path costs in path order, for paired comparisons.
    std::vector<double> costs;
};

/// Sample mean and standard error of the realized cost over n_paths paths.
/// Path i uses derive_seed(seed, i), so runs with the same seed share paths.
template <GFunction G>
McEstimate mc_cost_estimate(const G& gfun, const Params& params, std::size_t n_paths,
                            std::size_t n_steps, std::uint64_t seed, const McOptions& opts = {}) {
    validate(params);
    if (n_paths < 1) throw DomainError("mc_cost_estimate: need at least one path");
    if (n_steps < 2) throw DomainError("mc_cost_estimate: need n_steps >= 2");

    const detail::StepTable table(params.T, n_steps, params.p);
    McEstimate est;
    est.n_paths = n_paths;
    est.n_steps = n_steps;
    est.costs.assign(n_paths, 0.0);
    std::vector<unsigned char> violated(n_paths, 0);

    parallel_chunks(n_paths, opts.threads, [&](std::size_t begin, std::size_t end) {
        SimPath path;
        for (std::size_t i = begin; i < end; ++i) {
            detail::fill_brownian(path, params.T, n_steps, derive_seed(seed, i));
            detail::drive(gfun, params, path, table, opts.include_terminal_cost);
            est.costs[i] = path.cost[n_steps];
            violated[i] = feasibility_violations(path, params.c) > 0;
        }
    });

    double sum = 0.0;
    for (double v : est.costs) sum += v;
    est.mean = sum / static_cast<double>(n_paths);
    double ss = 0.0;
    for (double v : est.costs) ss += (v - est.mean) * (v - est.mean);
    est.std_error = n_paths > 1
                        ? std::sqrt(ss / static_cast<double>(n_paths - 1) / static_cast<double>(n_paths))
                        : std::numeric_limits<double>::quiet_NaN();
    for (auto v : violated) est.feasibility_violations += v;
    return est;
}

inline McEstimate mc_cost_estimate(const GCurve& curve, const Params& params, std::size_t n_paths,
                                   std::size_t n_steps, std::uint64_t seed, const McOptions& opts = {}) {
    if (params.p != curve.p()) throw UsageError("mc_cost_estimate: curve/params exponent mismatch");
    return mc_cost_estimate<GCurve>(curve, params, n_paths, n_steps, seed, opts);
}

struct BsdeResidualStats {
    std::size_t n_paths = 0;
    std::size_t n_steps = 0;
    double delta = 0.0;
    std::size_t window_steps = 0;  ///< steps [t_k, t_{k+1}] with t_{k+1} <= T - delta
    double mean_residual = 0.0;
    double std_error = 0.0;  ///< from per-path sums, so within-path correlation is accounted for
    double rms_residual = 0.0;
    double max_abs_residual = 0.0;
    /// Same residual with the drift averaged over both ends of the step.
    double mean_trapezoid = 0.0;
    double std_error_trapezoid = 0.0;
    double min_z = 0.0;
    std::size_t negative_z = 0;
};

/// Euler residual r_k = dY_k - (p-1) Y_k^{p/(p-1)} dt - Z_k dW_k of the explicit
/// pair (Y, Z) along simulated paths, over the window [0, T - delta].
template <GFunction G>
BsdeResidualStats bsde_residual(const G& gfun, double p, double T, double c, std::size_t n_paths,
                                std::size_t n_steps, double delta, std::uint64_t seed,
                                unsigned threads = default_threads()) {
    validate_exponent(p);
    if (!(T > 0.0)) throw DomainError("bsde_residual: horizon T must be > 0");
    if (!(delta > 0.0 && delta < T / 2.0)) throw DomainError("bsde_residual: delta must lie in (0, T/2)");
    if (n_paths < 2 || n_steps < 2) throw DomainError("bsde_residual: need >= 2 paths and steps");

    const double dt = T / static_cast<double>(n_steps);
    const auto window = static_cast<std::size_t>(std::floor((T - delta) / dt + 1e-9));
    if (window < 1) throw DomainError("bsde_residual: window holds no full step");
    const double q = p / (p - 1.0);
    const double two_pi = 2.0 * std::numbers::pi;

    struct PathStats {
        double sum = 0.0, sum_sq = 0.0, max_abs = 0.0, min_z = 0.0, trap = 0.0;
        std::size_t negative_z = 0;
    };
    std::vector<PathStats> per_path(n_paths);

    parallel_chunks(n_paths, threads, [&](std::size_t begin, std::size_t end) {
        SimPath path;
        std::vector<double> Y(window + 1), Z(window + 1), drift(window + 1);
        for (std::size_t i = begin; i < end; ++i) {
            detail::fill_brownian(path, T, n_steps, derive_seed(seed, i));
            PathStats s;
            s.min_z = std::numeric_limits<double>::infinity();
            for (std::size_t k = 0; k <= window; ++k) {
                const double remaining = T - path.times[k];
                const double level = std_normal_cdf((c - path.W[k]) / std::sqrt(remaining));
                Y[k] = gfun.value(level) / std::pow(remaining, p - 1.0);
                drift[k] = (p - 1.0) * std::pow(Y[k], q);
                const double gap = c - path.W[k];
                Z[k] = -gfun.derivative(level) * std::exp(-gap * gap / (2.0 * remaining)) /
                       std::sqrt(two_pi * std::pow(remaining, 2.0 * p - 1.0));
                s.min_z = std::min(s.min_z, Z[k]);
                if (Z[k] < 0.0) ++s.negative_z;
            }
            for (std::size_t k = 0; k < window; ++k) {
                const double r = Y[k + 1] - Y[k] - drift[k] * dt - Z[k] * path.dW[k];
                s.trap += r - 0.5 * (drift[k + 1] - drift[k]) * dt;
                s.sum += r;
                s.sum_sq += r * r;
                s.max_abs = std::max(s.max_abs, std::abs(r));
            }
            per_path[i] = s;
        }
    });

    BsdeResidualStats out;
    out.n_paths = n_paths;
    out.n_steps = n_steps;
    out.delta = delta;
    out.window_steps = window;
    out.min_z = std::numeric_limits<double>::infinity();
    double total = 0.0, total_sq = 0.0, total_trap = 0.0;
    for (const auto& s : per_path) {
        total += s.sum;
        total_sq += s.sum_sq;
        total_trap += s.trap;
        out.max_abs_residual = std::max(out.max_abs_residual, s.max_abs);
        out.min_z = std::min(out.min_z, s.min_z);
        out.negative_z += s.negative_z;
    }
    const double samples = static_cast<double>(n_paths) * static_cast<double>(window);
    out.mean_residual = total / samples;
    out.rms_residual = std::sqrt(total_sq / samples);

    out.mean_trapezoid = total_trap / samples;

    auto path_stderr = [&](auto field, double sum_all) {
        const double path_mean = sum_all / static_cast<double>(n_paths);
        double ss = 0.0;
        for (const auto& s : per_path) ss += (s.*field - path_mean) * (s.*field - path_mean);
        const double se = std::sqrt(ss / static_cast<double>(n_paths - 1) / static_cast<double>(n_paths));
        return se / static_cast<double>(window);
    };
    out.std_error = path_stderr(&PathStats::sum, total);
    out.std_error_trapezoid = path_stderr(&PathStats::trap, total_trap);
    return out;
}

struct TerminalGrowthRow {
    double delta = 0.0;
    std::size_t binding_paths = 0;
    std::size_t free_paths = 0;
    double median_y_binding = 0.0;
    double median_y_free = 0.0;
};

/// Median of Y at T - delta split by the realized outcome W_T > c versus W_T < c.
template <GFunction G>
std::vector<TerminalGrowthRow> terminal_growth(const G& gfun, double p, double T, double c,
                                               std::size_t n_paths, std::size_t n_steps,
                                               std::span<const double> deltas, std::uint64_t seed) {
    validate_exponent(p);
    const double dt = T / static_cast<double>(n_steps);
    std::vector<TerminalGrowthRow> rows;
    for (double delta : deltas) {
        if (!(delta > 0.0 && delta < T)) throw DomainError("terminal_growth: delta must lie in (0, T)");
        const double k_real = (T - delta) / dt;
        if (std::abs(k_real - std::round(k_real)) > 1e-6) {
            throw UsageError("terminal_growth: T - delta must fall on the time grid");
        }
    }
    std::vector<std::vector<double>> binding(deltas.size()), free(deltas.size());
    SimPath path;
    for (std::size_t i = 0; i < n_paths; ++i) {
        detail::fill_brownian(path, T, n_steps, derive_seed(seed, i));
        const bool binds = path.W[n_steps] > c;
        for (std::size_t d = 0; d < deltas.size(); ++d) {
            const auto k = static_cast<std::size_t>(std::llround((T - deltas[d]) / dt));
            const double remaining = T - path.times[k];
            const double level = std_normal_cdf((c - path.W[k]) / std::sqrt(remaining));
            const double y = gfun.value(level) / std::pow(remaining, p - 1.0);
            (binds ? binding[d] : free[d]).push_back(y);
        }
    }
    auto median = [](std::vector<double>& v) {
        if (v.empty()) return std::numeric_limits<double>::quiet_NaN();
        const auto mid = v.begin() + static_cast<std::ptrdiff_t>(v.size() / 2);
        std::nth_element(v.begin(), mid, v.end());
        return *mid;
    };
    for (std::size_t d = 0; d < deltas.size(); ++d) {
        rows.push_back({deltas[d], binding[d].size(), free[d].size(), median(binding[d]), median(free[d])});
    }
    return rows;
}

}  // namespace targetcost
