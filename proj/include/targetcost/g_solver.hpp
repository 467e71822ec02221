#pragma once

// Normalized value kernel g on (0, 1).
//
// g solves the singular boundary-value problem
//
//     h(y) g''(y) + (p - 1) (g(y) - g(y)^{p/(p-1)}) = 0,   g(0+) = 1,  g(1-) = 0,
//
// with h(y) = exp(-Phi^{-1}(y)^2) / (4 pi). Every value of the power-cost
// problem follows from it:  v(T, x, c) = (1 - x)^p / T^{p-1} * g(Phi(c / sqrt T)).
//
// h vanishes at both endpoints, so the boundary conditions are imposed at
// y = eps and y = 1 - eps. The curve is obtained by shooting outward from the
// midpoint in both directions, with g(1/2) and g'(1/2) as the unknowns.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <limits>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "targetcost/dopri5.hpp"
#include "targetcost/errors.hpp"
#include "targetcost/gaussian.hpp"
#include "targetcost/params.hpp"

namespace targetcost {

struct GPoint {
    double g;
    double dg;
};

/// Discretized solution of the g equation on [eps, 1 - eps].
///
/// Immutable after construction. Between nodes the curve is a cubic Hermite
/// interpolant on the stored (g, g') with Fritsch-Carlson slope limiting, so
/// monotonicity and the [0, 1] range carry over from the nodes.
class GCurve {
public:
    GCurve() = default;

    GCurve(double p, double epsilon, std::vector<double> y, std::vector<double> g,
           std::vector<double> dg)
        : p_(p), epsilon_(epsilon), y_(std::move(y)), g_(std::move(g)), dg_(std::move(dg)) {
        if (y_.size() < 2 || g_.size() != y_.size() || dg_.size() != y_.size()) {
            throw UsageError("GCurve: need at least two nodes and matching column lengths");
        }
        for (std::size_t i = 1; i < y_.size(); ++i) {
            if (!(y_[i] > y_[i - 1])) throw UsageError("GCurve: abscissae must be strictly increasing");
        }
        build_slopes();
    }

    double p() const noexcept { return p_; }
    double epsilon() const noexcept { return epsilon_; }
    std::size_t size() const noexcept { return y_.size(); }
    std::span<const double> y() const noexcept { return y_; }
    std::span<const double> g() const noexcept { return g_; }
    std::span<const double> dg() const noexcept { return dg_; }

    /// Value and slope at y in (0, 1); linear extrapolation clamped to [0, 1]
    /// outside the stored grid.
    GPoint eval(double y) const {
        if (!(y > 0.0 && y < 1.0)) {
            throw DomainError("eval_g: level must lie in (0, 1), got " + std::to_string(y));
        }
        if (y <= y_.front()) {
            return {std::min(1.0, g_.front() + dg_.front() * (y - y_.front())), dg_.front()};
        }
        if (y >= y_.back()) {
            return {std::max(0.0, g_.back() + dg_.back() * (y - y_.back())), dg_.back()};
        }
        const auto it = std::upper_bound(y_.begin(), y_.end(), y);
        const std::size_t i = static_cast<std::size_t>(it - y_.begin()) - 1;
        const double width = y_[i + 1] - y_[i];
        const double t = (y - y_[i]) / width;
        if (t == 0.0) return {g_[i], dg_[i]};

        const double t2 = t * t, t3 = t2 * t;
        const double h00 = 2 * t3 - 3 * t2 + 1, h10 = t3 - 2 * t2 + t;
        const double h01 = -2 * t3 + 3 * t2, h11 = t3 - t2;
        const double value = h00 * g_[i] + h10 * width * m_[i] + h01 * g_[i + 1] +
                             h11 * width * m_[i + 1];
        const double d00 = 6 * t2 - 6 * t, d10 = 3 * t2 - 4 * t + 1;
        const double d01 = -6 * t2 + 6 * t, d11 = 3 * t2 - 2 * t;
        const double slope =
            (d00 * g_[i] + d01 * g_[i + 1]) / width + d10 * m_[i] + d11 * m_[i + 1];
        return {std::clamp(value, 0.0, 1.0), slope};
    }

    double value(double y) const { return eval(y).g; }
    double derivative(double y) const { return eval(y).dg; }

private:
    void build_slopes() {
        m_ = dg_;
        for (std::size_t k = 0; k + 1 < y_.size(); ++k) {
            const double secant = (g_[k + 1] - g_[k]) / (y_[k + 1] - y_[k]);
            if (secant == 0.0) {
                m_[k] = 0.0;
                m_[k + 1] = 0.0;
                continue;
            }
            double alpha = m_[k] / secant;
            double beta = m_[k + 1] / secant;
            if (alpha < 0.0) m_[k] = alpha = 0.0;
            if (beta < 0.0) m_[k + 1] = beta = 0.0;
            const double norm2 = alpha * alpha + beta * beta;
            if (norm2 > 9.0) {
                const double tau = 3.0 / std::sqrt(norm2);
                m_[k] = tau * alpha * secant;
                m_[k + 1] = tau * beta * secant;
            }
        }
    }

    double p_ = 2.0;
    double epsilon_ = 1e-4;
    std::vector<double> y_, g_, dg_;
    std::vector<double> m_;
};

inline GPoint eval_g(const GCurve& curve, double y) { return curve.eval(y); }

/// Right-hand side of the g equation, g'' = -(p-1) (g - g_+^{p/(p-1)}) / h.
/// The power is taken of max(g, 0) so roundoff excursions below zero stay real.
class GEquation {
public:
    explicit GEquation(double p) : p_(p), q_(p / (p - 1.0)) { validate_exponent(p); }

    double nonlinearity(double g) const { return g - std::pow(std::max(g, 0.0), q_); }

    double second_derivative(double y, double g) const {
        return -(p_ - 1.0) * nonlinearity(g) / targetcost::h(y);
    }

    OdeState<2> operator()(double y, const OdeState<2>& s) const {
        return {s[1], second_derivative(y, s[0])};
    }

    double p() const noexcept { return p_; }

private:
    double p_, q_;
};

namespace detail {

inline constexpr double kRangeLow = -0.01;
inline constexpr double kRangeHigh = 1.01;
inline constexpr double kBlowupValue = 2.0;
inline constexpr double kBlowupSlope = 1e6;

// Grid spacing for stored curves: uniform in the bulk, geometric in the
// boundary layers where h ~ s^2 log(1/s).
inline constexpr double kBulkSpacing = 5e-5;
inline constexpr double kLayerRatio = 5e-4;

enum class BranchStop { Reached, RangeLow, RangeHigh, Diverged };

struct BranchEnd {
    BranchStop stop = BranchStop::Reached;
    double y = 0.5;
    double g = 0.0;
    double dg = 0.0;
};

inline double max_step_at(double y) {
    const double s = std::min(y, 1.0 - y);
    return std::min(0.05, std::max(1e-12, 0.25 * s));
}

inline std::optional<BranchStop> check_state(const OdeState<2>& s) {
    if (!std::isfinite(s[0]) || !std::isfinite(s[1]) || std::abs(s[0]) > kBlowupValue ||
        std::abs(s[1]) > kBlowupSlope) {
        return BranchStop::Diverged;
    }
    if (s[0] < kRangeLow) return BranchStop::RangeLow;
    if (s[0] > kRangeHigh) return BranchStop::RangeHigh;
    return std::nullopt;
}

/// Integrate one branch from y = 1/2 to y_end, optionally recording the state
/// at the supplied nodes (ordered from 1/2 towards y_end, excluding 1/2).
inline BranchEnd integrate_branch(const GEquation& eq, double g_mid, double gamma, double y_end,
                                  const StepControl& ctl, std::span<const double> nodes = {},
                                  std::vector<OdeState<2>>* samples = nullptr) {
    OdeState<2> state{g_mid, gamma};
    BranchEnd end;
    std::optional<BranchStop> failure;
    double failure_y = 0.5;
    auto observer = [&](double y, const OdeState<2>& s) {
        failure = check_state(s);
        if (failure) {
            failure_y = y;
            return false;
        }
        return true;
    };

    auto run = [&](double from, double to, StepControl c) {
        const auto report = dopri5<2>(eq, from, to, state, c, max_step_at, observer);
        if (report.status == OdeStatus::StepUnderflow) {
            failure = BranchStop::Diverged;
            failure_y = report.x;
        }
    };

    if (nodes.empty()) {
        run(0.5, y_end, ctl);
    } else {
        double from = 0.5;
        for (double node : nodes) {
            StepControl c = ctl;
            c.initial_step = std::abs(node - from);
            run(from, node, c);
            if (failure) break;
            samples->push_back(state);
            from = node;
        }
    }

    if (failure) {
        end.stop = *failure;
        end.y = failure_y;
    } else {
        end.y = y_end;
    }
    end.g = state[0];
    end.dg = state[1];
    return end;
}

/// Nodes from 1/2 (exclusive) down to eps (inclusive).
inline std::vector<double> left_nodes(double epsilon) {
    std::vector<double> nodes;
    double y = 0.5;
    while (true) {
        const double step = std::min(kBulkSpacing, kLayerRatio * y);
        const double next = y - step;
        if (next <= epsilon + 0.5 * std::min(kBulkSpacing, kLayerRatio * epsilon)) break;
        nodes.push_back(next);
        y = next;
    }
    nodes.push_back(epsilon);
    return nodes;
}

inline const char* describe(BranchStop stop) {
    switch (stop) {
        case BranchStop::Reached: return "reached";
        case BranchStop::RangeLow: return "left [-0.01, 1.01] from below";
        case BranchStop::RangeHigh: return "left [-0.01, 1.01] from above";
        case BranchStop::Diverged: return "diverged";
    }
    return "unknown";
}

}  // namespace detail

/// Integrate the g equation from (g(1/2), g'(1/2)) = (g_mid, gamma) outward to
/// y = eps and y = 1 - eps, recording a dense node grid. Stored node values
/// are clamped to [0, 1]; excursions inside the tolerated box are roundoff.
///
/// Throws RangeError when g leaves [-0.01, 1.01] and DivergenceError when
/// |g| > 2 or |g'| > 1e6; both carry the abscissa where it happened.
inline GCurve integrate_g(double p, double g_mid, double gamma, double epsilon = 1e-4,
                          const StepControl& ctl = {}) {
    validate_exponent(p);
    if (!(g_mid > 0.0 && g_mid < 1.0) && g_mid != 1.0) {
        throw DomainError("integrate_g: g_mid must lie in (0, 1]");
    }
    if (!(epsilon > 0.0 && epsilon < 0.1)) {
        throw DomainError("integrate_g: epsilon must lie in (0, 0.1)");
    }
    const GEquation eq(p);
    const std::vector<double> left = detail::left_nodes(epsilon);
    std::vector<double> right(left.size());
    std::transform(left.begin(), left.end(), right.begin(), [](double y) { return 1.0 - y; });

    std::vector<OdeState<2>> left_states, right_states;
    left_states.reserve(left.size());
    right_states.reserve(right.size());

    auto run_branch = [&](const std::vector<double>& nodes, std::vector<OdeState<2>>& states) {
        const auto end = detail::integrate_branch(eq, g_mid, gamma, nodes.back(), ctl, nodes, &states);
        if (end.stop == detail::BranchStop::Diverged) {
            throw DivergenceError("integrate_g: trajectory diverged at y = " + std::to_string(end.y), end.y);
        }
        if (end.stop != detail::BranchStop::Reached) {
            throw RangeError("integrate_g: g " + std::string(detail::describe(end.stop)) +
                                 " at y = " + std::to_string(end.y),
                             end.y);
        }
    };
    run_branch(left, left_states);
    run_branch(right, right_states);

    const std::size_t n = left.size() + 1 + right.size();
    std::vector<double> ys, gs, dgs;
    ys.reserve(n);
    gs.reserve(n);
    dgs.reserve(n);
    for (std::size_t i = left.size(); i-- > 0;) {
        ys.push_back(left[i]);
        gs.push_back(std::clamp(left_states[i][0], 0.0, 1.0));
        dgs.push_back(left_states[i][1]);
    }
    ys.push_back(0.5);
    gs.push_back(g_mid);
    dgs.push_back(gamma);
    for (std::size_t i = 0; i < right.size(); ++i) {
        ys.push_back(right[i]);
        gs.push_back(std::clamp(right_states[i][0], 0.0, 1.0));
        dgs.push_back(right_states[i][1]);
    }
    return GCurve(p, epsilon, std::move(ys), std::move(gs), std::move(dgs));
}

struct ShootOptions {
    double epsilon = 1e-4;
    double boundary_tol = 1e-3;
    int max_iterations = 60;
    /// Number of coarse g_mid cells scanned for additional sign changes.
    int scan_cells = 12;
    double gamma_min = -10.0;
    double gamma_max = 0.0;
    StepControl step_control{};
};

struct ShootingCandidate {
    double g_mid;
    double gamma;
    double left_residual;
    double right_residual;
};

struct ShootingResult {
    double g_mid = 0.0;
    /// g'(1/2), the slope in the level variable y.
    double gamma = 0.0;
    GCurve curve;
    double left_residual = 0.0;
    double right_residual = 0.0;
    /// d/dc g(Phi(c)) at c = 0, i.e. gamma * phi(0): the slope in the threshold variable.
    double threshold_slope = 0.0;
    /// Every bracket that validated, smallest g_mid first. More than one means
    /// the boundary problem was not resolved uniquely by the scan.
    std::vector<ShootingCandidate> candidates;
    bool ambiguous = false;
};

namespace detail {

enum class Side { Low, High };

inline Side classify(const BranchEnd& end, double target) {
    switch (end.stop) {
        case BranchStop::Reached: return end.g > target ? Side::High : Side::Low;
        case BranchStop::RangeLow: return Side::Low;
        case BranchStop::RangeHigh: return Side::High;
        case BranchStop::Diverged:
            // Left branch runs towards y = 0: a steep negative slope means g is
            // climbing. The right branch runs the other way.
            return (end.dg < 0.0) == (target > 0.5) ? Side::High : Side::Low;
    }
    return Side::Low;
}

class Shooter {
public:
    Shooter(double p, const ShootOptions& opts) : eq_(p), opts_(opts) {}

    /// gamma with g(1 - eps) >= 0 closest to the root, or the side on which
    /// the whole gamma window misses.
    struct Inner {
        std::optional<double> gamma;
        Side miss = Side::Low;
    };

    Side right_side(double g_mid, double gamma) const {
        return classify(integrate_branch(eq_, g_mid, gamma, 1.0 - opts_.epsilon, opts_.step_control), 0.0);
    }

    Inner solve_gamma(double g_mid) const {
        double lo = opts_.gamma_min, hi = opts_.gamma_max;
        if (right_side(g_mid, hi) == Side::Low) return {std::nullopt, Side::Low};
        if (right_side(g_mid, lo) == Side::High) return {std::nullopt, Side::High};
        for (int it = 0; it < opts_.max_iterations && hi - lo > 1e-15; ++it) {
            const double mid = 0.5 * (lo + hi);
            (right_side(g_mid, mid) == Side::High ? hi : lo) = mid;
        }
        return {hi, Side::Low};
    }

    /// Side of the left boundary value relative to 1, with gamma solved for.
    std::pair<Side, std::optional<double>> left_side(double g_mid) const {
        const Inner inner = solve_gamma(g_mid);
        if (!inner.gamma) return {inner.miss, std::nullopt};
        const auto end = integrate_branch(eq_, g_mid, *inner.gamma, opts_.epsilon, opts_.step_control);
        return {classify(end, 1.0), inner.gamma};
    }

    /// Bisect g_mid on [lo, hi] where left_side differs at the ends. Returns
    /// the end whose left boundary value is <= 1.
    std::optional<std::pair<double, double>> bisect(double lo, Side lo_side, double hi) const {
        double at_low = lo_side == Side::Low ? lo : hi;
        double at_high = lo_side == Side::Low ? hi : lo;
        std::optional<double> gamma;
        for (int it = 0; it < opts_.max_iterations && std::abs(at_high - at_low) > 1e-15; ++it) {
            const double mid = 0.5 * (at_low + at_high);
            const auto [side, g] = left_side(mid);
            if (side == Side::Low) {
                at_low = mid;
                if (g) gamma = g;
            } else {
                at_high = mid;
            }
        }
        if (!gamma) {
            const auto [side, g] = left_side(at_low);
            gamma = g;
        }
        if (!gamma) return std::nullopt;
        return std::pair{at_low, *gamma};
    }

private:
    GEquation eq_;
    ShootOptions opts_;
};

}  // namespace detail

/// Calibrate g by nested bisection: the inner loop fits g'(1/2) to the right
/// boundary value 0, the outer loop fits g(1/2) to the left boundary value 1.
/// g(1/2) is bracketed in [2^{-p}, 1] (from g(y) >= (1 - y)^p and g <= 1).
inline ShootingResult shoot(double p, const ShootOptions& opts = {}) {
    validate_exponent(p);
    if (!(opts.epsilon > 0.0 && opts.epsilon < 0.1)) {
        throw DomainError("shoot: epsilon must lie in (0, 0.1)");
    }
    if (!(opts.boundary_tol > 0.0)) throw DomainError("shoot: boundary_tol must be > 0");

    const detail::Shooter shooter(p, opts);
    const double lo = std::pow(2.0, -p);
    const double hi = 1.0;

    const int cells = std::max(1, opts.scan_cells);
    std::vector<double> grid(static_cast<std::size_t>(cells) + 1);
    std::vector<detail::Side> sides(grid.size());
    for (std::size_t i = 0; i < grid.size(); ++i) {
        grid[i] = lo + (hi - lo) * static_cast<double>(i) / cells;
        sides[i] = shooter.left_side(grid[i]).first;
    }

    ShootingResult result;
    for (std::size_t i = 0; i + 1 < grid.size(); ++i) {
        if (sides[i] == sides[i + 1]) continue;
        const auto root = shooter.bisect(grid[i], sides[i], grid[i + 1]);
        if (!root) continue;
        try {
            GCurve curve = integrate_g(p, root->first, root->second, opts.epsilon, opts.step_control);
            const double left_res = std::abs(curve.g().front() - 1.0);
            const double right_res = std::abs(curve.g().back());
            if (left_res <= opts.boundary_tol && right_res <= opts.boundary_tol) {
                result.candidates.push_back({root->first, root->second, left_res, right_res});
                if (result.candidates.size() == 1) {
                    result.g_mid = root->first;
                    result.gamma = root->second;
                    result.curve = std::move(curve);
                    result.left_residual = left_res;
                    result.right_residual = right_res;
                }
            }
        } catch (const RangeError&) {
        } catch (const DivergenceError&) {
        }
    }

    if (result.candidates.empty()) {
        std::string diag = "shoot: no (g_mid, gamma) in [" + std::to_string(lo) + ", 1] x [" +
                           std::to_string(opts.gamma_min) + ", " + std::to_string(opts.gamma_max) +
                           "] meets both boundary conditions within " +
                           std::to_string(opts.boundary_tol) + "; scan sides:";
        for (auto s : sides) diag += s == detail::Side::Low ? " L" : " H";
        throw CalibrationError(diag);
    }
    result.ambiguous = result.candidates.size() > 1;
    result.threshold_slope = result.gamma * std_normal_pdf(0.0);
    return result;
}

/// v(T, x, c) = (1 - x)^p / T^{p-1} * g(Phi(c / sqrt T)).
inline double value_function(const GCurve& curve, const Params& params) {
    validate(params);
    if (params.p != curve.p()) {
        throw UsageError("value_function: curve calibrated for p = " + std::to_string(curve.p()) +
                         ", requested p = " + std::to_string(params.p));
    }
    if (params.x == 1.0) return 0.0;
    const double level = std_normal_cdf(params.c / std::sqrt(params.T));
    return std::pow(1.0 - params.x, params.p) / std::pow(params.T, params.p - 1.0) *
           curve.value(level);
}

/// The split-cost bound z^p / y^{p-1} + (1 - z)^p / (1 - y)^{p-1} >= 1 on (0, 1)^2,
/// returned as the left-hand side.
inline double split_cost(double y, double z, double p) {
    return std::pow(z, p) / std::pow(y, p - 1.0) + std::pow(1.0 - z, p) / std::pow(1.0 - y, p - 1.0);
}

struct CurveDiagnostics {
    double min_g = 0.0;
    double max_g = 0.0;
    double max_dg = 0.0;                ///< should be <= 0 (non-increasing)
    double max_chord_defect = 0.0;      ///< max of chord-through-neighbours minus g; <= 0 when concave
    double min_lower_bound_gap = 0.0;   ///< min over nodes of g - (1 - y)^p
    double max_ode_residual = 0.0;      ///< interior nodes, g'' from divided differences of g'
};

/// Shape and equation diagnostics over every stored node.
inline CurveDiagnostics diagnose(const GCurve& curve) {
    const auto y = curve.y();
    const auto g = curve.g();
    const auto dg = curve.dg();
    const GEquation eq(curve.p());

    CurveDiagnostics d;
    d.min_g = *std::min_element(g.begin(), g.end());
    d.max_g = *std::max_element(g.begin(), g.end());
    d.max_dg = *std::max_element(dg.begin(), dg.end());
    d.min_lower_bound_gap = g[0] - std::pow(1.0 - y[0], curve.p());
    d.max_chord_defect = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < y.size(); ++i) {
        d.min_lower_bound_gap = std::min(d.min_lower_bound_gap, g[i] - std::pow(1.0 - y[i], curve.p()));
        if (i == 0 || i + 1 == y.size()) continue;
        const double hm = y[i] - y[i - 1], hp = y[i + 1] - y[i];
        const double chord = (hp * g[i - 1] + hm * g[i + 1]) / (hm + hp);
        d.max_chord_defect = std::max(d.max_chord_defect, chord - g[i]);
        // Second-order divided difference of g' on a non-uniform stencil.
        const double d2 = (hm * hm * dg[i + 1] - hp * hp * dg[i - 1] + (hp * hp - hm * hm) * dg[i]) /
                          (hm * hp * (hm + hp));
        const double residual = h(y[i]) * d2 + (curve.p() - 1.0) * eq.nonlinearity(g[i]);
        d.max_ode_residual = std::max(d.max_ode_residual, std::abs(residual));
    }
    return d;
}

}  // namespace targetcost
