#pragma once

// Dynamic programming on a recombining scaled random walk.
//
// The walk takes n steps of +-sqrt(T/n) with probability 1/2. At every node the
// controller moves a fraction a of the remaining gap 1 - x during the next
// step. Because the cost is p-homogeneous in the gap, v(t_k, x, node) =
// (1 - x)^p psi(k, node) and the Bellman step reduces to
//
//     psi(k, j) = min_a  a^p dt^{1-p} + (1 - a)^p E[psi(k+1, child)],
//
// which has a closed-form minimizer. Terminal nodes above the threshold carry
// psi = +inf (the gap must be closed), the rest carry 0.

#include <cmath>
#include <cstddef>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "targetcost/errors.hpp"
#include "targetcost/gaussian.hpp"
#include "targetcost/params.hpp"

namespace targetcost {

inline constexpr double kInfiniteCost = std::numeric_limits<double>::infinity();

struct InnerMin {
    double a_star;
    double cost;
};

/// min over a in [0, 1] of a^p kappa1 + (1 - a)^p kappa2.
///
/// a* = rho / (1 + rho) with rho = (kappa2 / kappa1)^{1/(p-1)}; the minimum is
/// kappa1 kappa2 / (kappa1^{1/(p-1)} + kappa2^{1/(p-1)})^{p-1}. An infinite
/// kappa2 forces a* = 1.
inline InnerMin inner_min(double kappa1, double kappa2, double p) {
    if (!(kappa1 > 0.0) || !std::isfinite(kappa1)) {
        throw DomainError("inner_min: kappa1 must be positive and finite");
    }
    if (!(kappa2 >= 0.0)) throw DomainError("inner_min: kappa2 must be >= 0");
    validate_exponent(p);
    if (std::isinf(kappa2)) return {1.0, kappa1};
    if (kappa2 == 0.0) return {0.0, 0.0};

    const double e = 1.0 / (p - 1.0);
    const double rho = std::pow(kappa2 / kappa1, e);
    const double a = rho / (1.0 + rho);
    const double cost = kappa1 * kappa2 / std::pow(std::pow(kappa1, e) + std::pow(kappa2, e), p - 1.0);
    return {a, cost};
}

enum class TieRule {
    /// Terminal walk value >= c must finish at 1 (conservative on the lattice).
    ConstrainAtThreshold,
    /// Only walk value > c must finish at 1.
    FreeAtThreshold,
};

/// Normalized DP values psi(k, j) for every time step, kept when the whole
/// tree is wanted (diagnostics, invariant tests).
struct OracleTable {
    std::size_t n = 0;
    double T = 1.0;
    double c = 0.0;
    double p = 2.0;
    /// psi[k][j], j = 0..k, walk value (2j - k) sqrt(T / n).
    std::vector<std::vector<double>> psi;

    double walk_value(std::size_t k, std::size_t j) const {
        return (2.0 * static_cast<double>(j) - static_cast<double>(k)) * std::sqrt(T / static_cast<double>(n));
    }
};

namespace detail {

inline void check_dp_inputs(std::size_t n, double T, double p) {
    if (n < 2) throw DomainError("dp_value: need n >= 2 steps");
    if (!(T > 0.0) || !std::isfinite(T)) throw DomainError("dp_value: horizon T must be > 0");
    validate_exponent(p);
    if (n > 50'000'000) throw ResourceError("dp_value: n = " + std::to_string(n) + " is too large");
}

template <class Visitor>
double run_dp(std::size_t n, double T, double c, double p, TieRule tie, Visitor&& visit) {
    check_dp_inputs(n, T, p);
    const double dt = T / static_cast<double>(n);
    const double sqrt_dt = std::sqrt(dt);
    const double kappa1 = std::pow(dt, 1.0 - p);
    if (!std::isfinite(kappa1) || kappa1 <= 0.0) {
        throw ResourceError("dp_value: dt^{1-p} is not representable for n = " + std::to_string(n));
    }

    std::vector<double> next(n + 1), cur(n + 1);
    for (std::size_t j = 0; j <= n; ++j) {
        const double w = (2.0 * static_cast<double>(j) - static_cast<double>(n)) * sqrt_dt;
        const bool binds = tie == TieRule::ConstrainAtThreshold ? w >= c : w > c;
        next[j] = binds ? kInfiniteCost : 0.0;
    }
    visit(n, std::span<const double>(next.data(), n + 1));

    for (std::size_t k = n; k-- > 0;) {
        for (std::size_t j = 0; j <= k; ++j) {
            const double expected = 0.5 * (next[j] + next[j + 1]);
            cur[j] = inner_min(kappa1, expected, p).cost;
        }
        visit(k, std::span<const double>(cur.data(), k + 1));
        std::swap(cur, next);
    }
    return next[0];
}

}  // namespace detail

/// Estimate of v(T, 0, c) from an n-step walk. Multiply by (1 - x)^p for x > 0.
inline double dp_value(std::size_t n, double T, double c, double p,
                       TieRule tie = TieRule::ConstrainAtThreshold) {
    return detail::run_dp(n, T, c, p, tie, [](std::size_t, std::span<const double>) {});
}

/// Full backward table; O(n^2) memory, intended for moderate n.
inline OracleTable dp_table(std::size_t n, double T, double c, double p,
                            TieRule tie = TieRule::ConstrainAtThreshold) {
    OracleTable table{n, T, c, p, {}};
    table.psi.resize(n + 1);
    detail::run_dp(n, T, c, p, tie, [&](std::size_t k, std::span<const double> row) {
        table.psi[k].assign(row.begin(), row.end());
    });
    return table;
}

struct ProfilePoint {
    double y;
    double g;
};

/// g(y) ~ dp_value(n, 1, Phi^{-1}(y), p) at each requested level.
inline std::vector<ProfilePoint> dp_g_profile(std::size_t n, double p, std::span<const double> levels,
                                              TieRule tie = TieRule::ConstrainAtThreshold) {
    std::vector<ProfilePoint> out;
    out.reserve(levels.size());
    for (double y : levels) {
        out.push_back({y, dp_value(n, 1.0, std_normal_quantile(y), p, tie)});
    }
    return out;
}

}  // namespace targetcost
