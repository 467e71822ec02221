#pragma once

// Exponential running cost e^{lam |u|} - 1 with the same target constraint.
// The value is T (e^{lam (1-x)^+ / T} - 1), attained by the constant rate
// (1-x)^+ / T, and the lower bound comes from the martingale family
//
//     zeta_t = n^{-2/3} / (T + r - t)^{1 - 1/n},   r = n^{-n}.

#include <algorithm>
#include <cmath>
#include <limits>
#include <span>
#include <vector>

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include "targetcost/errors.hpp"
#include "targetcost/gaussian.hpp"

namespace targetcost {

namespace detail {

inline void check_exp_inputs(double T, double lam) {
    if (!(T > 0.0) || !std::isfinite(T)) throw DomainError("horizon T must be > 0");
    if (!(lam > 0.0) || !std::isfinite(lam)) throw DomainError("rate lam must be > 0");
}

}  // namespace detail

inline double exp_value(double T, double x, double lam) {
    detail::check_exp_inputs(T, lam);
    const double gap = std::max(1.0 - x, 0.0);
    return T * std::expm1(lam * gap / T);
}

inline double exp_optimal_control(double T, double x) {
    if (!(T > 0.0) || !std::isfinite(T)) throw DomainError("horizon T must be > 0");
    return std::max(1.0 - x, 0.0) / T;
}

/// Trapezoid rule for int_0^T (e^{lam u} - 1) dt, u sampled on a uniform grid
/// of profile.size() points including both ends.
inline double exp_cost_of_profile(std::span<const double> profile, double T, double lam) {
    detail::check_exp_inputs(T, lam);
    if (profile.size() < 2) throw DomainError("profile needs at least two grid points");
    double sum = 0.0;
    for (std::size_t i = 0; i < profile.size(); ++i) {
        const double u = profile[i];
        if (!(u >= 0.0) || !std::isfinite(u)) throw DomainError("profile values must be finite and >= 0");
        const double weight = (i == 0 || i + 1 == profile.size()) ? 0.5 : 1.0;
        sum += weight * std::expm1(lam * u);
    }
    return sum * T / static_cast<double>(profile.size() - 1);
}

/// Trapezoid integral of a profile on the same grid; the feasibility budget.
inline double profile_integral(std::span<const double> profile, double T) {
    if (profile.size() < 2) throw DomainError("profile needs at least two grid points");
    double sum = 0.0;
    for (std::size_t i = 0; i < profile.size(); ++i) {
        sum += (i == 0 || i + 1 == profile.size() ? 0.5 : 1.0) * profile[i];
    }
    return sum * T / static_cast<double>(profile.size() - 1);
}

struct DualityWitness {
    int n = 0;
    double I_n = 0.0;
    double mass = 0.0;
    double entropy = 0.0;
};

/// ln r with r = n^{-n}. The witness quantities are evaluated from ln r so
/// that no floor is needed once n^{-n} leaves the double range (n >= 144).
inline double witness_log_offset(int n) {
    return -static_cast<double>(n) * std::log(static_cast<double>(n));
}

/// int_0^T zeta_t dt = n^{1/3} [(T + r)^{1/n} - r^{1/n}], with r^{1/n} = 1/n.
inline double witness_drift_integral(int n, double T) {
    const double r = std::exp(witness_log_offset(n));
    const double inv = 1.0 / n;
    return std::cbrt(static_cast<double>(n)) * (std::pow(T, inv) * std::exp(std::log1p(r / T) * inv) - inv);
}

/// (1/2) int_0^T zeta_t^2 (T - t) dt by adaptive Gauss-Kronrod in s = -ln(T - t).
/// The integrand concentrates at scales down to r, so the log variable is
/// what makes the quadrature see it.
inline double witness_entropy(int n, double T, double rel_tol = 1e-12) {
    const double log_r = witness_log_offset(n);
    const double expo = -2.0 + 2.0 / n;
    // tau = e^{-s}: tau^2 (tau + r)^expo ds, evaluated in logs.
    auto f = [&](double s) {
        const double log_tau = -s;
        const double hi = std::max(log_tau, log_r), lo = std::min(log_tau, log_r);
        const double log_sum = hi + std::log1p(std::exp(lo - hi));
        return std::exp(2.0 * log_tau + expo * log_sum);
    };
    const double s_lo = -std::log(T);
    const double s_mid = -log_r;
    const double s_hi = s_mid + 40.0;
    using Quad = boost::math::quadrature::gauss_kronrod<double, 31>;
    double err_a = 0.0, err_b = 0.0;
    const double a = s_mid > s_lo ? Quad::integrate(f, s_lo, s_mid, 30, rel_tol, &err_a) : 0.0;
    const double b = Quad::integrate(f, std::max(s_lo, s_mid), s_hi, 30, rel_tol, &err_b);
    const double scale = std::pow(static_cast<double>(n), -4.0 / 3.0);
    return 0.5 * scale * (a + b);
}

inline DualityWitness duality_witness(int n, double T, double c) {
    if (n < 2) throw DomainError("duality_witness: need n >= 2");
    if (!(T > 0.0) || !std::isfinite(T)) throw DomainError("duality_witness: horizon T must be > 0");
    if (std::isnan(c)) throw DomainError("duality_witness: threshold c is NaN");
    DualityWitness w;
    w.n = n;
    w.I_n = witness_drift_integral(n, T);
    w.mass = 1.0 - std_normal_cdf((c - w.I_n) / std::sqrt(T));
    w.entropy = witness_entropy(n, T);
    return w;
}

/// Lower bound T e^{-lam x / T} exp((lam mass - entropy) / T) on w + T.
inline double duality_lower_bound(const DualityWitness& w, double T, double x, double lam) {
    detail::check_exp_inputs(T, lam);
    return T * std::exp(-lam * x / T) * std::exp((lam * w.mass - w.entropy) / T);
}

/// 1 - bound / (w + T); nonnegative when the bound holds.
inline double duality_gap(const DualityWitness& w, double T, double x, double lam) {
    return 1.0 - duality_lower_bound(w, T, x, lam) / (exp_value(T, x, lam) + T);
}

inline std::vector<int> default_witness_sequence() { return {4, 8, 16, 32, 64}; }

}  // namespace targetcost
