#pragma once

// Standard-normal primitives and the conditional-probability level map
// M_t = P(W_T < c | F_t) = Phi((c - W_t) / sqrt(T - t)).

#include <cmath>
#include <limits>
#include <numbers>
#include <string>

#include <boost/math/special_functions/erf.hpp>

#include "targetcost/errors.hpp"

namespace targetcost {

namespace detail {

// Tail clamps keep Phi strictly inside (0, 1) so that Phi^{-1}, logs and h
// never see an exact endpoint coming from an interior state.
inline constexpr double kCdfFloor = std::numeric_limits<double>::min();
inline constexpr double kCdfCeil = 1.0 - std::numeric_limits<double>::epsilon() / 2.0;

}  // namespace detail

/// Phi(z). Absolute error below 1e-15 on finite z; clamped to
/// [DBL_MIN, 1 - 2^-53] in the far tails.
inline double std_normal_cdf(double z) {
    const double v = 0.5 * std::erfc(-z * std::numbers::sqrt2 / 2.0);
    if (v < detail::kCdfFloor) return detail::kCdfFloor;
    if (v > detail::kCdfCeil) return detail::kCdfCeil;
    return v;
}

inline double std_normal_pdf(double z) {
    return std::exp(-0.5 * z * z) * (std::numbers::inv_sqrtpi / std::numbers::sqrt2);
}

/// Phi^{-1}(q) for q strictly inside (0, 1). The upper half is mapped onto the
/// lower half through 1 - q, which is exact for q >= 0.5, so the result is
/// exactly antisymmetric.
inline double std_normal_quantile(double q) {
    if (!(q > 0.0 && q < 1.0)) {
        throw DomainError("std_normal_quantile: level must lie in (0, 1), got " + std::to_string(q));
    }
    if (q > 0.5) return -std_normal_quantile(1.0 - q);
    return -std::numbers::sqrt2 * boost::math::erfc_inv(2.0 * q);
}

/// Diffusion coefficient of the level process: h(y) = exp(-Phi^{-1}(y)^2) / (4 pi).
inline double h(double y) {
    if (!(y > 0.0 && y < 1.0)) {
        throw DomainError("h: level must lie in (0, 1), got " + std::to_string(y));
    }
    const double z = std_normal_quantile(y);
    return std::exp(-z * z) / (4.0 * std::numbers::pi);
}

/// M_t = Phi((c - w) / sqrt(T - t)) for 0 <= t < T. The terminal level
/// 1{w < c} is the caller's business.
inline double martingale_level(double t, double w, double T, double c) {
    if (!(t >= 0.0 && t < T)) {
        throw DomainError("martingale_level: need 0 <= t < T");
    }
    return std_normal_cdf((c - w) / std::sqrt(T - t));
}

}  // namespace targetcost
