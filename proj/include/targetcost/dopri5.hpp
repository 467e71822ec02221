#pragma once

// Adaptive Dormand-Prince 5(4) integrator for small fixed-size systems.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>

namespace targetcost {

template <std::size_t N>
using OdeState = std::array<double, N>;

struct StepControl {
    double atol = 1e-10;
    double rtol = 1e-9;
    double initial_step = 1e-3;
    double min_step = 1e-14;
};

enum class OdeStatus { Completed, Stopped, StepUnderflow };

struct OdeReport {
    OdeStatus status = OdeStatus::Completed;
    double x = 0.0;
    std::size_t accepted = 0;
    std::size_t rejected = 0;
};

/// Integrate y' = rhs(x, y) from x0 to x1 (either direction).
///
/// `max_step(x)` caps the step magnitude at the current abscissa.
/// `observer(x, y)` runs after every accepted step and returns false to stop.
template <std::size_t N, class Rhs, class MaxStep, class Observer>
OdeReport dopri5(Rhs&& rhs, double x0, double x1, OdeState<N>& y, const StepControl& ctl,
                 MaxStep&& max_step, Observer&& observer) {
    constexpr double c2 = 1.0 / 5, c3 = 3.0 / 10, c4 = 4.0 / 5, c5 = 8.0 / 9;
    constexpr double a21 = 1.0 / 5;
    constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
    constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
    constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561,
                     a54 = -212.0 / 729;
    constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247,
                     a64 = 49.0 / 176, a65 = -5103.0 / 18656;
    constexpr double b1 = 35.0 / 384, b3 = 500.0 / 1113, b4 = 125.0 / 192,
                     b5 = -2187.0 / 6784, b6 = 11.0 / 84;
    constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920,
                     e5 = -17253.0 / 339200, e6 = 22.0 / 525, e7 = -1.0 / 40;

    OdeReport report;
    report.x = x0;
    if (x0 == x1) return report;

    const double dir = x1 > x0 ? 1.0 : -1.0;
    double x = x0;
    double step = std::min(ctl.initial_step, std::abs(x1 - x0));

    OdeState<N> k1 = rhs(x, y), k2, k3, k4, k5, k6, k7, tmp, ynew;

    while (dir * (x1 - x) > 0.0) {
        step = std::min(step, max_step(x));
        const double remaining = std::abs(x1 - x);
        bool last = false;
        if (step >= remaining) {
            step = remaining;
            last = true;
        }
        if (step < ctl.min_step) {
            report.status = OdeStatus::StepUnderflow;
            report.x = x;
            return report;
        }
        const double hs = dir * step;

        for (std::size_t i = 0; i < N; ++i) tmp[i] = y[i] + hs * a21 * k1[i];
        k2 = rhs(x + c2 * hs, tmp);
        for (std::size_t i = 0; i < N; ++i) tmp[i] = y[i] + hs * (a31 * k1[i] + a32 * k2[i]);
        k3 = rhs(x + c3 * hs, tmp);
        for (std::size_t i = 0; i < N; ++i)
            tmp[i] = y[i] + hs * (a41 * k1[i] + a42 * k2[i] + a43 * k3[i]);
        k4 = rhs(x + c4 * hs, tmp);
        for (std::size_t i = 0; i < N; ++i)
            tmp[i] = y[i] + hs * (a51 * k1[i] + a52 * k2[i] + a53 * k3[i] + a54 * k4[i]);
        k5 = rhs(x + c5 * hs, tmp);
        for (std::size_t i = 0; i < N; ++i)
            tmp[i] = y[i] + hs * (a61 * k1[i] + a62 * k2[i] + a63 * k3[i] + a64 * k4[i] +
                                  a65 * k5[i]);
        const double xnew = last ? x1 : x + hs;
        k6 = rhs(xnew, tmp);
        for (std::size_t i = 0; i < N; ++i)
            ynew[i] = y[i] + hs * (b1 * k1[i] + b3 * k3[i] + b4 * k4[i] + b5 * k5[i] + b6 * k6[i]);
        k7 = rhs(xnew, ynew);

        double err = 0.0;
        for (std::size_t i = 0; i < N; ++i) {
            const double ei = hs * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] +
                                    e6 * k6[i] + e7 * k7[i]);
            const double scale = ctl.atol + ctl.rtol * std::max(std::abs(y[i]), std::abs(ynew[i]));
            err = std::max(err, std::abs(ei) / scale);
        }
        if (!std::isfinite(err)) err = 1e10;

        if (err <= 1.0) {
            x = xnew;
            y = ynew;
            k1 = k7;
            ++report.accepted;
            if (!observer(x, static_cast<const OdeState<N>&>(y))) {
                report.status = OdeStatus::Stopped;
                report.x = x;
                return report;
            }
            if (last) break;
            const double factor = err == 0.0 ? 5.0 : std::clamp(0.9 * std::pow(err, -0.2), 0.2, 5.0);
            step *= factor;
        } else {
            ++report.rejected;
            step *= std::max(0.2, 0.9 * std::pow(err, -0.25));
        }
    }
    report.x = x;
    return report;
}

}  // namespace targetcost
