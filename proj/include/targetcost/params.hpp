#pragma once

#include <cmath>
#include <string>

#include "targetcost/errors.hpp"

namespace targetcost {

/// One instance of the target problem: cost exponent, horizon, start, threshold.
struct Params {
    double p = 2.0;
    double T = 1.0;
    double x = 0.0;
    double c = 0.0;
};

inline void validate_exponent(double p) {
    if (!std::isfinite(p) || !(p > 1.0)) {
        throw DomainError("cost exponent p must be finite and > 1, got " + std::to_string(p));
    }
}

inline void validate(const Params& params) {
    validate_exponent(params.p);
    if (!std::isfinite(params.T) || !(params.T > 0.0)) {
        throw DomainError("horizon T must be finite and > 0, got " + std::to_string(params.T));
    }
    if (!(params.x >= 0.0 && params.x <= 1.0)) {
        throw DomainError("initial state x must lie in [0, 1], got " + std::to_string(params.x));
    }
    if (!std::isfinite(params.c)) {
        throw DomainError("threshold c must be finite");
    }
}

}  // namespace targetcost
