#pragma once

#include <algorithm>
#include <cmath>
#include <string>

#include "propcomp/errors.hpp"

namespace propcomp {

struct RootTolerance {
    double absolute = 0.0;
    double relative = 1e-13;
    int max_iterations = 200;
};

/**
 * Root of a nondecreasing function on a bracket [lower, upper] with
 * f(lower) <= 0 <= f(upper).
 *
 * Illinois-modified regula falsi, falling back to bisection whenever two
 * consecutive steps fail to halve the bracket. Terminates when the bracket is
 * narrower than max(absolute, relative * max(|lower|, |upper|)) or when no
 * representable point remains strictly inside it.
 *
 * Throws SolverError if the bracket is invalid or the iteration cap is hit.
 */
template <typename F>
double solve_increasing(F&& f, double lower, double upper, const RootTolerance& tol = {}) {
    if (!(lower <= upper)) {
        throw SolverError("root bracket is empty", lower, upper);
    }
    double f_lo = f(lower);
    double f_hi = f(upper);
    if (f_lo == 0.0) return lower;
    if (f_hi == 0.0) return upper;
    if (f_lo > 0.0 || f_hi < 0.0 || std::isnan(f_lo) || std::isnan(f_hi)) {
        throw SolverError("function does not change sign on the bracket", lower, upper);
    }

    int retained = 0;  // +1: lower endpoint kept last step, -1: upper kept
    int slow_steps = 0;
    double width = upper - lower;

    for (int iter = 0; iter < tol.max_iterations; ++iter) {
        const double scale = std::max(std::abs(lower), std::abs(upper));
        if (upper - lower <= std::max(tol.absolute, tol.relative * scale)) {
            return -f_lo < f_hi ? lower : upper;
        }

        double x;
        if (slow_steps >= 2) {
            x = lower + 0.5 * (upper - lower);
            slow_steps = 0;
        } else {
            x = (lower * f_hi - upper * f_lo) / (f_hi - f_lo);
            if (!(x > lower && x < upper)) x = lower + 0.5 * (upper - lower);
        }
        if (!(x > lower && x < upper)) {
            // Bracket endpoints are adjacent doubles.
            return -f_lo < f_hi ? lower : upper;
        }

        const double fx = f(x);
        if (fx == 0.0) return x;
        if (fx < 0.0) {
            lower = x;
            f_lo = fx;
            if (retained == -1) f_hi *= 0.5;
            retained = -1;
        } else {
            upper = x;
            f_hi = fx;
            if (retained == +1) f_lo *= 0.5;
            retained = +1;
        }

        const double new_width = upper - lower;
        slow_steps = new_width > 0.5 * width ? slow_steps + 1 : 0;
        width = new_width;
    }
    throw SolverError("root finder did not converge after " + std::to_string(tol.max_iterations) +
                          " iterations",
                      lower, upper);
}

/// Same contract as solve_increasing for a nonincreasing function.
template <typename F>
double solve_decreasing(F&& f, double lower, double upper, const RootTolerance& tol = {}) {
    return solve_increasing([&](double x) { return -f(x); }, lower, upper, tol);
}

/**
 * Geometric bracket search on (0, inf) for a nondecreasing f: starting at
 * `start`, halves the lower end until f(lower) < 0 and doubles the upper end
 * until f(upper) > 0. Returns {lower, upper}.
 */
template <typename F>
std::pair<double, double> bracket_positive(F&& f, double start, int max_doublings = 128) {
    double lower = start;
    double upper = start;
    int n = 0;
    while (f(lower) >= 0.0) {
        if (++n > max_doublings) throw SolverError("lower bracket not found", lower, upper);
        upper = lower;
        lower *= 0.5;
    }
    n = 0;
    while (f(upper) <= 0.0) {
        if (++n > max_doublings) throw SolverError("upper bracket not found", lower, upper);
        lower = upper;
        upper *= 2.0;
    }
    return {lower, upper};
}

}  // namespace propcomp
