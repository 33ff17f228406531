#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "propcomp/cost_model.hpp"
#include "propcomp/schemes.hpp"
#include "propcomp/verify.hpp"

namespace propcomp {

/// e^(1/e): the largest value of alpha^(1/alpha) over alpha >= 1.
inline constexpr double kAnarchyCeiling = 1.444667861009766;

/// Slack applied to every bound check.
inline constexpr double kBoundSlack = 1e-9;

/// Efficiency of the proportional scheme against both benchmarks.
struct AnarchyReport {
    double s_star = 0.0;
    std::optional<double> s_hat;
    double s_bar = 0.0;
    double anarchy = 0.0;                  // s* / s_bar
    std::optional<double> anarchy_prime;   // s_hat / s_bar
    double dissipation = 0.0;              // sum phi_i(x_bar_i) / M
    std::size_t active_count = 0;
    CheckMap bound_checks;
};

/// Runs all three schemes (piece rate is skipped when a cost is linear) and
/// evaluates the applicable bounds.
AnarchyReport report(const CostProfile& profile);

/// Total equilibrium production cost divided by the prize.
double dissipation(const CostProfile& profile, const EquilibriumSolution& eq);

/**
 * Bounds for ascending linear costs c_1 <= ... <= c_N:
 *   ratio_lower_bound:      c_2 / c_1 < A_N
 *   ratio_upper_bound:      A_N <= 2 c_2 / c_1
 *   mean_cost_upper_bound:  A_N <= sum c_i / ((N - 1) c_1)
 * and, when `dissipation` is given, dissipation_bound:
 * D_N <= (N - 1) / (N alpha) with alpha = 1.
 */
CheckMap check_bounds_linear(std::span<const double> costs_sorted, double anarchy,
                             std::size_t active_count,
                             std::optional<double> dissipation = std::nullopt);

/// Same bounds from summary statistics, for callers that never hold the
/// full sorted cost vector.
CheckMap check_bounds_linear(double c1, double c2, double cost_sum, std::size_t n, double anarchy);

struct AsymptoticTargets {
    double anarchy;        // alpha^(1/alpha)
    double anarchy_prime;  // 1
};

/// Large-N limits of A_N and A'_N for exponent alpha >= 1.
AsymptoticTargets asymptotic_targets(double alpha);

struct SweepRow {
    std::size_t n;
    double s_star;
    std::optional<double> s_hat;
    double s_bar;
    double anarchy;
    std::optional<double> anarchy_prime;
    double dissipation;
};

/// Reports for N identical Power(coefficient, alpha) agents at each size.
std::vector<SweepRow> sweep_identical_power(double alpha, double coefficient,
                                            std::span<const std::size_t> sizes,
                                            double budget = 1.0);

}  // namespace propcomp
