#pragma once

#include <cstddef>
#include <map>
#include <string>

#include "propcomp/cost_model.hpp"
#include "propcomp/schemes.hpp"

namespace propcomp {

/// Named pass/fail results, ordered by name.
using CheckMap = std::map<std::string, bool>;

/// Payoff M x_i / (x_i + others) - phi_i(x_i), with 0/0 = 0.
double contest_payoff(const CostFunction& cost, double own, double others, double budget);

/**
 * Largest relative violation of the equilibrium first-order conditions:
 * phi_i'(x_i) = M (s - x_i) / s^2 for active agents and
 * phi_i'(0) >= M / s for inactive ones (zero when satisfied).
 */
double first_order_residual(const CostProfile& profile, const EquilibriumSolution& eq);

/**
 * Largest payoff gain any agent can get by a unilateral deviation to one of
 * `grid_points` geometrically spaced outputs in [1e-8, 10 s], or to zero.
 */
double max_deviation_gain(const CostProfile& profile, const EquilibriumSolution& eq,
                          std::size_t grid_points = 10'000);

/// Structural and optimality checks on an equilibrium.
CheckMap verify_equilibrium(const CostProfile& profile, const EquilibriumSolution& eq);

/// Budget accounting and optimality checks on a normative or piece-rate outcome.
CheckMap verify_outcome(const CostProfile& profile, const SchemeOutcome& outcome);

}  // namespace propcomp
