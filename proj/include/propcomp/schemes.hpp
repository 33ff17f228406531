#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "propcomp/cost_model.hpp"

namespace propcomp {

enum class Scheme { normative, piece_rate, proportional };

std::string_view to_string(Scheme scheme);

/// Production and payments of one compensation scheme.
struct SchemeOutcome {
    Scheme scheme;
    std::vector<double> production;
    double total = 0.0;
    std::vector<double> rewards;
    /// Normative: the Lagrange multiplier lambda* of the budget constraint.
    /// Piece rate: the unit price mu. Proportional: empty.
    std::optional<double> multiplier;
};

/// Pure-strategy Nash equilibrium of the proportional contest.
struct EquilibriumSolution {
    std::vector<double> production;
    double total = 0.0;
    std::vector<double> shares;
    std::vector<std::size_t> active_set;
};

/// Threshold rewards that implement the cooperative optimum: agent i is paid
/// phi_i(x*_i) once it produces at least x*_i - eps_i.
struct NormativeRewardRule {
    std::vector<double> thresholds;
    std::vector<double> payments;
    std::vector<double> epsilons;

    double reward(std::size_t agent, double output) const;
    /// Total production when every agent meets its threshold exactly.
    double induced_total() const;
};

struct SolveOptions {
    /// Use closed forms for common-exponent power profiles instead of the
    /// generic multiplier search.
    bool closed_forms = true;
};

/// Maximizes total output subject to sum phi_i(x_i) <= M.
SchemeOutcome solve_normative(const CostProfile& profile, SolveOptions options = {});

/// Finds the unit price mu with mu * sum x_i(mu) = M where each agent
/// maximizes mu x - phi(x). Rejects linear costs (UnsupportedError).
SchemeOutcome solve_piece_rate(const CostProfile& profile, SolveOptions options = {});

/// Unique equilibrium of the game with payoffs M x_i / sum x - phi_i(x_i).
/// Needs at least two agents.
EquilibriumSolution solve_proportional(const CostProfile& profile);

/// Equilibrium of an all-linear profile from the active-player count formula.
EquilibriumSolution equilibrium_closed_form_linear(const CostProfile& profile);

NormativeRewardRule build_normative_rewards(const SchemeOutcome& outcome,
                                            std::span<const double> epsilons);

/// Best response to an aggregate s (own output included): the z in [0, s)
/// with s^2 phi'(z) = M (s - z), or 0 when s phi'(0) >= M.
double replacement_output(const CostFunction& cost, double aggregate, double budget);

/// sum_i z_i(s) / s.
double share_sum(const CostProfile& profile, double aggregate);

/// Total output of the cooperative optimum for a common-exponent power
/// profile with alpha > 1:
///   M^(1/alpha) * (sum c_i^(-1/(alpha-1)))^((alpha-1)/alpha).
double normative_total_power(const CostProfile& profile);
/// Piece-rate total for the same class: normative total / alpha^(1/alpha).
double piece_rate_total_power(const CostProfile& profile);

/// Result of the linear active-set scan on ascending costs.
struct LinearActiveSet {
    std::size_t count;     // l
    double cost_sum;       // c_1 + ... + c_l
    double total;          // M (l - 1) / cost_sum
};

/// Number of active players for ascending marginal costs: the first
/// i in {2, ..., N-1} with (c_1 + ... + c_i) / (i - 1) <= c_{i+1}, else N.
LinearActiveSet linear_active_set(std::span<const double> sorted_costs, double budget);

}  // namespace propcomp
