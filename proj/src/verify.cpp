#include "propcomp/verify.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include "propcomp/errors.hpp"

namespace propcomp {

double contest_payoff(const CostFunction& cost, double own, double others, double budget) {
    const double total = own + others;
    const double reward = total > 0.0 ? budget * own / total : 0.0;
    return reward - cost.value(own);
}

double first_order_residual(const CostProfile& profile, const EquilibriumSolution& eq) {
    if (eq.production.size() != profile.size()) {
        throw PreconditionError("equilibrium and profile sizes differ");
    }
    const double budget = profile.budget();
    const double s = eq.total;
    double worst = 0.0;
    for (std::size_t i = 0; i < profile.size(); ++i) {
        const double x = eq.production[i];
        if (x > 0.0) {
            const double lhs = profile[i].marginal(x);
            const double rhs = budget * (s - x) / (s * s);
            worst = std::max(worst, std::abs(lhs - rhs) / std::max(std::abs(lhs), std::abs(rhs)));
        } else {
            const double lhs = profile[i].marginal(0.0);
            const double rhs = budget / s;
            if (lhs < rhs) worst = std::max(worst, (rhs - lhs) / rhs);
        }
    }
    return worst;
}

double max_deviation_gain(const CostProfile& profile, const EquilibriumSolution& eq,
                          std::size_t grid_points) {
    if (grid_points < 2) throw PreconditionError("deviation grid needs at least two points");
    const double budget = profile.budget();
    const double lo = 1e-8;
    const double hi = 10.0 * eq.total;
    const double ratio = std::pow(hi / lo, 1.0 / static_cast<double>(grid_points - 1));

    double worst = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < profile.size(); ++i) {
        const double others = eq.total - eq.production[i];
        const double current = contest_payoff(profile[i], eq.production[i], others, budget);
        double best = contest_payoff(profile[i], 0.0, others, budget);
        double y = lo;
        for (std::size_t k = 0; k < grid_points; ++k, y *= ratio) {
            best = std::max(best, contest_payoff(profile[i], y, others, budget));
        }
        worst = std::max(worst, best - current);
    }
    return worst;
}

CheckMap verify_equilibrium(const CostProfile& profile, const EquilibriumSolution& eq) {
    CheckMap checks;
    const double sum = std::accumulate(eq.production.begin(), eq.production.end(), 0.0);
    const double share_sum = std::accumulate(eq.shares.begin(), eq.shares.end(), 0.0);
    checks["total_matches_production"] = std::abs(sum - eq.total) <= 1e-12 * eq.total;
    checks["shares_sum_to_one"] = std::abs(share_sum - 1.0) <= 1e-10;
    checks["at_least_two_active"] = eq.active_set.size() >= 2;
    checks["first_order_conditions"] = first_order_residual(profile, eq) <= 1e-8;
    checks["no_profitable_deviation"] =
        max_deviation_gain(profile, eq) <= 1e-6 * profile.budget();
    return checks;
}

CheckMap verify_outcome(const CostProfile& profile, const SchemeOutcome& outcome) {
    CheckMap checks;
    const double budget = profile.budget();
    const double sum = std::accumulate(outcome.production.begin(), outcome.production.end(), 0.0);
    const double paid = std::accumulate(outcome.rewards.begin(), outcome.rewards.end(), 0.0);
    checks["total_matches_production"] = std::abs(sum - outcome.total) <= 1e-12 * outcome.total;
    checks["nonnegative_production"] = std::all_of(outcome.production.begin(),
                                                   outcome.production.end(),
                                                   [](double x) { return x >= 0.0; });

    if (outcome.scheme == Scheme::normative) {
        double spent = 0.0;
        for (std::size_t i = 0; i < profile.size(); ++i) spent += profile[i].value(outcome.production[i]);
        checks["rewards_within_budget"] = paid <= budget * (1.0 + 1e-9);
        checks["budget_exhausted"] = std::abs(spent - budget) <= 1e-9 * budget;
        if (outcome.multiplier) {
            // lambda phi'(x) = 1 on the support, lambda phi'(0) >= 1 off it.
            bool kkt = true;
            for (std::size_t i = 0; i < profile.size(); ++i) {
                const double x = outcome.production[i];
                const double scaled = *outcome.multiplier * profile[i].marginal(x);
                kkt = kkt && (x > 0.0 ? std::abs(scaled - 1.0) <= 1e-8 : scaled >= 1.0 - 1e-8);
            }
            checks["optimality_conditions"] = kkt;
        }
    } else if (outcome.scheme == Scheme::piece_rate) {
        checks["rewards_exhaust_budget"] = std::abs(paid - budget) <= 1e-10 * budget;
        if (outcome.multiplier) {
            bool best = true;
            for (std::size_t i = 0; i < profile.size(); ++i) {
                const double x = outcome.production[i];
                const double marginal = profile[i].marginal(x);
                best = best && (x > 0.0 ? std::abs(marginal - *outcome.multiplier) <=
                                              1e-8 * *outcome.multiplier
                                        : marginal >= *outcome.multiplier);
            }
            checks["individually_optimal"] = best;
        }
    } else {
        checks["rewards_exhaust_budget"] = std::abs(paid - budget) <= 1e-9 * budget;
    }
    return checks;
}

}  // namespace propcomp
