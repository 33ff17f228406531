#include "propcomp/anarchy.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <fmt/core.h>

#include "propcomp/errors.hpp"

namespace propcomp {

double dissipation(const CostProfile& profile, const EquilibriumSolution& eq) {
    if (eq.production.size() != profile.size()) {
        throw PreconditionError("equilibrium and profile sizes differ");
    }
    double cost = 0.0;
    for (std::size_t i = 0; i < profile.size(); ++i) cost += profile[i].value(eq.production[i]);
    return cost / profile.budget();
}

CheckMap check_bounds_linear(double c1, double c2, double cost_sum, std::size_t n, double anarchy) {
    const double hi = 1.0 + kBoundSlack;
    const double ratio = c2 / c1;
    CheckMap checks;
    checks["ratio_lower_bound"] = ratio < anarchy * hi;
    checks["ratio_upper_bound"] = anarchy <= 2.0 * ratio * hi;
    checks["mean_cost_upper_bound"] = anarchy <= cost_sum / (static_cast<double>(n - 1) * c1) * hi;
    return checks;
}

CheckMap check_bounds_linear(std::span<const double> costs_sorted, double anarchy,
                             std::size_t active_count, std::optional<double> dissipation) {
    const std::size_t n = costs_sorted.size();
    if (n < 2) throw PreconditionError("linear bounds need at least two agents");
    if (active_count < 2 || active_count > n) {
        throw PreconditionError(fmt::format("active count {} outside [2, {}]", active_count, n));
    }
    const double sum = std::accumulate(costs_sorted.begin(), costs_sorted.end(), 0.0);
    auto checks = check_bounds_linear(costs_sorted[0], costs_sorted[1], sum, n, anarchy);
    if (dissipation) {
        const double bound = static_cast<double>(n - 1) / static_cast<double>(n);
        checks["dissipation_bound"] = *dissipation <= bound * (1.0 + kBoundSlack);
    }
    return checks;
}

AnarchyReport report(const CostProfile& profile) {
    if (profile.size() < 2) throw PreconditionError("price of anarchy needs at least two agents");

    AnarchyReport r;
    r.s_star = solve_normative(profile).total;
    if (!profile.any_linear()) r.s_hat = solve_piece_rate(profile).total;
    const auto eq = profile.all_linear() ? equilibrium_closed_form_linear(profile)
                                         : solve_proportional(profile);
    r.s_bar = eq.total;
    r.anarchy = r.s_star / r.s_bar;
    if (r.s_hat) r.anarchy_prime = *r.s_hat / r.s_bar;
    r.dissipation = dissipation(profile, eq);
    r.active_count = eq.active_set.size();

    r.bound_checks["anarchy_at_least_one"] = r.anarchy >= 1.0 - kBoundSlack;
    r.bound_checks["dissipation_at_most_one"] = r.dissipation <= 1.0 + kBoundSlack;
    if (r.anarchy_prime) {
        r.bound_checks["piece_rate_dominated"] = *r.s_hat <= r.s_star * (1.0 + kBoundSlack);
    }

    const double n = static_cast<double>(profile.size());
    if (profile.all_linear()) {
        auto costs = profile.linear_marginals();
        std::sort(costs.begin(), costs.end());
        for (auto& [name, ok] : check_bounds_linear(costs, r.anarchy, r.active_count, r.dissipation)) {
            r.bound_checks[name] = ok;
        }
    } else if (const auto alpha = profile.common_exponent()) {
        r.bound_checks["dissipation_bound"] =
            r.dissipation <= (n - 1.0) / (n * *alpha) * (1.0 + kBoundSlack);
    }
    return r;
}

AsymptoticTargets asymptotic_targets(double alpha) {
    if (!(alpha >= 1.0) || !std::isfinite(alpha)) {
        throw DomainError(fmt::format("exponent {} is below 1", alpha));
    }
    return {std::pow(alpha, 1.0 / alpha), 1.0};
}

std::vector<SweepRow> sweep_identical_power(double alpha, double coefficient,
                                            std::span<const std::size_t> sizes, double budget) {
    std::vector<SweepRow> rows;
    rows.reserve(sizes.size());
    for (std::size_t n : sizes) {
        const auto r = report(CostProfile::identical_power(n, coefficient, alpha, budget));
        rows.push_back({n, r.s_star, r.s_hat, r.s_bar, r.anarchy, r.anarchy_prime, r.dissipation});
    }
    return rows;
}

}  // namespace propcomp
