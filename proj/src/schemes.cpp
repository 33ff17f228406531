#include "propcomp/schemes.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>

#include <fmt/core.h>

#include "propcomp/errors.hpp"
#include "propcomp/roots.hpp"

namespace propcomp {

namespace {

constexpr RootTolerance kOuterTolerance{0.0, 1e-13, 200};
constexpr double kInnerTolerance = 1e-14;  // absolute, in units of the aggregate

double power_weight_sum(const CostProfile& profile, double alpha) {
    double sum = 0.0;
    for (const auto& f : profile.costs()) {
        sum += std::pow(f.as_power()->coefficient, -1.0 / (alpha - 1.0));
    }
    return sum;
}

double require_common_exponent(const CostProfile& profile) {
    const auto alpha = profile.common_exponent();
    if (!alpha) throw PreconditionError("profile is not a common-exponent power profile");
    return *alpha;
}

SchemeOutcome finish(Scheme scheme, std::vector<double> production, std::vector<double> rewards,
                     std::optional<double> multiplier) {
    SchemeOutcome out{scheme, std::move(production), 0.0, std::move(rewards), multiplier};
    out.total = std::accumulate(out.production.begin(), out.production.end(), 0.0);
    return out;
}

SchemeOutcome normative_closed_form(const CostProfile& profile, double alpha) {
    const double total = normative_total_power(profile);
    const double weights = power_weight_sum(profile, alpha);
    std::vector<double> x(profile.size());
    std::vector<double> rewards(profile.size());
    for (std::size_t i = 0; i < profile.size(); ++i) {
        const double c = profile[i].as_power()->coefficient;
        x[i] = total * std::pow(c, -1.0 / (alpha - 1.0)) / weights;
        rewards[i] = profile[i].value(x[i]);
    }
    const double level = profile[0].marginal(x[0]);
    return finish(Scheme::normative, std::move(x), std::move(rewards), 1.0 / level);
}

SchemeOutcome piece_rate_closed_form(const CostProfile& profile, double alpha) {
    const double weights = power_weight_sum(profile, alpha);
    const double mu = std::pow(alpha, 1.0 / alpha) *
                      std::pow(profile.budget() / weights, (alpha - 1.0) / alpha);
    std::vector<double> x(profile.size());
    std::vector<double> rewards(profile.size());
    for (std::size_t i = 0; i < profile.size(); ++i) {
        x[i] = profile[i].inverse_marginal(mu);
        rewards[i] = mu * x[i];
    }
    return finish(Scheme::piece_rate, std::move(x), std::move(rewards), mu);
}

}  // namespace

std::string_view to_string(Scheme scheme) {
    switch (scheme) {
        case Scheme::normative: return "normative";
        case Scheme::piece_rate: return "piece-rate";
        case Scheme::proportional: return "proportional";
    }
    return "unknown";
}

double NormativeRewardRule::reward(std::size_t agent, double output) const {
    return output >= thresholds.at(agent) ? payments.at(agent) : 0.0;
}

double NormativeRewardRule::induced_total() const {
    return std::accumulate(thresholds.begin(), thresholds.end(), 0.0);
}

SchemeOutcome solve_normative(const CostProfile& profile, SolveOptions options) {
    const double budget = profile.budget();
    const std::size_t n = profile.size();

    if (options.closed_forms) {
        if (const auto alpha = profile.common_exponent(); alpha && *alpha > 1.0) {
            return normative_closed_form(profile, *alpha);
        }
    }

    // Cheapest linear agent, lowest index on ties.
    std::optional<std::size_t> cheapest;
    for (std::size_t i = 0; i < n; ++i) {
        const auto c = profile[i].linear_marginal();
        if (c && (!cheapest || *c < *profile[*cheapest].linear_marginal())) cheapest = i;
    }

    // Output of the strictly convex agents at marginal cost level mu = 1 / lambda.
    const auto convex_output = [&](double mu) {
        std::vector<double> x(n, 0.0);
        for (std::size_t i = 0; i < n; ++i) {
            if (!profile[i].is_linear()) x[i] = profile[i].inverse_marginal(mu);
        }
        return x;
    };
    const auto spending = [&](double mu) {
        double used = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            if (!profile[i].is_linear()) used += profile[i].value(profile[i].inverse_marginal(mu));
        }
        return used;
    };
    const auto excess = [&](double mu) { return spending(mu) - budget; };

    double mu = 0.0;
    if (cheapest) {
        const double c_min = *profile[*cheapest].linear_marginal();
        const double used = spending(c_min);
        if (used <= budget) {
            auto x = convex_output(c_min);
            x[*cheapest] = (budget - used) / c_min;
            std::vector<double> rewards(n);
            for (std::size_t i = 0; i < n; ++i) rewards[i] = profile[i].value(x[i]);
            return finish(Scheme::normative, std::move(x), std::move(rewards), 1.0 / c_min);
        }
        // Budget is exhausted by the convex agents before marginal cost reaches c_min.
        double lower = c_min;
        int halvings = 0;
        while (excess(lower) >= 0.0) {
            if (++halvings > 128) throw SolverError("normative multiplier bracket not found", lower, c_min);
            lower *= 0.5;
        }
        mu = solve_increasing(excess, lower, c_min, kOuterTolerance);
    } else {
        const auto [lower, upper] = bracket_positive(excess, 1.0);
        mu = solve_increasing(excess, lower, upper, kOuterTolerance);
    }

    auto x = convex_output(mu);
    std::vector<double> rewards(n);
    for (std::size_t i = 0; i < n; ++i) rewards[i] = profile[i].value(x[i]);
    return finish(Scheme::normative, std::move(x), std::move(rewards), 1.0 / mu);
}

SchemeOutcome solve_piece_rate(const CostProfile& profile, SolveOptions options) {
    if (profile.any_linear()) {
        throw UnsupportedError(
            "piece-rate outputs are not uniquely defined for linear costs");
    }
    if (options.closed_forms) {
        if (const auto alpha = profile.common_exponent(); alpha && *alpha > 1.0) {
            return piece_rate_closed_form(profile, *alpha);
        }
    }

    const double budget = profile.budget();
    const auto payout_excess = [&](double mu) {
        double total = 0.0;
        for (const auto& f : profile.costs()) total += f.inverse_marginal(mu);
        return mu * total - budget;
    };
    const auto [lower, upper] = bracket_positive(payout_excess, 1.0);
    const double mu = solve_increasing(payout_excess, lower, upper, kOuterTolerance);

    std::vector<double> x(profile.size());
    std::vector<double> rewards(profile.size());
    for (std::size_t i = 0; i < profile.size(); ++i) {
        x[i] = profile[i].inverse_marginal(mu);
        rewards[i] = mu * x[i];
    }
    return finish(Scheme::piece_rate, std::move(x), std::move(rewards), mu);
}

double replacement_output(const CostFunction& cost, double aggregate, double budget) {
    const double s = aggregate;
    if (!(s > 0.0)) throw DomainError("aggregate output must be positive");
    if (s * cost.marginal(0.0) >= budget) return 0.0;
    if (const auto c = cost.linear_marginal()) {
        return std::max(0.0, s - *c * s * s / budget);
    }
    // s^2 phi'(z) - M (s - z) is strictly increasing, negative at 0 and
    // positive at s.
    const RootTolerance tol{kInnerTolerance * s, 0.0, 400};
    if (const auto p = cost.as_power()) {
        const double a = s * s * p->exponent * p->coefficient;
        const double k = p->exponent - 1.0;
        return solve_increasing(
            [&](double z) { return a * std::pow(z, k) + budget * z - budget * s; }, 0.0, s, tol);
    }
    return solve_increasing(
        [&](double z) { return s * s * cost.marginal(z) - budget * (s - z); }, 0.0, s, tol);
}

double share_sum(const CostProfile& profile, double aggregate) {
    double sum = 0.0;
    for (const auto& f : profile.costs()) sum += replacement_output(f, aggregate, profile.budget());
    return sum / aggregate;
}

EquilibriumSolution solve_proportional(const CostProfile& profile) {
    if (profile.size() < 2) throw PreconditionError("proportional scheme needs at least two agents");

    const auto excess = [&](double s) { return share_sum(profile, s) - 1.0; };
    // Share sum falls from N > 1 near zero to 0 at infinity.
    const auto [lower, upper] = bracket_positive([&](double s) { return -excess(s); }, 1.0);
    const double s_root = solve_decreasing(excess, lower, upper, kOuterTolerance);

    EquilibriumSolution eq;
    eq.production.reserve(profile.size());
    for (const auto& f : profile.costs()) {
        eq.production.push_back(replacement_output(f, s_root, profile.budget()));
    }
    eq.total = std::accumulate(eq.production.begin(), eq.production.end(), 0.0);
    for (std::size_t i = 0; i < eq.production.size(); ++i) {
        eq.shares.push_back(eq.production[i] / eq.total);
        if (eq.production[i] > 0.0) eq.active_set.push_back(i);
    }
    return eq;
}

LinearActiveSet linear_active_set(std::span<const double> sorted_costs, double budget) {
    const std::size_t n = sorted_costs.size();
    if (n < 2) throw PreconditionError("active-set formula needs at least two agents");

    double sum = sorted_costs[0] + sorted_costs[1];
    std::size_t count = n;
    for (std::size_t i = 2; i < n; ++i) {  // i agents summed; compare with c_{i+1}
        if (sum / static_cast<double>(i - 1) <= sorted_costs[i]) {
            count = i;
            break;
        }
        sum += sorted_costs[i];
    }
    return {count, sum, budget * static_cast<double>(count - 1) / sum};
}

EquilibriumSolution equilibrium_closed_form_linear(const CostProfile& profile) {
    if (profile.size() < 2) throw PreconditionError("proportional scheme needs at least two agents");
    const auto costs = profile.linear_marginals();
    const double budget = profile.budget();

    std::vector<std::size_t> order(costs.size());
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](std::size_t a, std::size_t b) { return costs[a] < costs[b]; });
    std::vector<double> sorted(costs.size());
    std::transform(order.begin(), order.end(), sorted.begin(), [&](std::size_t i) { return costs[i]; });

    const auto active = linear_active_set(sorted, budget);
    const double s = active.total;

    EquilibriumSolution eq;
    eq.production.assign(costs.size(), 0.0);
    for (std::size_t k = 0; k < active.count; ++k) {
        const std::size_t i = order[k];
        eq.production[i] = std::max(0.0, s * (1.0 - costs[i] * s / budget));
    }
    eq.total = s;
    for (std::size_t i = 0; i < costs.size(); ++i) {
        eq.shares.push_back(eq.production[i] / s);
        if (eq.production[i] > 0.0) eq.active_set.push_back(i);
    }
    return eq;
}

NormativeRewardRule build_normative_rewards(const SchemeOutcome& outcome,
                                            std::span<const double> epsilons) {
    if (outcome.scheme != Scheme::normative) {
        throw PreconditionError("reward rule needs a normative outcome");
    }
    const std::size_t n = outcome.production.size();
    if (epsilons.size() != n) {
        throw PreconditionError(fmt::format("expected {} epsilons, got {}", n, epsilons.size()));
    }
    NormativeRewardRule rule;
    for (std::size_t i = 0; i < n; ++i) {
        const double x = outcome.production[i];
        const double eps = epsilons[i];
        if (x > 0.0 ? !(eps > 0.0 && eps < x) : eps != 0.0) {
            throw PreconditionError(
                fmt::format("epsilon {} for agent {} is outside the admissible range for output {}",
                            eps, i, x));
        }
        rule.thresholds.push_back(x - eps);
        rule.payments.push_back(x > 0.0 ? outcome.rewards.at(i) : 0.0);
        rule.epsilons.push_back(eps);
    }
    return rule;
}

double normative_total_power(const CostProfile& profile) {
    const double alpha = require_common_exponent(profile);
    if (alpha == 1.0) {
        const auto c = profile.linear_marginals();
        return profile.budget() / *std::min_element(c.begin(), c.end());
    }
    return std::pow(profile.budget(), 1.0 / alpha) *
           std::pow(power_weight_sum(profile, alpha), (alpha - 1.0) / alpha);
}

double piece_rate_total_power(const CostProfile& profile) {
    const double alpha = require_common_exponent(profile);
    if (alpha == 1.0) throw UnsupportedError("piece-rate total is undefined for linear costs");
    return std::pow(profile.budget() / alpha, 1.0 / alpha) *
           std::pow(power_weight_sum(profile, alpha), (alpha - 1.0) / alpha);
}

}  // namespace propcomp
