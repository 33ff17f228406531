#include "propcomp/learning.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include <fmt/core.h>

#include "propcomp/errors.hpp"

namespace propcomp {

double StrategyBox::clamp(double x) const { return std::clamp(x, lower, upper); }

LearningConfig make_learning_config(CostProfile profile, StrategyBox box, std::size_t horizon) {
    const std::size_t n = profile.size();
    return LearningConfig{std::move(profile), box, horizon, box.upper,
                          std::vector<double>(n, 0.5 * (box.lower + box.upper)), 256};
}

std::optional<std::string> validate(const LearningConfig& config) {
    const auto& box = config.box;
    if (!(box.lower > 0.0 && box.lower < box.upper)) {
        throw DomainError(fmt::format("strategy box [{}, {}] must satisfy 0 < lower < upper",
                                      box.lower, box.upper));
    }
    if (config.horizon < 1) throw PreconditionError("horizon must be at least 1");
    if (!(config.step_scale > 0.0)) throw DomainError("step scale must be positive");
    if (config.regret_grid < 2) throw PreconditionError("regret grid needs at least two points");
    if (config.initial.size() != config.profile.size()) {
        throw PreconditionError(fmt::format("expected {} initial strategies, got {}",
                                            config.profile.size(), config.initial.size()));
    }
    for (double x : config.initial) {
        if (!box.contains(x)) throw DomainError(fmt::format("initial strategy {} outside the box", x));
    }
    if (config.profile.size() < 2) throw PreconditionError("learning needs at least two agents");

    const auto eq = solve_proportional(config.profile);
    for (double x : eq.production) {
        if (!(x > box.lower && x < box.upper)) {
            return fmt::format("equilibrium output {} is not inside the open box ({}, {})", x,
                               box.lower, box.upper);
        }
    }
    return std::nullopt;
}

std::vector<double> stage_payoffs(const CostProfile& profile, std::span<const double> x) {
    const double s = std::accumulate(x.begin(), x.end(), 0.0);
    std::vector<double> u(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        u[i] = (s > 0.0 ? profile.budget() * x[i] / s : 0.0) - profile[i].value(x[i]);
    }
    return u;
}

std::vector<double> payoff_gradient(const CostProfile& profile, std::span<const double> x) {
    const double s = std::accumulate(x.begin(), x.end(), 0.0);
    if (!(s > 0.0)) throw DomainError("payoff gradient needs positive total output");
    std::vector<double> g(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) {
        g[i] = profile.budget() * (s - x[i]) / (s * s) - profile[i].marginal(x[i]);
    }
    return g;
}

std::vector<double> gradient_step(const CostProfile& profile, const StrategyBox& box, double eta,
                                  std::span<const double> x) {
    const auto g = payoff_gradient(profile, x);
    std::vector<double> next(x.size());
    for (std::size_t i = 0; i < x.size(); ++i) next[i] = box.clamp(x[i] + eta * g[i]);
    return next;
}

std::vector<double> step(const LearningConfig& config, std::span<const double> x, std::size_t t) {
    if (t < 1) throw PreconditionError("steps are numbered from 1");
    const double eta = config.step_scale / std::sqrt(static_cast<double>(t));
    return gradient_step(config.profile, config.box, eta, x);
}

std::span<const double> LearningTrace::strategy_at(std::size_t t) const {
    return std::span<const double>(strategies).subspan((t - 1) * agents, agents);
}

std::span<const double> LearningTrace::payoff_at(std::size_t t) const {
    return std::span<const double>(payoffs).subspan((t - 1) * agents, agents);
}

LearningTrace run(const LearningConfig& config) {
    validate(config);
    const auto& profile = config.profile;
    const std::size_t n = profile.size();
    const std::size_t horizon = config.horizon;
    const double budget = profile.budget();

    std::vector<double> grid(config.regret_grid);
    for (std::size_t k = 0; k < grid.size(); ++k) {
        grid[k] = config.box.lower + (config.box.upper - config.box.lower) *
                                         static_cast<double>(k) /
                                         static_cast<double>(grid.size() - 1);
    }
    std::vector<double> grid_cost(grid.size() * n);
    for (std::size_t i = 0; i < n; ++i) {
        for (std::size_t k = 0; k < grid.size(); ++k) grid_cost[i * grid.size() + k] = profile[i].value(grid[k]);
    }

    LearningTrace trace;
    trace.agents = n;
    trace.steps = horizon;
    trace.strategies.reserve(horizon * n);
    trace.payoffs.reserve(horizon * n);
    std::vector<double> sum(n, 0.0);
    std::vector<double> realized(n, 0.0);
    std::vector<double> fixed_action(grid.size() * n, 0.0);

    std::vector<double> x = config.initial;
    for (std::size_t t = 1; t <= horizon; ++t) {
        const auto u = stage_payoffs(profile, x);
        trace.strategies.insert(trace.strategies.end(), x.begin(), x.end());
        trace.payoffs.insert(trace.payoffs.end(), u.begin(), u.end());

        const double s = std::accumulate(x.begin(), x.end(), 0.0);
        for (std::size_t i = 0; i < n; ++i) {
            sum[i] += x[i];
            realized[i] += u[i];
            const double others = s - x[i];
            double* acc = &fixed_action[i * grid.size()];
            const double* cost = &grid_cost[i * grid.size()];
            for (std::size_t k = 0; k < grid.size(); ++k) {
                acc[k] += budget * grid[k] / (grid[k] + others) - cost[k];
            }
        }
        if (t < horizon) x = step(config, x, t);
    }

    trace.running_average.resize(n);
    trace.regret.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
        trace.running_average[i] = sum[i] / static_cast<double>(horizon);
        const auto first = fixed_action.begin() + static_cast<std::ptrdiff_t>(i * grid.size());
        trace.regret[i] = *std::max_element(first, first + static_cast<std::ptrdiff_t>(grid.size())) -
                          realized[i];
    }
    return trace;
}

std::vector<std::size_t> log_checkpoints(std::size_t horizon) {
    std::vector<std::size_t> points;
    for (std::size_t decade = 1; decade <= horizon; decade *= 10) {
        for (std::size_t m : {1, 2, 5}) {
            if (m * decade <= horizon) points.push_back(m * decade);
        }
        if (decade > horizon / 10) break;
    }
    if (points.empty() || points.back() != horizon) points.push_back(horizon);
    return points;
}

std::vector<Checkpoint> distance_to_equilibrium(const LearningTrace& trace,
                                                const EquilibriumSolution& eq) {
    if (eq.production.size() != trace.agents) {
        throw PreconditionError(fmt::format("trace has {} agents, equilibrium has {}", trace.agents,
                                            eq.production.size()));
    }
    std::vector<Checkpoint> out;
    std::vector<double> sum(trace.agents, 0.0);
    const auto checkpoints = log_checkpoints(trace.steps);
    auto next = checkpoints.begin();
    for (std::size_t t = 1; t <= trace.steps && next != checkpoints.end(); ++t) {
        const auto x = trace.strategy_at(t);
        for (std::size_t i = 0; i < trace.agents; ++i) sum[i] += x[i];
        if (t == *next) {
            double worst = 0.0;
            for (std::size_t i = 0; i < trace.agents; ++i) {
                worst = std::max(worst, std::abs(sum[i] / static_cast<double>(t) - eq.production[i]));
            }
            out.push_back({t, worst});
            ++next;
        }
    }
    return out;
}

}  // namespace propcomp
