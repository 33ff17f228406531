#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "propcomp/cost_model.hpp"
#include "propcomp/schemes.hpp"

namespace propcomp {

/// Common strategy interval [lower, upper] with 0 < lower < upper.
struct StrategyBox {
    double lower;
    double upper;

    double clamp(double x) const;
    bool contains(double x) const { return x >= lower && x <= upper; }
};

/// Repeated proportional game with projected gradient ascent,
/// step eta_t = step_scale / sqrt(t).
struct LearningConfig {
    CostProfile profile;
    StrategyBox box;
    std::size_t horizon = 1;
    double step_scale = 0.0;
    std::vector<double> initial;
    std::size_t regret_grid = 256;
};

/// Defaults: step_scale = box.upper, every agent starts at the box midpoint.
LearningConfig make_learning_config(CostProfile profile, StrategyBox box, std::size_t horizon);

/// Throws on an invalid config. Returns a warning when the equilibrium of the
/// profile is not strictly inside the box.
std::optional<std::string> validate(const LearningConfig& config);

/// Stage payoffs M x_i / s - phi_i(x_i).
std::vector<double> stage_payoffs(const CostProfile& profile, std::span<const double> x);

/// d u_i / d x_i = M (s - x_i) / s^2 - phi_i'(x_i).
std::vector<double> payoff_gradient(const CostProfile& profile, std::span<const double> x);

/// Simultaneous projected step x_i + eta * grad_i, clipped to the box.
std::vector<double> gradient_step(const CostProfile& profile, const StrategyBox& box, double eta,
                                  std::span<const double> x);

/// Step t >= 1 of the configured dynamic.
std::vector<double> step(const LearningConfig& config, std::span<const double> x, std::size_t t);

/// Row-major T x N histories.
struct LearningTrace {
    std::size_t agents = 0;
    std::size_t steps = 0;
    std::vector<double> strategies;
    std::vector<double> payoffs;
    std::vector<double> running_average;  // (1/T) sum_t x^t
    std::vector<double> regret;           // R_i(T) against the grid

    std::span<const double> strategy_at(std::size_t t) const;  // t = 1..steps
    std::span<const double> payoff_at(std::size_t t) const;
};

/// Plays `horizon` rounds starting from config.initial (x^1).
LearningTrace run(const LearningConfig& config);

struct Checkpoint {
    std::size_t t;
    double distance;  // sup-norm distance of the running average to the equilibrium
};

/// Checkpoints 1, 2, 5, 10, 20, 50, ... up to and including `horizon`.
std::vector<std::size_t> log_checkpoints(std::size_t horizon);

std::vector<Checkpoint> distance_to_equilibrium(const LearningTrace& trace,
                                                const EquilibriumSolution& eq);

}  // namespace propcomp
