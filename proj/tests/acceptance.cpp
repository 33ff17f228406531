// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any failure.

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <functional>
#include <iostream>
#include <numeric>
#include <random>
#include <string>
#include <vector>

#include <fmt/core.h>

#include "oracles.hpp"
#include "propcomp/anarchy.hpp"
#include "propcomp/experiments.hpp"
#include "propcomp/learning.hpp"
#include "propcomp/schemes.hpp"
#include "propcomp/verify.hpp"

using namespace propcomp;

namespace {

struct Outcome {
    bool pass;
    std::string detail;
};

double relative(double a, double b) { return std::abs(a - b) / std::abs(b); }

// Dominance violations seen while running criteria 1-3.
struct Dominance {
    std::size_t instances = 0;
    std::size_t violations = 0;
    void record(double s_bar, std::optional<double> s_hat, double s_star) {
        ++instances;
        if (s_bar > s_star * (1 + 1e-9)) ++violations;
        if (s_hat && *s_hat > s_star * (1 + 1e-9)) ++violations;
    }
};
Dominance dominance;

Outcome power_closed_forms() {
    std::mt19937_64 gen(1001);
    std::uniform_real_distribution<double> expo(1.1, 4.0), coef(0.5, 10.0), budget(0.1, 10.0);
    std::uniform_int_distribution<std::size_t> size(2, 200);
    double worst_normative = 0, worst_piece = 0, worst_identity = 0;
    for (int trial = 0; trial < 200; ++trial) {
        const double alpha = expo(gen);
        const double m = budget(gen);
        std::vector<CostFunction> costs;
        double weight = 0;
        for (std::size_t i = size(gen); i > 0; --i) {
            const double c = coef(gen);
            costs.push_back(CostFunction::power(c, alpha));
            weight += std::pow(c, -1 / (alpha - 1));
        }
        const CostProfile profile(std::move(costs), m);
        const double s_star_formula = std::pow(m, 1 / alpha) * std::pow(weight, (alpha - 1) / alpha);
        const double s_hat_formula = std::pow(m / alpha, 1 / alpha) * std::pow(weight, (alpha - 1) / alpha);

        const double s_star = solve_normative(profile, {false}).total;
        const double s_hat = solve_piece_rate(profile, {false}).total;
        worst_normative = std::max(worst_normative, relative(s_star, s_star_formula));
        worst_piece = std::max(worst_piece, relative(s_hat, s_hat_formula));
        worst_identity = std::max(worst_identity, relative(s_hat * std::pow(alpha, 1 / alpha), s_star));
        dominance.record(solve_proportional(profile).total, s_hat, s_star);
    }
    return {worst_normative <= 1e-8 && worst_piece <= 1e-8 && worst_identity <= 1e-10,
            fmt::format("max rel err s* {:.1e}, s_hat {:.1e}, identity {:.1e}", worst_normative,
                        worst_piece, worst_identity)};
}

Outcome linear_closed_forms() {
    std::mt19937_64 gen(2002);
    std::uniform_int_distribution<std::size_t> size(2, 300);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    double worst = 0;
    std::size_t active_mismatch = 0;
    for (int trial = 0; trial < 500; ++trial) {
        std::vector<double> c(size(gen));
        const int family = trial % 3;
        for (auto& v : c) {
            const double u = unit(gen);
            v = family == 0 ? 1 + 9 * u : family == 1 ? std::exp(2 * (u - 0.5)) : 1 / std::sqrt(u);
        }
        const CostProfile profile = CostProfile::linear(c, 0.1 + 5 * unit(gen));
        const auto closed = equilibrium_closed_form_linear(profile);
        const auto numeric = solve_proportional(profile);
        worst = std::max(worst, relative(numeric.total, closed.total));
        if (numeric.active_set != closed.active_set) ++active_mismatch;
        dominance.record(numeric.total, std::nullopt, solve_normative(profile).total);
    }
    return {worst <= 1e-8 && active_mismatch == 0,
            fmt::format("max rel err s_bar {:.1e}, active-set mismatches {}", worst, active_mismatch)};
}

CostFunction random_cost(std::mt19937_64& gen) {
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    const double c = 0.2 + 5 * unit(gen);
    switch (gen() % 4) {
        case 0:
            return CostFunction::linear(c);
        case 1:
            return CostFunction::power(c, 1.1 + 3 * unit(gen));
        case 2:
            return CostFunction::smooth([c](double x) { return c * std::expm1(x); },
                                        [c](double x) { return c * std::exp(x); });
        default:
            return CostFunction::smooth([c](double x) { return c * (x + x * x * x); },
                                        [c](double x) { return c * (1 + 3 * x * x); });
    }
}

Outcome best_response() {
    std::mt19937_64 gen(3003);
    std::uniform_int_distribution<std::size_t> size(2, 12);
    std::uniform_real_distribution<double> budget(0.1, 10.0);
    double worst_library = 0, worst_oracle = 0;
    for (int trial = 0; trial < 50; ++trial) {
        std::vector<CostFunction> costs;
        for (std::size_t i = size(gen); i > 0; --i) costs.push_back(random_cost(gen));
        const CostProfile profile(std::move(costs), budget(gen));
        const auto eq = solve_proportional(profile);
        const double m = profile.budget();
        worst_library = std::max(worst_library, max_deviation_gain(profile, eq) / m);
        for (std::size_t i = 0; i < profile.size(); ++i) {
            const auto phi = [&, i](double y) { return profile[i].value(y); };
            const double gain = oracle::deviation_gain(phi, eq.production[i], eq.total - eq.production[i], m);
            worst_oracle = std::max(worst_oracle, gain / m);
        }
        std::optional<double> s_hat;
        if (!profile.any_linear()) s_hat = solve_piece_rate(profile).total;
        dominance.record(eq.total, s_hat, solve_normative(profile).total);
    }
    return {worst_library <= 1e-6 && worst_oracle <= 1e-6,
            fmt::format("max gain / M: library grid {:.1e}, refined oracle {:.1e}", worst_library,
                        worst_oracle)};
}

Outcome identical_quadratics() {
    const std::vector<std::size_t> sizes{2, 10, 100, 1000, 10000};
    const auto rows = sweep_identical_power(2.0, 1.0, sizes);
    double worst = 0;
    for (const auto& r : rows) {
        const double n = static_cast<double>(r.n);
        worst = std::max(worst, std::abs(r.anarchy - std::sqrt(2 * n / (n - 1))));
    }
    const double gap = std::abs(rows.back().anarchy - std::sqrt(2.0));
    const double gap_prime = std::abs(*rows.back().anarchy_prime - 1.0);
    return {worst <= 1e-8 && gap < 1e-4 && gap_prime < 1e-4,
            fmt::format("max |A_N - exact| {:.1e}; at N=1e4 |A-sqrt2| {:.1e}, |A'-1| {:.1e}", worst,
                        gap, gap_prime)};
}

Outcome dissipation_limit() {
    const std::vector<std::size_t> sizes{2, 10, 100, 1000, 10000};
    double worst = 0, worst_limit = 0;
    for (double alpha : {1.5, 2.0, 3.0}) {
        const auto rows = sweep_identical_power(alpha, 1.0, sizes);
        for (const auto& r : rows) {
            const double n = static_cast<double>(r.n);
            worst = std::max(worst, std::abs(r.dissipation - (n - 1) / (n * alpha)));
        }
        worst_limit = std::max(worst_limit, std::abs(rows.back().dissipation - 1 / alpha));
    }
    return {worst <= 1e-9 && worst_limit < 1e-4,
            fmt::format("max |D_N - (N-1)/(N alpha)| {:.1e}; max |D_1e4 - 1/alpha| {:.1e}", worst,
                        worst_limit)};
}

Outcome linear_bounds() {
    std::mt19937_64 gen(6006);
    std::uniform_int_distribution<std::size_t> size(2, 1000);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::size_t failures = 0, library_disagreements = 0;
    for (int trial = 0; trial < 1000; ++trial) {
        std::vector<double> c(size(gen));
        for (auto& v : c) {
            const double u = unit(gen);
            switch (trial % 4) {
                case 0: v = 1 + u; break;
                case 1: v = 1 + 9 * u; break;
                case 2: v = 1 + std::exp(std::sqrt(-2 * std::log(u)) * std::cos(6.283185307179586 * unit(gen))); break;
                default: v = 1 + (std::pow(u, -1 / 0.5) - 1); break;
            }
        }
        const auto profile = CostProfile::linear(c, 1.0);
        const double a = solve_normative(profile).total / equilibrium_closed_form_linear(profile).total;
        std::sort(c.begin(), c.end());
        const double ratio = c[1] / c[0];
        const double n = static_cast<double>(c.size());
        const double sum = std::accumulate(c.begin(), c.end(), 0.0);
        const bool ok = ratio < a * (1 + 1e-9) && a <= 2 * ratio * (1 + 1e-9) &&
                        a <= sum / ((n - 1) * c[0]) * (1 + 1e-9);
        if (!ok) ++failures;
        const auto lib = report(profile).bound_checks;
        const bool lib_ok = lib.at("ratio_lower_bound") && lib.at("ratio_upper_bound") && lib.at("mean_cost_upper_bound");
        if (lib_ok != ok) ++library_disagreements;
    }
    return {failures == 0 && library_disagreements == 0,
            fmt::format("{} violations in 1000 instances, {} library disagreements", failures,
                        library_disagreements)};
}

// Published single-sample cells for N = 1e2, 1e3, 1e4, 1e5, columns in the
// order of published_distributions().
constexpr std::array<std::array<double, 6>, 4> kGapTable{{
    {1.3e-1, 5.2e-1, 2.6e-1, 1.1e-1, 2.4e-1, 9.4e-2},
    {4.3e-2, 1.4e-1, 9.6e-2, 4.1e-2, 5.0e-2, 2.7e-2},
    {1.4e-2, 5.1e-2, 5.0e-2, 1.4e-2, 2.0e-2, 8.3e-3},
    {4.3e-3, 1.4e-2, 3.5e-2, 5.3e-3, 6.5e-3, 2.5e-3},
}};
constexpr std::array<std::array<double, 6>, 4> kActiveTable{{
    {1.7e-1, 5.0e-2, 1.1e-1, 2.3e-1, 8.0e-2, 2.2e-1},
    {4.4e-2, 1.7e-2, 3.0e-2, 4.6e-2, 3.6e-2, 6.8e-2},
    {1.4e-2, 4.3e-3, 6.4e-3, 1.7e-2, 1.0e-2, 2.3e-2},
    {4.7e-3, 1.5e-3, 1.0e-3, 4.5e-3, 3.1e-3, 7.9e-3},
}};

Outcome table_reproduction() {
    const auto dists = published_distributions();
    std::size_t out_of_band = 0, non_monotone = 0;
    double worst_factor = 1;
    std::string worst_cell;
    for (std::size_t d = 0; d < dists.size(); ++d) {
        ExperimentSpec spec;
        spec.distribution = dists[d];
        spec.sizes = {100, 1000, 10000, 100000};
        spec.seed = 42;
        spec.replications = 5;
        const auto rows = run_experiment(spec);
        for (std::size_t g = 0; g < rows.size(); ++g) {
            const std::array<std::pair<double, double>, 2> cells{
                {{rows[g].anarchy_minus_one.mean, kGapTable[g][d]},
                 {rows[g].active_proportion.mean, kActiveTable[g][d]}}};
            for (std::size_t k = 0; k < 2; ++k) {
                const double factor = std::max(cells[k].first / cells[k].second, cells[k].second / cells[k].first);
                if (factor > 3) ++out_of_band;
                if (factor > worst_factor) {
                    worst_factor = factor;
                    worst_cell = fmt::format("{} {} N={}", label(dists[d]), k == 0 ? "A_N-1" : "l/N", rows[g].n);
                }
            }
            if (g > 0 && !(rows[g].anarchy_minus_one.mean < rows[g - 1].anarchy_minus_one.mean &&
                           rows[g].active_proportion.mean < rows[g - 1].active_proportion.mean)) {
                ++non_monotone;
            }
        }
    }
    return {out_of_band == 0 && non_monotone == 0,
            fmt::format("{} of 48 cells outside factor 3 (worst {:.2f}x at {}), {} non-decreasing steps",
                        out_of_band, worst_factor, worst_cell, non_monotone)};
}

Outcome learning_convergence() {
    const StrategyBox box{0.05, 2.0};
    double worst_distance = 0, worst_ratio = 1e300;
    for (std::size_t n : {2u, 3u}) {
        const auto profile = CostProfile::identical_power(n, 1.0, 2.0, 1.0);
        const auto eq = solve_proportional(profile);
        const auto long_run = run(make_learning_config(profile, box, 100000));
        for (std::size_t i = 0; i < n; ++i) {
            worst_distance = std::max(worst_distance, std::abs(long_run.running_average[i] - eq.production[i]));
        }
        const auto t2 = run(make_learning_config(profile, box, 100));
        const auto t4 = run(make_learning_config(profile, box, 10000));
        for (std::size_t i = 0; i < n; ++i) {
            worst_ratio = std::min(worst_ratio, (t2.regret[i] / 1e2) / (t4.regret[i] / 1e4));
        }
    }
    return {worst_distance < 1e-2 && worst_ratio >= 3,
            fmt::format("sup distance at T=1e5 {:.1e}; min regret/T drop 1e2->1e4 {:.1f}x", worst_distance,
                        worst_ratio)};
}

Outcome dominance_property() {
    return {dominance.instances > 0 && dominance.violations == 0,
            fmt::format("{} violations over {} instances from criteria 1-3", dominance.violations,
                        dominance.instances)};
}

Outcome cost_derivation() {
    std::mt19937_64 gen(10010);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    double worst = 0;
    for (int trial = 0; trial < 20; ++trial) {
        const std::size_t m = 1 + static_cast<std::size_t>(trial % 3);
        const double scale = 0.5 + 2 * unit(gen);
        std::vector<double> prices(m);
        for (auto& p : prices) p = 0.3 + 3 * unit(gen);
        ProductionTechnology tech;
        std::function<double(std::span<const double>)> produce;
        if (trial % 2 == 0) {
            std::vector<double> beta(m);
            const double total = 0.3 + 0.7 * unit(gen);
            double raw = 0;
            for (auto& b : beta) raw += (b = 0.2 + unit(gen));
            for (auto& b : beta) b *= total / raw;
            tech = {CobbDouglas{scale, beta}, prices};
            produce = [=](std::span<const double> r) { return oracle::cobb_douglas_output(scale, beta, r); };
        } else {
            std::vector<double> a(m);
            for (auto& w : a) w = 0.3 + 2 * unit(gen);
            const double gamma = 0.3 + 0.7 * unit(gen);
            const double rho = 0.1 + 0.8 * unit(gen);
            tech = {GeneralizedCes{scale, a, gamma, rho}, prices};
            produce = [=](std::span<const double> r) { return oracle::ces_output(scale, a, gamma, rho, r); };
        }
        const auto phi = derive_cost(tech);
        for (double x : {0.5, 1.0, 2.0}) {
            const double want = oracle::min_input_cost(produce, tech.input_prices, x, m == 3 ? 24 : 48,
                                                       m == 3 ? 14 : 10);
            worst = std::max(worst, relative(phi.value(x), want));
        }
    }
    return {worst <= 5e-3, fmt::format("max rel deviation from grid oracle {:.1e}", worst)};
}

}  // namespace

int main() {
    struct Criterion {
        int id;
        const char* name;
        double limit_seconds;
        std::function<Outcome()> check;
    };
    const std::vector<Criterion> criteria{
        {1, "power closed-form equivalence", 10, power_closed_forms},
        {2, "linear closed-form equivalence", 30, linear_closed_forms},
        {3, "best-response verification", 60, best_response},
        {4, "identical quadratic limits", 5, identical_quadratics},
        {5, "dissipation limit", 5, dissipation_limit},
        {6, "linear bounds suite", 10, linear_bounds},
        {7, "table reproduction", 300, table_reproduction},
        {8, "learning convergence", 60, learning_convergence},
        {9, "dominance property", 1e300, dominance_property},
        {10, "cost derivation oracle", 30, cost_derivation},
    };
    int failed = 0;
    for (const auto& c : criteria) {
        const auto start = std::chrono::steady_clock::now();
        Outcome outcome{false, ""};
        try {
            outcome = c.check();
        } catch (const std::exception& e) {
            outcome = {false, fmt::format("exception: {}", e.what())};
        }
        const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        const bool in_time = seconds <= c.limit_seconds;
        const bool pass = outcome.pass && in_time;
        if (!pass) ++failed;
        std::cout << fmt::format("[{}] criterion {:>2}: {} - {} ({:.2f}s{})\n", pass ? "PASS" : "FAIL", c.id,
                                 c.name, outcome.detail, seconds, in_time ? "" : ", over time limit")
                  << std::flush;
    }
    std::cout << fmt::format("{} of {} criteria passed\n", criteria.size() - static_cast<std::size_t>(failed),
                             criteria.size());
    return failed == 0 ? 0 : 1;
}
