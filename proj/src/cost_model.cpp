#include "propcomp/cost_model.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include <fmt/core.h>

#include "propcomp/errors.hpp"
#include "propcomp/roots.hpp"

namespace propcomp {

namespace {

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

void require_nonnegative(double x) {
    if (!(x >= 0.0)) throw DomainError(fmt::format("cost evaluated at negative output {}", x));
}

bool positive_finite(double v) { return v > 0.0 && std::isfinite(v); }

void check_prices(const ProductionTechnology& tech) {
    if (tech.input_prices.size() != tech.inputs() || tech.input_prices.empty()) {
        throw PreconditionError(fmt::format("technology has {} inputs but {} prices", tech.inputs(),
                                            tech.input_prices.size()));
    }
    for (double p : tech.input_prices) {
        if (!positive_finite(p)) throw DomainError(fmt::format("input price {} is not positive", p));
    }
}

}  // namespace

CostFunction CostFunction::power(double coefficient, double exponent) {
    if (!positive_finite(coefficient)) {
        throw DomainError(fmt::format("power cost coefficient {} is not positive", coefficient));
    }
    if (!(exponent >= 1.0) || !std::isfinite(exponent)) {
        throw DomainError(fmt::format("power cost exponent {} is below 1", exponent));
    }
    return CostFunction(PowerCost{coefficient, exponent});
}

CostFunction CostFunction::linear(double marginal) {
    if (!positive_finite(marginal)) {
        throw DomainError(fmt::format("linear marginal cost {} is not positive", marginal));
    }
    return CostFunction(LinearCost{marginal});
}

CostFunction CostFunction::smooth(std::function<double(double)> value,
                                  std::function<double(double)> derivative, double check_upper) {
    if (!value || !derivative) throw PreconditionError("smooth cost needs value and derivative");
    if (!(check_upper > 0.0)) throw DomainError("convexity check range must be positive");
    if (value(0.0) != 0.0) throw DomainError("smooth cost must vanish at zero");

    constexpr int kPairs = 32;
    constexpr double kSlack = 1e-12;
    for (int k = 0; k < kPairs; ++k) {
        // Deterministic low-discrepancy pairs covering (0, check_upper].
        const double u = std::fmod(0.5 + k * 0.6180339887498949, 1.0);
        const double v = std::fmod(0.25 + k * 0.4142135623730951, 1.0);
        double a = check_upper * std::min(u, v);
        double b = check_upper * std::max(u, v);
        if (k == 0) a = 0.0;
        if (b == a) b = check_upper;
        const double fa = value(a);
        const double fb = value(b);
        const double fm = value(0.5 * (a + b));
        const double tol = kSlack * (1.0 + std::abs(fa) + std::abs(fb));
        if (fm > 0.5 * (fa + fb) + tol) {
            throw DomainError(fmt::format("smooth cost fails midpoint convexity on [{}, {}]", a, b));
        }
        if (fb + tol < fa) throw DomainError("smooth cost is decreasing");
        if (!(derivative(b) > 0.0)) throw DomainError("smooth cost derivative is not positive");
    }
    return CostFunction(SmoothCost{
        std::make_shared<const std::function<double(double)>>(std::move(value)),
        std::make_shared<const std::function<double(double)>>(std::move(derivative))});
}

double CostFunction::value(double x) const {
    require_nonnegative(x);
    return std::visit(overloaded{
                          [x](const PowerCost& p) {
                              return p.exponent == 1.0 ? p.coefficient * x
                                                       : p.coefficient * std::pow(x, p.exponent);
                          },
                          [x](const LinearCost& l) { return l.marginal * x; },
                          [x](const SmoothCost& s) { return (*s.value)(x); },
                      },
                      cost_);
}

double CostFunction::marginal(double x) const {
    require_nonnegative(x);
    return std::visit(overloaded{
                          [x](const PowerCost& p) {
                              if (p.exponent == 1.0) return p.coefficient;
                              if (p.exponent == 2.0) return 2.0 * p.coefficient * x;
                              return p.exponent * p.coefficient * std::pow(x, p.exponent - 1.0);
                          },
                          [](const LinearCost& l) { return l.marginal; },
                          [x](const SmoothCost& s) { return (*s.derivative)(x); },
                      },
                      cost_);
}

bool CostFunction::is_linear() const { return linear_marginal().has_value(); }

std::optional<double> CostFunction::linear_marginal() const {
    if (const auto* l = std::get_if<LinearCost>(&cost_)) return l->marginal;
    if (const auto* p = std::get_if<PowerCost>(&cost_); p && p->exponent == 1.0) {
        return p->coefficient;
    }
    return std::nullopt;
}

std::optional<PowerCost> CostFunction::as_power() const {
    if (const auto* p = std::get_if<PowerCost>(&cost_)) return *p;
    if (const auto* l = std::get_if<LinearCost>(&cost_)) return PowerCost{l->marginal, 1.0};
    return std::nullopt;
}

double CostFunction::inverse_marginal(double level) const {
    if (is_linear()) {
        throw UnsupportedError("marginal cost of a linear cost is not invertible");
    }
    if (!(level >= 0.0)) throw DomainError(fmt::format("negative marginal level {}", level));
    if (const auto* p = std::get_if<PowerCost>(&cost_)) {
        return std::pow(level / (p->exponent * p->coefficient), 1.0 / (p->exponent - 1.0));
    }
    if (marginal(0.0) >= level) return 0.0;
    const auto excess = [&](double x) { return marginal(x) - level; };
    double upper = 1.0;
    int doublings = 0;
    while (excess(upper) < 0.0) {
        if (++doublings > 128) {
            throw SolverError("marginal cost never reaches the requested level", 0.0, upper);
        }
        upper *= 2.0;
    }
    return solve_increasing(excess, 0.0, upper, {0.0, 1e-15, 400});
}

CostProfile::CostProfile(std::vector<CostFunction> costs, double budget)
    : costs_(std::move(costs)), budget_(budget) {
    if (costs_.empty()) throw PreconditionError("cost profile needs at least one agent");
    if (!positive_finite(budget_)) {
        throw DomainError(fmt::format("budget {} is not positive", budget_));
    }
}

bool CostProfile::all_linear() const {
    return std::all_of(costs_.begin(), costs_.end(), [](const auto& f) { return f.is_linear(); });
}

bool CostProfile::any_linear() const {
    return std::any_of(costs_.begin(), costs_.end(), [](const auto& f) { return f.is_linear(); });
}

std::optional<double> CostProfile::common_exponent() const {
    std::optional<double> alpha;
    for (const auto& f : costs_) {
        const auto p = f.as_power();
        if (!p) return std::nullopt;
        if (alpha && *alpha != p->exponent) return std::nullopt;
        alpha = p->exponent;
    }
    return alpha;
}

std::vector<double> CostProfile::linear_marginals() const {
    std::vector<double> out;
    out.reserve(costs_.size());
    for (const auto& f : costs_) {
        const auto c = f.linear_marginal();
        if (!c) throw PreconditionError("profile contains a nonlinear cost");
        out.push_back(*c);
    }
    return out;
}

CostProfile CostProfile::identical_power(std::size_t n, double coefficient, double exponent,
                                         double budget) {
    return CostProfile(std::vector<CostFunction>(n, CostFunction::power(coefficient, exponent)),
                       budget);
}

CostProfile CostProfile::linear(std::span<const double> marginals, double budget) {
    std::vector<CostFunction> costs;
    costs.reserve(marginals.size());
    for (double c : marginals) costs.push_back(CostFunction::linear(c));
    return CostProfile(std::move(costs), budget);
}

std::size_t ProductionTechnology::inputs() const {
    return std::visit(overloaded{
                          [](const CobbDouglas& cd) { return cd.elasticities.size(); },
                          [](const GeneralizedCes& ces) { return ces.weights.size(); },
                      },
                      form);
}

bool ProductionTechnology::decreasing_returns() const {
    return std::visit(overloaded{
                          [](const CobbDouglas& cd) {
                              return std::accumulate(cd.elasticities.begin(),
                                                     cd.elasticities.end(), 0.0) <= 1.0;
                          },
                          [](const GeneralizedCes& ces) { return ces.returns <= 1.0; },
                      },
                      form);
}

CostFunction cost_from_cobb_douglas(const ProductionTechnology& tech) {
    const auto* cd = std::get_if<CobbDouglas>(&tech.form);
    if (!cd) throw PreconditionError("technology is not Cobb-Douglas");
    if (!positive_finite(cd->scale)) throw DomainError("Cobb-Douglas scale must be positive");
    check_prices(tech);

    double beta_sum = 0.0;
    double log_prod = 0.0;  // log prod (p_j / beta_j)^beta_j
    for (std::size_t j = 0; j < cd->elasticities.size(); ++j) {
        const double beta = cd->elasticities[j];
        if (!positive_finite(beta)) throw DomainError(fmt::format("elasticity {} is not positive", beta));
        beta_sum += beta;
        log_prod += beta * std::log(tech.input_prices[j] / beta);
    }
    if (beta_sum > 1.0) {
        throw ReturnsToScaleError(
            fmt::format("elasticities sum to {} > 1 (increasing returns to scale)", beta_sum));
    }
    const double alpha = 1.0 / beta_sum;
    const double c = std::exp(alpha * log_prod - alpha * std::log(cd->scale)) / alpha;
    return CostFunction::power(c, alpha);
}

CostFunction cost_from_ces(const ProductionTechnology& tech) {
    const auto* ces = std::get_if<GeneralizedCes>(&tech.form);
    if (!ces) throw PreconditionError("technology is not generalized CES");
    if (!positive_finite(ces->scale)) throw DomainError("CES scale must be positive");
    if (!(ces->substitution > 0.0 && ces->substitution < 1.0)) {
        throw DomainError(fmt::format("CES substitution {} is outside (0, 1)", ces->substitution));
    }
    if (!positive_finite(ces->returns)) throw DomainError("CES returns parameter must be positive");
    if (ces->returns > 1.0) {
        throw ReturnsToScaleError(
            fmt::format("CES returns {} > 1 (increasing returns to scale)", ces->returns));
    }
    check_prices(tech);

    const double rho = ces->substitution;
    const double q = rho / (1.0 - rho);
    double sum = 0.0;
    for (std::size_t j = 0; j < ces->weights.size(); ++j) {
        const double a = ces->weights[j];
        if (!positive_finite(a)) throw DomainError(fmt::format("CES weight {} is not positive", a));
        sum += std::pow(a / tech.input_prices[j], q);
    }
    const double c = std::pow(ces->scale, -1.0 / ces->returns) * std::pow(sum, -1.0 / q);
    return CostFunction::power(c, 1.0 / ces->returns);
}

CostFunction derive_cost(const ProductionTechnology& tech) {
    return std::holds_alternative<CobbDouglas>(tech.form) ? cost_from_cobb_douglas(tech)
                                                          : cost_from_ces(tech);
}

}  // namespace propcomp
