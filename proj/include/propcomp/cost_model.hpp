#pragma once

#include <cstddef>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <variant>
#include <vector>

namespace propcomp {

/// c * x^alpha with c > 0, alpha >= 1.
struct PowerCost {
    double coefficient;
    double exponent;
};

/// c * x with c > 0.
struct LinearCost {
    double marginal;
};

/// Caller-supplied smooth convex cost. The derivative must be exact.
struct SmoothCost {
    std::shared_ptr<const std::function<double(double)>> value;
    std::shared_ptr<const std::function<double(double)>> derivative;
};

/**
 * Production cost of one agent: phi(0) = 0, phi' > 0 on (0, inf), phi convex.
 *
 * Power(c, 1) and Linear(c) are interchangeable; every query that cares
 * about linearity (is_linear, linear_marginal) treats them the same way.
 */
class CostFunction {
public:
    using Variant = std::variant<PowerCost, LinearCost, SmoothCost>;

    static CostFunction power(double coefficient, double exponent);
    static CostFunction linear(double marginal);

    /// Midpoint convexity and monotonicity are spot-checked on 32 sample
    /// pairs in (0, check_upper]; violations throw DomainError.
    static CostFunction smooth(std::function<double(double)> value,
                               std::function<double(double)> derivative,
                               double check_upper = 10.0);

    /// phi(x). Throws DomainError for x < 0.
    double value(double x) const;
    /// phi'(x). Throws DomainError for x < 0.
    double marginal(double x) const;

    bool is_linear() const;
    std::optional<double> linear_marginal() const;
    /// Power representation (Linear(c) maps to Power(c, 1)); empty for SmoothCost.
    std::optional<PowerCost> as_power() const;

    /// Smallest x >= 0 with phi'(x) >= level, i.e. the maximizer of
    /// level * x - phi(x). Zero when phi'(0) >= level. Undefined for linear
    /// costs (UnsupportedError).
    double inverse_marginal(double level) const;

    const Variant& variant() const noexcept { return cost_; }

private:
    explicit CostFunction(Variant cost) : cost_(std::move(cost)) {}
    Variant cost_;
};

/// Agent costs plus the manager's budget M.
class CostProfile {
public:
    CostProfile(std::vector<CostFunction> costs, double budget);

    std::size_t size() const noexcept { return costs_.size(); }
    double budget() const noexcept { return budget_; }
    const CostFunction& operator[](std::size_t i) const { return costs_[i]; }
    std::span<const CostFunction> costs() const noexcept { return costs_; }

    bool all_linear() const;
    bool any_linear() const;
    /// Common exponent when every agent is Power/Linear with the same alpha.
    std::optional<double> common_exponent() const;
    /// Marginal costs of an all-linear profile, in agent order.
    std::vector<double> linear_marginals() const;

    static CostProfile identical_power(std::size_t n, double coefficient, double exponent,
                                       double budget);
    static CostProfile linear(std::span<const double> marginals, double budget);

private:
    std::vector<CostFunction> costs_;
    double budget_;
};

/// A * prod r_j^beta_j.
struct CobbDouglas {
    double scale;
    std::vector<double> elasticities;
};

/// A * (sum a_j^rho r_j^rho)^(gamma / rho), rho in (0, 1).
struct GeneralizedCes {
    double scale;
    std::vector<double> weights;
    double returns;
    double substitution;
};

struct ProductionTechnology {
    std::variant<CobbDouglas, GeneralizedCes> form;
    std::vector<double> input_prices;

    std::size_t inputs() const;
    /// sum beta_j <= 1 (Cobb-Douglas) or gamma <= 1 (CES).
    bool decreasing_returns() const;
};

/// phi(x) = min { p . r : F(r) >= x } for Cobb-Douglas F.
CostFunction cost_from_cobb_douglas(const ProductionTechnology& tech);
/// phi(x) = min { p . r : F(r) >= x } for generalized CES F.
CostFunction cost_from_ces(const ProductionTechnology& tech);
/// Dispatches on the technology family.
CostFunction derive_cost(const ProductionTechnology& tech);

}  // namespace propcomp
