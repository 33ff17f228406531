#pragma once

#include <filesystem>
#include <string>

#include <json.hpp>

#include "propcomp/anarchy.hpp"
#include "propcomp/cost_model.hpp"
#include "propcomp/errors.hpp"
#include "propcomp/schemes.hpp"

namespace propcomp {

inline constexpr const char* kToolName = "propcomp";
inline constexpr const char* kVersion = "0.1.0";

/// Malformed input document.
class InputError : public PreconditionError {
public:
    using PreconditionError::PreconditionError;
};

/**
 * Profile document:
 *   { "budget": M,
 *     "agents": [ {"type": "power", "c": .., "alpha": ..},
 *                 {"type": "linear", "c": ..},
 *                 {"type": "cobb_douglas", "A": .., "beta": [..], "prices": [..]},
 *                 {"type": "ces", "A": .., "a": [..], "gamma": .., "rho": .., "prices": [..]} ] }
 * Technology entries are converted to their power cost.
 */
CostProfile profile_from_json(const nlohmann::json& doc);
CostProfile read_profile(const std::filesystem::path& path);

ProductionTechnology technology_from_json(const nlohmann::json& doc);

/// Only power and linear agents can be written back.
nlohmann::json to_json(const CostProfile& profile);
nlohmann::json to_json(const SchemeOutcome& outcome);
nlohmann::json to_json(const EquilibriumSolution& eq, double budget);
nlohmann::json to_json(const AnarchyReport& report);

SchemeOutcome outcome_from_json(const nlohmann::json& doc);
EquilibriumSolution equilibrium_from_json(const nlohmann::json& doc);

/// Decimal, 17 significant digits, '.' separator regardless of locale.
std::string format_number(double value);

}  // namespace propcomp
