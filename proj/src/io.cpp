#include "propcomp/io.hpp"

#include <fstream>

#include <fmt/core.h>

namespace propcomp {

using nlohmann::json;

namespace {

const json& field(const json& doc, const char* name) {
    if (!doc.is_object() || !doc.contains(name)) {
        throw InputError(fmt::format("missing field '{}'", name));
    }
    return doc.at(name);
}

double number(const json& doc, const char* name) {
    const auto& v = field(doc, name);
    if (!v.is_number()) throw InputError(fmt::format("field '{}' must be a number", name));
    return v.get<double>();
}

std::vector<double> numbers(const json& doc, const char* name) {
    const auto& v = field(doc, name);
    if (!v.is_array()) throw InputError(fmt::format("field '{}' must be an array", name));
    std::vector<double> out;
    for (const auto& x : v) {
        if (!x.is_number()) throw InputError(fmt::format("field '{}' must hold numbers", name));
        out.push_back(x.get<double>());
    }
    return out;
}

std::vector<std::size_t> active_indices(const std::vector<double>& production) {
    std::vector<std::size_t> out;
    for (std::size_t i = 0; i < production.size(); ++i) {
        if (production[i] > 0.0) out.push_back(i);
    }
    return out;
}

CostFunction agent_from_json(const json& agent) {
    const auto& type = field(agent, "type");
    if (!type.is_string()) throw InputError("agent 'type' must be a string");
    const auto name = type.get<std::string>();
    if (name == "power") return CostFunction::power(number(agent, "c"), number(agent, "alpha"));
    if (name == "linear") return CostFunction::linear(number(agent, "c"));
    if (name == "cobb_douglas" || name == "ces") return derive_cost(technology_from_json(agent));
    throw InputError(fmt::format("unknown agent type '{}'", name));
}

}  // namespace

ProductionTechnology technology_from_json(const json& doc) {
    const auto name = field(doc, "type").get<std::string>();
    if (name == "cobb_douglas") {
        return {CobbDouglas{number(doc, "A"), numbers(doc, "beta")}, numbers(doc, "prices")};
    }
    if (name == "ces") {
        return {GeneralizedCes{number(doc, "A"), numbers(doc, "a"), number(doc, "gamma"),
                               number(doc, "rho")},
                numbers(doc, "prices")};
    }
    throw InputError(fmt::format("unknown technology type '{}'", name));
}

CostProfile profile_from_json(const json& doc) {
    const auto& agents = field(doc, "agents");
    if (!agents.is_array()) throw InputError("field 'agents' must be an array");
    std::vector<CostFunction> costs;
    for (const auto& agent : agents) costs.push_back(agent_from_json(agent));
    return CostProfile(std::move(costs), number(doc, "budget"));
}

CostProfile read_profile(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw InputError(fmt::format("cannot open profile '{}'", path.string()));
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::parse_error& e) {
        throw InputError(fmt::format("profile '{}' is not valid JSON: {}", path.string(), e.what()));
    }
    return profile_from_json(doc);
}

json to_json(const CostProfile& profile) {
    json agents = json::array();
    for (const auto& f : profile.costs()) {
        if (const auto c = f.linear_marginal()) {
            agents.push_back({{"type", "linear"}, {"c", *c}});
        } else if (const auto p = f.as_power()) {
            agents.push_back({{"type", "power"}, {"c", p->coefficient}, {"alpha", p->exponent}});
        } else {
            throw UnsupportedError("smooth costs cannot be serialized");
        }
    }
    return {{"budget", profile.budget()}, {"agents", agents}};
}

json to_json(const SchemeOutcome& outcome) {
    json doc{{"scheme", std::string(to_string(outcome.scheme))},
             {"production", outcome.production},
             {"total", outcome.total},
             {"rewards", outcome.rewards},
             {"active_set", active_indices(outcome.production)}};
    doc["multiplier"] = outcome.multiplier ? json(*outcome.multiplier) : json(nullptr);
    return doc;
}

json to_json(const EquilibriumSolution& eq, double budget) {
    std::vector<double> rewards;
    for (double share : eq.shares) rewards.push_back(budget * share);
    return {{"scheme", "proportional"}, {"production", eq.production}, {"total", eq.total},
            {"shares", eq.shares},      {"rewards", rewards},          {"multiplier", nullptr},
            {"active_set", eq.active_set}};
}

json to_json(const AnarchyReport& r) {
    json doc{{"s_star", r.s_star},
             {"s_bar", r.s_bar},
             {"anarchy", r.anarchy},
             {"dissipation", r.dissipation},
             {"active_count", r.active_count},
             {"bound_checks", r.bound_checks}};
    doc["s_hat"] = r.s_hat ? json(*r.s_hat) : json(nullptr);
    doc["anarchy_prime"] = r.anarchy_prime ? json(*r.anarchy_prime) : json(nullptr);
    return doc;
}

SchemeOutcome outcome_from_json(const json& doc) {
    const auto name = field(doc, "scheme").get<std::string>();
    SchemeOutcome out;
    if (name == "normative") {
        out.scheme = Scheme::normative;
    } else if (name == "piece-rate") {
        out.scheme = Scheme::piece_rate;
    } else if (name == "proportional") {
        out.scheme = Scheme::proportional;
    } else {
        throw InputError(fmt::format("unknown scheme '{}'", name));
    }
    out.production = numbers(doc, "production");
    out.total = number(doc, "total");
    out.rewards = numbers(doc, "rewards");
    if (doc.contains("multiplier") && !doc.at("multiplier").is_null()) {
        out.multiplier = number(doc, "multiplier");
    }
    return out;
}

EquilibriumSolution equilibrium_from_json(const json& doc) {
    EquilibriumSolution eq;
    eq.production = numbers(doc, "production");
    eq.total = number(doc, "total");
    eq.shares = numbers(doc, "shares");
    for (const auto& i : field(doc, "active_set")) eq.active_set.push_back(i.get<std::size_t>());
    return eq;
}

std::string format_number(double value) { return fmt::format("{:.17g}", value); }

}  // namespace propcomp
