#include "propcomp/cli.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <numeric>
#include <optional>

#include <CLI11.hpp>
#include <fmt/core.h>
#include <json.hpp>

#include "propcomp/anarchy.hpp"
#include "propcomp/errors.hpp"
#include "propcomp/experiments.hpp"
#include "propcomp/io.hpp"
#include "propcomp/learning.hpp"
#include "propcomp/schemes.hpp"
#include "propcomp/verify.hpp"

namespace propcomp::cli {

namespace {

using nlohmann::json;

/// Bad flag value; the message names the flag.
class UsageError : public std::invalid_argument {
public:
    UsageError(const std::string& flag, const std::string& what)
        : std::invalid_argument(flag + ": " + what) {}
};

std::vector<std::string> split(const std::string& text, char sep) {
    std::vector<std::string> parts;
    std::size_t start = 0;
    while (true) {
        const auto pos = text.find(sep, start);
        parts.push_back(text.substr(start, pos - start));
        if (pos == std::string::npos) break;
        start = pos + 1;
    }
    return parts;
}

double parse_double(const std::string& flag, const std::string& text) {
    std::size_t used = 0;
    double v = 0.0;
    try {
        v = std::stod(text, &used);
    } catch (const std::exception&) {
        throw UsageError(flag, fmt::format("'{}' is not a number", text));
    }
    if (used != text.size() || !std::isfinite(v)) {
        throw UsageError(flag, fmt::format("'{}' is not a number", text));
    }
    return v;
}

std::vector<std::size_t> parse_sizes(const std::string& flag, const std::string& text) {
    std::vector<std::size_t> sizes;
    for (const auto& part : split(text, ',')) {
        const double v = parse_double(flag, part);
        if (v < 2.0 || v != std::floor(v) || v > 1e12) {
            throw UsageError(flag, fmt::format("'{}' is not an integer >= 2", part));
        }
        sizes.push_back(static_cast<std::size_t>(v));
    }
    return sizes;
}

StrategyBox parse_box(const std::string& flag, const std::string& text) {
    const auto parts = split(text, ',');
    if (parts.size() != 2) throw UsageError(flag, "expected lower,upper");
    StrategyBox box{parse_double(flag, parts[0]), parse_double(flag, parts[1])};
    if (!(box.lower > 0.0 && box.lower < box.upper)) {
        throw UsageError(flag, "box must satisfy 0 < lower < upper");
    }
    return box;
}

/// --out file if given, else the fallback stream.
class Sink {
public:
    Sink(const std::string& path, std::ostream& fallback) : stream_(&fallback) {
        if (!path.empty()) {
            file_.open(path);
            if (!file_) throw UsageError("--out", fmt::format("cannot open '{}' for writing", path));
            stream_ = &file_;
        }
    }
    std::ostream& operator*() { return *stream_; }

private:
    std::ofstream file_;
    std::ostream* stream_;
};

void csv_preamble(std::ostream& os, const json& config) {
    os << "# " << kToolName << ' ' << kVersion << '\n' << "# config: " << config.dump() << '\n';
}

json stamped(json doc, const json& config) {
    doc["tool"] = kToolName;
    doc["version"] = kVersion;
    doc["config"] = config;
    return doc;
}

std::string optional_number(const std::optional<double>& v) {
    return v ? format_number(*v) : std::string();
}

std::string quoted(const std::string& s) { return '"' + s + '"'; }

// solve ---------------------------------------------------------------------

struct SolveArgs {
    std::string scheme;
    std::string profile;
    std::string out;
};

void run_solve(const SolveArgs& a, std::ostream& out) {
    const auto profile = read_profile(a.profile);
    const json config{{"command", "solve"}, {"scheme", a.scheme}, {"profile_path", a.profile},
                      {"profile", to_json(profile)}};
    json doc;
    if (a.scheme == "proportional" || a.scheme == "linear-closed-form") {
        const auto eq = a.scheme == "proportional" ? solve_proportional(profile)
                                                   : equilibrium_closed_form_linear(profile);
        doc = to_json(eq, profile.budget());
        doc["checks"] = verify_equilibrium(profile, eq);
    } else {
        const auto outcome =
            a.scheme == "normative" ? solve_normative(profile) : solve_piece_rate(profile);
        doc = to_json(outcome);
        doc["checks"] = verify_outcome(profile, outcome);
    }
    Sink sink(a.out, out);
    *sink << stamped(std::move(doc), config).dump(2) << '\n';
}

// anarchy / sweep -----------------------------------------------------------

struct AnarchyArgs {
    std::string profile;
    bool sweep = false;
    double alpha = 2.0;
    double coefficient = 1.0;
    std::string sizes = "2,10,100,1000";
    double budget = 1.0;
    std::string out;
};

void write_sweep(std::ostream& os, const std::vector<SweepRow>& rows) {
    os << "N,sStar,sHat,sBar,A_N,A_N_prime,D_N\n";
    for (const auto& r : rows) {
        os << r.n << ',' << format_number(r.s_star) << ',' << optional_number(r.s_hat) << ','
           << format_number(r.s_bar) << ',' << format_number(r.anarchy) << ','
           << optional_number(r.anarchy_prime) << ',' << format_number(r.dissipation) << '\n';
    }
}

void run_anarchy(const AnarchyArgs& a, std::ostream& out) {
    if (a.sweep) {
        if (!(a.alpha >= 1.0)) throw UsageError("--alpha", "exponent must be at least 1");
        if (!(a.coefficient > 0.0)) throw UsageError("--c", "coefficient must be positive");
        if (!(a.budget > 0.0)) throw UsageError("--budget", "budget must be positive");
        const auto sizes = parse_sizes("--n", a.sizes);
        const auto rows = sweep_identical_power(a.alpha, a.coefficient, sizes, a.budget);
        Sink sink(a.out, out);
        csv_preamble(*sink, {{"command", "sweep"}, {"alpha", a.alpha}, {"c", a.coefficient},
                             {"n", sizes}, {"budget", a.budget}});
        write_sweep(*sink, rows);
        return;
    }
    if (a.profile.empty()) throw UsageError("--profile", "required unless --sweep is given");
    const auto profile = read_profile(a.profile);
    const json config{{"command", "anarchy"}, {"profile_path", a.profile},
                      {"profile", to_json(profile)}};
    Sink sink(a.out, out);
    *sink << stamped(to_json(report(profile)), config).dump(2) << '\n';
}

// montecarlo ----------------------------------------------------------------

struct MonteCarloArgs {
    std::string dist = "uniform:1,2";
    bool paper_tables = false;
    std::string sizes = "1e2,1e3,1e4,1e5";
    std::uint64_t seed = 42;
    std::size_t reps = 5;
    double budget = 1.0;
    unsigned threads = 0;
    std::size_t memory_cap = 10'000'000;
    bool summary = false;
    std::string out;
};

std::vector<DistributionSpec> chosen_distributions(const MonteCarloArgs& a) {
    if (a.paper_tables) return published_distributions();
    try {
        return {parse_distribution(a.dist)};
    } catch (const DomainError& e) {
        throw UsageError("--dist", e.what());
    }
}

void write_replications(std::ostream& os, const DistributionSpec& dist,
                        const std::vector<ExperimentRow>& rows) {
    for (const auto& row : rows) {
        for (const auto& r : row.replications) {
            os << row.n << ',' << quoted(to_string(dist)) << ',' << r.replication << ','
               << format_number(r.anarchy_minus_one) << ',' << format_number(r.active_proportion)
               << ',' << row.seed << '\n';
        }
    }
}

void write_summaries(std::ostream& os, const DistributionSpec& dist,
                     const std::vector<ExperimentRow>& rows) {
    for (const auto& row : rows) {
        os << row.n << ',' << quoted(to_string(dist)) << ',' << row.replications.size() << ','
           << format_number(row.anarchy_minus_one.mean) << ','
           << format_number(row.anarchy_minus_one.min) << ','
           << format_number(row.anarchy_minus_one.max) << ','
           << format_number(row.active_proportion.mean) << ','
           << format_number(row.active_proportion.min) << ','
           << format_number(row.active_proportion.max) << ',' << (row.extended ? 1 : 0) << ','
           << row.seed << '\n';
    }
}

void run_montecarlo(const MonteCarloArgs& a, std::ostream& out) {
    if (a.reps < 1) throw UsageError("--reps", "must be at least 1");
    if (!(a.budget > 0.0)) throw UsageError("--budget", "budget must be positive");
    auto sizes = parse_sizes("--n", a.sizes);
    if (!std::is_sorted(sizes.begin(), sizes.end())) throw UsageError("--n", "sizes must be ascending");
    const auto dists = chosen_distributions(a);

    std::vector<std::string> names;
    for (const auto& d : dists) names.push_back(to_string(d));
    const json config{{"command", "montecarlo"}, {"dist", names},       {"n", sizes},
                      {"seed", a.seed},          {"reps", a.reps},      {"budget", a.budget},
                      {"memory_cap", a.memory_cap}, {"summary", a.summary}};

    Sink sink(a.out, out);
    csv_preamble(*sink, config);
    *sink << (a.summary ? "N,dist,reps,mean_anarchy_minus_one,min_anarchy_minus_one,"
                          "max_anarchy_minus_one,mean_active_proportion,min_active_proportion,"
                          "max_active_proportion,extended,seed\n"
                        : "N,dist,rep,anarchy_minus_one,active_proportion,seed\n");
    for (const auto& dist : dists) {
        ExperimentSpec spec;
        spec.distribution = dist;
        spec.sizes = sizes;
        spec.seed = a.seed;
        spec.replications = a.reps;
        spec.budget = a.budget;
        spec.threads = a.threads;
        spec.memory_cap = a.memory_cap;
        const auto rows = run_experiment(spec);
        if (a.summary) {
            write_summaries(*sink, dist, rows);
        } else {
            write_replications(*sink, dist, rows);
        }
    }
}

// learn ---------------------------------------------------------------------

struct LearnArgs {
    std::string profile;
    std::string box = "0.05,2";
    std::size_t horizon = 100'000;
    std::string checkpoints = "log";
    std::optional<double> step_scale;
    std::size_t grid = 256;
    std::string out;
};

void run_learn(const LearnArgs& a, std::ostream& out, std::ostream& err) {
    if (a.horizon < 1) throw UsageError("--t", "horizon must be at least 1");
    const auto profile = read_profile(a.profile);
    auto config = make_learning_config(profile, parse_box("--box", a.box), a.horizon);
    if (a.step_scale) {
        if (!(*a.step_scale > 0.0)) throw UsageError("--eta0", "step scale must be positive");
        config.step_scale = *a.step_scale;
    }
    config.regret_grid = a.grid;
    if (const auto warning = validate(config)) err << "warning: " << *warning << '\n';

    const auto trace = run(config);
    const auto eq = solve_proportional(profile);

    std::vector<std::size_t> points;
    if (a.checkpoints == "all") {
        points.resize(trace.steps);
        std::iota(points.begin(), points.end(), std::size_t{1});
    } else {
        points = log_checkpoints(trace.steps);
    }

    Sink sink(a.out, out);
    csv_preamble(*sink, {{"command", "learn"}, {"profile_path", a.profile},
                         {"profile", to_json(profile)}, {"box", {config.box.lower, config.box.upper}},
                         {"t", a.horizon}, {"eta0", config.step_scale},
                         {"checkpoints", a.checkpoints}, {"grid", a.grid},
                         {"initial", config.initial}});
    *sink << "t,agent,strategy,payoff,avg_strategy,distance_to_eq\n";

    std::vector<double> sum(trace.agents, 0.0);
    auto next = points.begin();
    for (std::size_t t = 1; t <= trace.steps && next != points.end(); ++t) {
        const auto x = trace.strategy_at(t);
        for (std::size_t i = 0; i < trace.agents; ++i) sum[i] += x[i];
        if (t != *next) continue;
        ++next;
        double distance = 0.0;
        for (std::size_t i = 0; i < trace.agents; ++i) {
            distance = std::max(distance, std::abs(sum[i] / static_cast<double>(t) - eq.production[i]));
        }
        const auto u = trace.payoff_at(t);
        for (std::size_t i = 0; i < trace.agents; ++i) {
            *sink << t << ',' << i << ',' << format_number(x[i]) << ',' << format_number(u[i]) << ','
                  << format_number(sum[i] / static_cast<double>(t)) << ',' << format_number(distance)
                  << '\n';
        }
    }
    *sink << "# regret_per_round:";
    for (double r : trace.regret) *sink << ' ' << format_number(r / static_cast<double>(trace.steps));
    *sink << '\n';
}

// reproduce-paper -----------------------------------------------------------

struct ReproduceArgs {
    std::string out_dir = "reproduction";
    std::uint64_t seed = 42;
    std::size_t reps = 5;
    bool extended = false;
    unsigned threads = 0;
};

void run_reproduce(const ReproduceArgs& a, std::ostream& out) {
    namespace fs = std::filesystem;
    const fs::path dir(a.out_dir);
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw UsageError("--out-dir", ec.message());
    const auto open = [&](const char* name) {
        std::ofstream f(dir / name);
        if (!f) throw UsageError("--out-dir", fmt::format("cannot write '{}'", (dir / name).string()));
        return f;
    };
    const json base{{"command", "reproduce-paper"}, {"seed", a.seed}, {"reps", a.reps},
                    {"extended", a.extended}};

    // Identical power costs: A_N -> alpha^(1/alpha), A'_N -> 1, D_N -> 1/alpha.
    {
        const std::vector<double> alphas{1.5, 2.0, 3.0};
        const std::vector<std::size_t> sizes{2, 10, 100, 1000, 10000};
        auto f = open("anarchy_sweep.csv");
        csv_preamble(f, {{"command", "reproduce-paper"}, {"part", "anarchy_sweep"},
                         {"alpha", alphas}, {"c", 1.0}, {"n", sizes}, {"budget", 1.0}});
        f << "alpha,N,sStar,sHat,sBar,A_N,A_N_prime,D_N,limit_A_N\n";
        for (double alpha : alphas) {
            const double limit = asymptotic_targets(alpha).anarchy;
            for (const auto& r : sweep_identical_power(alpha, 1.0, sizes)) {
                f << format_number(alpha) << ',' << r.n << ',' << format_number(r.s_star) << ','
                  << optional_number(r.s_hat) << ',' << format_number(r.s_bar) << ','
                  << format_number(r.anarchy) << ',' << optional_number(r.anarchy_prime) << ','
                  << format_number(r.dissipation) << ',' << format_number(limit) << '\n';
            }
        }
        out << "wrote " << (dir / "anarchy_sweep.csv").string() << '\n';
    }

    // Linear costs with random marginal costs.
    {
        std::vector<std::size_t> sizes{100, 1000, 10000, 100000};
        if (a.extended) {
            sizes.push_back(1'000'000);
            sizes.push_back(10'000'000);
        }
        const auto dists = published_distributions();
        std::vector<std::vector<ExperimentRow>> results;
        for (const auto& dist : dists) {
            ExperimentSpec spec;
            spec.distribution = dist;
            spec.sizes = sizes;
            spec.seed = a.seed;
            spec.replications = a.reps;
            spec.threads = a.threads;
            spec.memory_cap = 100'000;  // larger N use the streaming active set
            results.push_back(run_experiment(spec));
        }
        json config = base;
        config["n"] = sizes;
        std::vector<std::string> names;
        for (const auto& d : dists) names.push_back(to_string(d));
        config["dist"] = names;

        auto raw = open("montecarlo.csv");
        csv_preamble(raw, config);
        raw << "N,dist,rep,anarchy_minus_one,active_proportion,seed\n";
        for (std::size_t d = 0; d < dists.size(); ++d) write_replications(raw, dists[d], results[d]);
        out << "wrote " << (dir / "montecarlo.csv").string() << '\n';

        const auto table = [&](const char* name, auto pick) {
            auto f = open(name);
            csv_preamble(f, config);
            f << "N";
            for (const auto& d : dists) f << ',' << quoted(label(d));
            f << ",extended\n";
            for (std::size_t g = 0; g < sizes.size(); ++g) {
                f << sizes[g];
                for (const auto& rows : results) f << ',' << format_number(pick(rows[g]));
                f << ',' << (results.front()[g].extended ? 1 : 0) << '\n';
            }
            out << "wrote " << (dir / name).string() << '\n';
        };
        table("table1.csv", [](const ExperimentRow& r) { return r.anarchy_minus_one.mean; });
        table("table2.csv", [](const ExperimentRow& r) { return r.active_proportion.mean; });
    }

    // No-regret dynamics on the symmetric quadratic benchmark.
    {
        auto f = open("learning.csv");
        const StrategyBox box{0.05, 2.0};
        const std::size_t horizon = 100'000;
        csv_preamble(f, {{"command", "reproduce-paper"}, {"part", "learning"}, {"c", 1.0},
                         {"alpha", 2.0}, {"budget", 1.0}, {"box", {box.lower, box.upper}},
                         {"t", horizon}});
        f << "agents,t,distance_to_eq,max_regret_per_round\n";
        for (std::size_t n : {2, 3}) {
            const auto profile = CostProfile::identical_power(n, 1.0, 2.0, 1.0);
            const auto trace = run(make_learning_config(profile, box, horizon));
            const auto distances = distance_to_equilibrium(trace, solve_proportional(profile));
            const double regret = *std::max_element(trace.regret.begin(), trace.regret.end());
            f << n << ',' << horizon << ',' << format_number(distances.back().distance) << ','
              << format_number(regret / static_cast<double>(horizon)) << '\n';
        }
        out << "wrote " << (dir / "learning.csv").string() << '\n';
    }
}

}  // namespace

int dispatch(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Compensation schemes, prices of anarchy, and their large-N behaviour"};
    app.name(kToolName);
    app.set_version_flag("--version", kVersion);
    app.require_subcommand(1);

    SolveArgs solve_args;
    auto* solve = app.add_subcommand("solve", "Solve one compensation scheme for a cost profile");
    solve->add_option("--scheme", solve_args.scheme, "Scheme to solve")
        ->required()
        ->check(CLI::IsMember({"normative", "piece-rate", "proportional", "linear-closed-form"}));
    solve->add_option("--profile", solve_args.profile, "Cost profile JSON")->required();
    solve->add_option("--out", solve_args.out, "Result JSON path (default: stdout)");

    AnarchyArgs anarchy_args;
    auto* anarchy = app.add_subcommand("anarchy", "Prices of anarchy and dissipation");
    anarchy->add_option("--profile", anarchy_args.profile, "Cost profile JSON");
    anarchy->add_flag("--sweep", anarchy_args.sweep, "Sweep identical power costs over N");
    anarchy->add_option("--alpha", anarchy_args.alpha, "Cost exponent for --sweep");
    anarchy->add_option("--c", anarchy_args.coefficient, "Cost coefficient for --sweep");
    anarchy->add_option("--n", anarchy_args.sizes, "Comma-separated agent counts for --sweep");
    anarchy->add_option("--budget", anarchy_args.budget, "Budget M for --sweep");
    anarchy->add_option("--out", anarchy_args.out, "Output path (default: stdout)");

    AnarchyArgs sweep_args;
    sweep_args.sweep = true;
    auto* sweep = app.add_subcommand("sweep", "Same as anarchy --sweep");
    sweep->add_option("--alpha", sweep_args.alpha, "Cost exponent");
    sweep->add_option("--c", sweep_args.coefficient, "Cost coefficient");
    sweep->add_option("--n", sweep_args.sizes, "Comma-separated agent counts");
    sweep->add_option("--budget", sweep_args.budget, "Budget M");
    sweep->add_option("--out", sweep_args.out, "CSV path (default: stdout)");

    MonteCarloArgs mc_args;
    auto* mc = app.add_subcommand("montecarlo", "Random linear costs c_i = 1 + xi_i");
    mc->add_option("--dist", mc_args.dist, "uniform:a,b | lognormal:mu,sigma | pareto:shape,scale");
    mc->add_flag("--paper-tables", mc_args.paper_tables, "Run all six published distribution columns");
    mc->add_option("--n", mc_args.sizes, "Comma-separated agent counts (1e3 notation allowed)");
    mc->add_option("--seed", mc_args.seed, "Experiment seed");
    mc->add_option("--reps", mc_args.reps, "Replications per size");
    mc->add_option("--budget", mc_args.budget, "Budget M");
    mc->add_option("--threads", mc_args.threads, "Worker threads (default: PROPCOMP_THREADS or all cores)");
    mc->add_option("--memory-cap", mc_args.memory_cap, "Largest N sampled into memory");
    mc->add_flag("--summary", mc_args.summary, "Emit per-size mean/min/max instead of raw rows");
    mc->add_option("--out", mc_args.out, "CSV path (default: stdout)");

    LearnArgs learn_args;
    double step_scale = 0.0;
    auto* learn = app.add_subcommand("learn", "Projected gradient no-regret dynamics");
    learn->add_option("--profile", learn_args.profile, "Cost profile JSON")->required();
    learn->add_option("--box", learn_args.box, "Strategy interval lower,upper");
    learn->add_option("--t", learn_args.horizon, "Number of rounds");
    learn->add_option("--checkpoints", learn_args.checkpoints, "log | all")
        ->check(CLI::IsMember({"log", "all"}));
    auto* eta = learn->add_option("--eta0", step_scale, "Step scale (default: box upper bound)");
    learn->add_option("--grid", learn_args.grid, "Regret grid size");
    learn->add_option("--out", learn_args.out, "CSV path (default: stdout)");

    ReproduceArgs repro_args;
    auto* repro = app.add_subcommand("reproduce-paper", "Regenerate every published table and limit");
    repro->add_option("--out-dir", repro_args.out_dir, "Output directory");
    repro->add_option("--seed", repro_args.seed, "Monte Carlo seed");
    repro->add_option("--reps", repro_args.reps, "Monte Carlo replications");
    repro->add_flag("--extended", repro_args.extended, "Add N = 1e6 and 1e7 (streaming)");
    repro->add_option("--threads", repro_args.threads, "Worker threads");

    std::vector<const char*> argv{kToolName};
    for (const auto& a : args) argv.push_back(a.c_str());
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kOk : kValidationError;
    }

    try {
        if (*solve) {
            run_solve(solve_args, out);
        } else if (*anarchy) {
            run_anarchy(anarchy_args, out);
        } else if (*sweep) {
            run_anarchy(sweep_args, out);
        } else if (*mc) {
            run_montecarlo(mc_args, out);
        } else if (*learn) {
            if (eta->count() > 0) learn_args.step_scale = step_scale;
            run_learn(learn_args, out, err);
        } else if (*repro) {
            if (repro_args.reps < 1) throw UsageError("--reps", "must be at least 1");
            run_reproduce(repro_args, out);
        }
    } catch (const SolverError& e) {
        err << "solver error: " << e.what() << " (bracket [" << e.lower() << ", " << e.upper()
            << "])\n";
        return kSolverError;
    } catch (const std::logic_error& e) {
        err << "error: " << e.what() << '\n';
        return kValidationError;
    } catch (const nlohmann::json::exception& e) {
        err << "error: " << e.what() << '\n';
        return kValidationError;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return 1;
    }
    return kOk;
}

}  // namespace propcomp::cli
