#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <string>
#include <variant>
#include <vector>

#include "propcomp/rng.hpp"

namespace propcomp {

/// xi ~ U(lower, upper).
struct UniformDist {
    double lower;
    double upper;
};

/// xi = exp(mu + sigma * eta), eta standard normal. `sigma` is the standard
/// deviation of log xi.
struct LogNormalDist {
    double mu;
    double sigma;
};

/// Lomax form: density shape * scale^shape / (scale + x)^(shape + 1), x > 0.
struct ParetoDist {
    double shape;
    double scale;
};

/// xi = value with probability one. Test fixture for identical costs.
struct DegenerateDist {
    double value;
};

using DistributionSpec = std::variant<UniformDist, LogNormalDist, ParetoDist, DegenerateDist>;

/// Throws DomainError if parameters are outside their domains.
void validate(const DistributionSpec& dist);

/// "uniform:1,2", "lognormal:0,1", "pareto:3,1", "degenerate:0".
DistributionSpec parse_distribution(const std::string& text);
std::string to_string(const DistributionSpec& dist);
/// Column label in the style U(1,2), LN(0,1), Pa(3,1).
std::string label(const DistributionSpec& dist);

/// The six distribution columns of the published tables.
std::vector<DistributionSpec> published_distributions();

/// Inverse of the survival function (scale / (scale + x))^shape at u in (0, 1].
double pareto_from_uniform(const ParetoDist& dist, double u);

/// One draw of xi from the given substream (draw index d uses Philox block d).
double sample_xi(const DistributionSpec& dist, const Substream& stream, std::uint64_t draw);

/// c_i = 1 + xi_i, i = 0..n-1, from the substream.
std::vector<double> sample_costs(const DistributionSpec& dist, std::size_t n,
                                 const Substream& stream);

struct ExperimentSpec {
    DistributionSpec distribution = UniformDist{1.0, 2.0};
    std::vector<std::size_t> sizes;   // ascending, each >= 2
    std::uint64_t seed = 42;
    std::size_t replications = 5;
    double budget = 1.0;
    /// Largest N sampled into memory; larger N go through streaming_active_set.
    std::size_t memory_cap = 10'000'000;
    /// Sizes above this are reported as extended rows.
    std::size_t extended_above = 100'000;
    /// 0: PROPCOMP_THREADS or hardware concurrency.
    unsigned threads = 0;
};

struct ReplicationResult {
    std::size_t replication;
    double anarchy_minus_one;
    double active_proportion;
    std::size_t active_count;
    bool bounds_hold;
    bool streamed;
};

struct SampleSummary {
    double mean;
    double min;
    double max;
};

struct ExperimentRow {
    std::size_t n;
    SampleSummary anarchy_minus_one;
    SampleSummary active_proportion;
    std::uint64_t seed;
    bool extended;
    std::vector<ReplicationResult> replications;
};

/// Samples linear costs c_i = 1 + xi_i for each size and replication and
/// records A_N - 1 and l / N. Replications run in parallel; results are
/// identical for any thread count.
std::vector<ExperimentRow> run_experiment(const ExperimentSpec& spec);

struct ActiveSetSummary {
    std::size_t active_count;  // l
    double total;              // equilibrium aggregate output
    double anarchy;            // A_N = s* / s_bar
    double min_cost;           // c_1
    double second_cost;        // c_2
    double cost_sum;           // sum over all agents
    bool full_sort;            // fallback path taken
};

/// Reference path: sorts all costs.
ActiveSetSummary full_sort_active_set(std::vector<double> costs, double budget);

/**
 * Active-set computation without sorting all N costs. Keeps the k smallest
 * costs seen in one pass over cost_at(0..n-1) with k = max(1024,
 * 2 * expected_active), runs the active-set scan on them, and doubles k when
 * the scan runs off the end of the prefix. Falls back to a full sort once
 * k reaches n. The result equals full_sort_active_set bit for bit.
 */
ActiveSetSummary streaming_active_set(std::size_t n,
                                      const std::function<double(std::size_t)>& cost_at,
                                      double budget, std::size_t expected_active = 0);

/// Thread count from PROPCOMP_THREADS, else hardware concurrency (at least 1).
unsigned default_thread_count();

}  // namespace propcomp
