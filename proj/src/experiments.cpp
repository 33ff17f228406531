#include "propcomp/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdlib>
#include <exception>
#include <mutex>
#include <numeric>
#include <queue>
#include <thread>

#include <fmt/core.h>

#include "propcomp/anarchy.hpp"
#include "propcomp/errors.hpp"
#include "propcomp/schemes.hpp"

namespace propcomp {

namespace {

template <class... Ts>
struct overloaded : Ts... {
    using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

constexpr std::size_t kMinPrefix = 1024;

double parse_number(const std::string& text) {
    std::size_t used = 0;
    double v = 0.0;
    try {
        v = std::stod(text, &used);
    } catch (const std::exception&) {
        throw DomainError(fmt::format("'{}' is not a number", text));
    }
    if (used != text.size()) throw DomainError(fmt::format("'{}' is not a number", text));
    return v;
}

ActiveSetSummary summarize(std::span<const double> sorted_prefix, std::size_t n, double cost_sum,
                           double budget, bool full_sort) {
    const auto active = linear_active_set(sorted_prefix, budget);
    const double s_star = budget / sorted_prefix[0];
    return {active.count, active.total,  s_star / active.total, sorted_prefix[0],
            sorted_prefix[1], cost_sum, full_sort || n == sorted_prefix.size()};
}

SampleSummary summarize_samples(const std::vector<double>& values) {
    SampleSummary s{0.0, values.front(), values.front()};
    for (double v : values) {
        s.mean += v;
        s.min = std::min(s.min, v);
        s.max = std::max(s.max, v);
    }
    s.mean /= static_cast<double>(values.size());
    return s;
}

}  // namespace

void validate(const DistributionSpec& dist) {
    std::visit(overloaded{
                   [](const UniformDist& u) {
                       if (!(u.lower < u.upper) || !std::isfinite(u.lower) || !std::isfinite(u.upper)) {
                           throw DomainError(fmt::format("uniform bounds {} >= {}", u.lower, u.upper));
                       }
                       if (!(u.lower > -1.0)) throw DomainError("uniform support must keep costs positive");
                   },
                   [](const LogNormalDist& l) {
                       if (!(l.sigma > 0.0) || !std::isfinite(l.mu)) {
                           throw DomainError(fmt::format("lognormal sigma {} is not positive", l.sigma));
                       }
                   },
                   [](const ParetoDist& p) {
                       if (!(p.shape > 0.0) || !(p.scale > 0.0)) {
                           throw DomainError(fmt::format("pareto parameters ({}, {}) must be positive",
                                                         p.shape, p.scale));
                       }
                   },
                   [](const DegenerateDist& d) {
                       if (!(d.value > -1.0)) throw DomainError("degenerate value must keep costs positive");
                   },
               },
               dist);
}

DistributionSpec parse_distribution(const std::string& text) {
    const auto colon = text.find(':');
    if (colon == std::string::npos) {
        throw DomainError(fmt::format("distribution '{}' must look like name:p1,p2", text));
    }
    const std::string name = text.substr(0, colon);
    std::vector<double> params;
    std::size_t start = colon + 1;
    while (start <= text.size()) {
        const auto comma = text.find(',', start);
        const auto end = comma == std::string::npos ? text.size() : comma;
        params.push_back(parse_number(text.substr(start, end - start)));
        if (comma == std::string::npos) break;
        start = comma + 1;
    }
    const auto expect = [&](std::size_t count) {
        if (params.size() != count) {
            throw DomainError(fmt::format("distribution '{}' takes {} parameters", name, count));
        }
    };
    DistributionSpec dist;
    if (name == "uniform") {
        expect(2);
        dist = UniformDist{params[0], params[1]};
    } else if (name == "lognormal") {
        expect(2);
        dist = LogNormalDist{params[0], params[1]};
    } else if (name == "pareto") {
        expect(2);
        dist = ParetoDist{params[0], params[1]};
    } else if (name == "degenerate") {
        expect(1);
        dist = DegenerateDist{params[0]};
    } else {
        throw DomainError(fmt::format("unknown distribution '{}'", name));
    }
    validate(dist);
    return dist;
}

std::string to_string(const DistributionSpec& dist) {
    return std::visit(overloaded{
                          [](const UniformDist& u) { return fmt::format("uniform:{},{}", u.lower, u.upper); },
                          [](const LogNormalDist& l) { return fmt::format("lognormal:{},{}", l.mu, l.sigma); },
                          [](const ParetoDist& p) { return fmt::format("pareto:{},{}", p.shape, p.scale); },
                          [](const DegenerateDist& d) { return fmt::format("degenerate:{}", d.value); },
                      },
                      dist);
}

std::string label(const DistributionSpec& dist) {
    return std::visit(overloaded{
                          [](const UniformDist& u) { return fmt::format("U({},{})", u.lower, u.upper); },
                          [](const LogNormalDist& l) { return fmt::format("LN({},{})", l.mu, l.sigma); },
                          [](const ParetoDist& p) { return fmt::format("Pa({},{})", p.shape, p.scale); },
                          [](const DegenerateDist& d) { return fmt::format("D({})", d.value); },
                      },
                      dist);
}

std::vector<DistributionSpec> published_distributions() {
    return {UniformDist{1.0, 2.0},  UniformDist{1.0, 10.0}, LogNormalDist{0.0, 1.0},
            LogNormalDist{0.0, 2.0}, ParetoDist{0.5, 1.0},   ParetoDist{3.0, 1.0}};
}

double pareto_from_uniform(const ParetoDist& dist, double u) {
    return dist.scale * (std::pow(u, -1.0 / dist.shape) - 1.0);
}

double sample_xi(const DistributionSpec& dist, const Substream& stream, std::uint64_t draw) {
    return std::visit(
        overloaded{
            [&](const UniformDist& u) { return u.lower + (u.upper - u.lower) * stream.uniform(draw); },
            [&](const LogNormalDist& l) { return std::exp(l.mu + l.sigma * stream.normal(draw)); },
            [&](const ParetoDist& p) { return pareto_from_uniform(p, stream.uniform(draw)); },
            [](const DegenerateDist& d) { return d.value; },
        },
        dist);
}

std::vector<double> sample_costs(const DistributionSpec& dist, std::size_t n,
                                 const Substream& stream) {
    std::vector<double> costs(n);
    for (std::size_t i = 0; i < n; ++i) costs[i] = 1.0 + sample_xi(dist, stream, i);
    return costs;
}

ActiveSetSummary full_sort_active_set(std::vector<double> costs, double budget) {
    if (costs.size() < 2) throw PreconditionError("active set needs at least two agents");
    const double sum = std::accumulate(costs.begin(), costs.end(), 0.0);
    std::sort(costs.begin(), costs.end());
    return summarize(costs, costs.size(), sum, budget, true);
}

ActiveSetSummary streaming_active_set(std::size_t n,
                                      const std::function<double(std::size_t)>& cost_at,
                                      double budget, std::size_t expected_active) {
    if (n < 2) throw PreconditionError("active set needs at least two agents");
    std::size_t k = std::max(kMinPrefix, 2 * expected_active);

    while (k < n) {
        std::priority_queue<double> largest_kept;  // max-heap of the k smallest costs
        double sum = 0.0;
        for (std::size_t i = 0; i < n; ++i) {
            const double c = cost_at(i);
            sum += c;
            if (largest_kept.size() < k) {
                largest_kept.push(c);
            } else if (c < largest_kept.top()) {
                largest_kept.pop();
                largest_kept.push(c);
            }
        }
        std::vector<double> prefix(largest_kept.size());
        for (auto it = prefix.rbegin(); it != prefix.rend(); ++it) {
            *it = largest_kept.top();
            largest_kept.pop();
        }
        const auto active = linear_active_set(prefix, budget);
        if (active.count < k) return summarize(prefix, n, sum, budget, false);
        k *= 2;
    }

    std::vector<double> costs(n);
    for (std::size_t i = 0; i < n; ++i) costs[i] = cost_at(i);
    return full_sort_active_set(std::move(costs), budget);
}

unsigned default_thread_count() {
    if (const char* env = std::getenv("PROPCOMP_THREADS")) {
        const long v = std::strtol(env, nullptr, 10);
        if (v > 0) return static_cast<unsigned>(v);
    }
    return std::max(1u, std::thread::hardware_concurrency());
}

std::vector<ExperimentRow> run_experiment(const ExperimentSpec& spec) {
    validate(spec.distribution);
    if (spec.replications < 1) throw PreconditionError("experiment needs at least one replication");
    if (spec.sizes.empty()) throw PreconditionError("experiment needs at least one size");
    if (!std::is_sorted(spec.sizes.begin(), spec.sizes.end())) {
        throw PreconditionError("experiment sizes must be ascending");
    }
    if (spec.sizes.front() < 2) throw PreconditionError("experiment sizes must be at least 2");
    if (!(spec.budget > 0.0)) throw DomainError("budget must be positive");

    const std::size_t reps = spec.replications;
    const std::size_t tasks = spec.sizes.size() * reps;
    std::vector<ReplicationResult> results(tasks);

    const auto run_task = [&](std::size_t task) {
        const std::size_t grid = task / reps;
        const std::size_t rep = task % reps;
        const std::size_t n = spec.sizes[grid];
        const Substream stream({spec.seed, static_cast<std::uint32_t>(grid),
                                static_cast<std::uint32_t>(rep)});
        ActiveSetSummary summary;
        bool streamed = false;
        if (n <= spec.memory_cap) {
            summary = full_sort_active_set(sample_costs(spec.distribution, n, stream), spec.budget);
        } else {
            streamed = true;
            summary = streaming_active_set(
                n, [&](std::size_t i) { return 1.0 + sample_xi(spec.distribution, stream, i); },
                spec.budget);
        }
        const auto bounds = check_bounds_linear(summary.min_cost, summary.second_cost,
                                                summary.cost_sum, n, summary.anarchy);
        const bool ok = std::all_of(bounds.begin(), bounds.end(), [](const auto& b) { return b.second; });
        results[task] = {rep, summary.anarchy - 1.0,
                         static_cast<double>(summary.active_count) / static_cast<double>(n),
                         summary.active_count, ok, streamed};
    };

    const unsigned threads =
        std::min<std::size_t>(spec.threads ? spec.threads : default_thread_count(), tasks);
    if (threads <= 1) {
        for (std::size_t t = 0; t < tasks; ++t) run_task(t);
    } else {
        std::atomic<std::size_t> next{0};
        std::exception_ptr failure;
        std::mutex failure_mutex;
        {
            std::vector<std::jthread> pool;
            for (unsigned w = 0; w < threads; ++w) {
                pool.emplace_back([&] {
                    for (std::size_t t = next++; t < tasks; t = next++) {
                        try {
                            run_task(t);
                        } catch (...) {
                            std::lock_guard lock(failure_mutex);
                            if (!failure) failure = std::current_exception();
                        }
                    }
                });
            }
        }
        if (failure) std::rethrow_exception(failure);
    }

    std::vector<ExperimentRow> rows;
    for (std::size_t grid = 0; grid < spec.sizes.size(); ++grid) {
        ExperimentRow row;
        row.n = spec.sizes[grid];
        row.seed = spec.seed;
        row.extended = row.n > spec.extended_above;
        row.replications.assign(results.begin() + static_cast<std::ptrdiff_t>(grid * reps),
                                results.begin() + static_cast<std::ptrdiff_t>((grid + 1) * reps));
        std::vector<double> gaps;
        std::vector<double> proportions;
        for (const auto& r : row.replications) {
            gaps.push_back(r.anarchy_minus_one);
            proportions.push_back(r.active_proportion);
        }
        row.anarchy_minus_one = summarize_samples(gaps);
        row.active_proportion = summarize_samples(proportions);
        rows.push_back(std::move(row));
    }
    return rows;
}

}  // namespace propcomp
