#include "evstudy/bootstrap.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <thread>

#include <fmt/format.h>

#include "evstudy/philox.hpp"

namespace evstudy {
namespace {

struct Tally {
    double min = std::numeric_limits<double>::infinity();
    double max = -std::numeric_limits<double>::infinity();
    std::vector<std::uint64_t> below;
    std::vector<std::uint64_t> equal;
};

struct Range {
    std::uint64_t first;
    std::uint64_t last;
};

std::vector<Range> partition(std::uint64_t n, const ExecutionPolicy& policy) {
    unsigned workers = policy.workers != 0 ? policy.workers : std::max(1u, std::thread::hardware_concurrency());
    const std::uint64_t chunk = std::max<std::uint64_t>(policy.chunk, 1);
    const std::uint64_t chunks = (n + chunk - 1) / chunk;
    workers = static_cast<unsigned>(std::clamp<std::uint64_t>(workers, 1, chunks));

    std::vector<Range> ranges;
    std::uint64_t start = 0;
    for (unsigned w = 0; w < workers; ++w) {
        // whole chunks per worker, remainder spread over the first workers
        const std::uint64_t share = chunks / workers + (w < chunks % workers ? 1 : 0);
        const std::uint64_t stop = std::min(n, start + share * chunk);
        ranges.push_back({start, stop});
        start = stop;
    }
    return ranges;
}

template <typename Work>
void run_workers(const std::vector<Range>& ranges, Work&& work) {
    if (ranges.size() == 1) {
        work(0, ranges[0]);
        return;
    }
    std::vector<std::jthread> threads;
    threads.reserve(ranges.size());
    for (std::size_t w = 0; w < ranges.size(); ++w) threads.emplace_back([&, w] { work(w, ranges[w]); });
}

}  // namespace

bool is_standard_draw_count(std::uint32_t k) noexcept {
    return k == 2 || k == 3 || k == 5 || k == 7 || k == 12;
}

double Histogram::bin_low(std::size_t i) const noexcept {
    return low + (high - low) * static_cast<double>(i) / static_cast<double>(counts.size());
}

double Histogram::bin_high(std::size_t i) const noexcept {
    return i + 1 >= counts.size() ? high : bin_low(i + 1);
}

std::size_t Histogram::bin_of(double v) const noexcept {
    const auto bins = counts.size();
    if (bins <= 1 || !(high > low)) return 0;
    const double pos = (v - low) / (high - low) * static_cast<double>(bins);
    if (!(pos > 0.0)) return 0;
    const auto idx = static_cast<std::size_t>(pos);
    return std::min(idx, bins - 1);
}

ScenarioDistribution::ScenarioDistribution(std::uint64_t n, double min, double max, std::vector<QueryCount> queries,
                                           std::optional<Histogram> histogram, kernels::Isa isa)
    : n_(n), min_(min), max_(max), queries_(std::move(queries)), histogram_(std::move(histogram)), isa_(isa) {}

const QueryCount* ScenarioDistribution::find(double v) const noexcept {
    for (const auto& q : queries_)
        if (q.value == v) return &q;
    return nullptr;
}

std::uint64_t ScenarioDistribution::count_below(double v) const {
    if (n_ == 0 || v <= min_) return 0;
    if (v > max_) return n_;
    if (const auto* q = find(v)) return q->below;
    throw std::out_of_range(fmt::format("count_below({}) is not a tracked query value", v));
}

std::uint64_t ScenarioDistribution::count_equal(double v) const {
    if (n_ == 0 || v < min_ || v > max_) return 0;
    if (min_ == max_) return n_;
    if (const auto* q = find(v)) return q->equal;
    throw std::out_of_range(fmt::format("count_equal({}) is not a tracked query value", v));
}

double cumulative_abnormal_return(std::span<const double> ars) {
    if (ars.empty()) throw std::invalid_argument("empty window");
    double product = 1.0;
    for (const double ar : ars) {
        if (!(ar > -1.0)) throw std::invalid_argument(fmt::format("abnormal return {} is not > -1", ar));
        product *= 1.0 + ar;
    }
    return product - 1.0;
}

double additive_cumulative_return(std::span<const double> ars) {
    if (ars.empty()) throw std::invalid_argument("empty window");
    double sum = 0.0;
    for (const double ar : ars) sum += ar;
    return sum;
}

ScenarioDistribution generate_distribution(std::span<const double> pool, const ScenarioSpec& spec,
                                           std::span<const double> queries, const ExecutionPolicy& policy) {
    if (spec.n_scenarios == 0) throw std::invalid_argument("n_scenarios must be >= 1");
    if (spec.draws_k == 0) throw std::invalid_argument("draws_k must be >= 1");
    if (pool.empty()) throw std::invalid_argument("empty abnormal-return pool");
    if (pool.size() > static_cast<std::size_t>(std::numeric_limits<std::int32_t>::max()))
        throw std::invalid_argument("abnormal-return pool too large");
    if (spec.mode == DrawMode::block && pool.size() < spec.draws_k)
        throw std::invalid_argument(fmt::format("pool of {} returns too short for block draws of {}", pool.size(),
                                                spec.draws_k));

    std::vector<double> growth(pool.size());
    for (std::size_t i = 0; i < pool.size(); ++i) {
        if (!(pool[i] > -1.0) || !std::isfinite(pool[i]))
            throw std::invalid_argument(fmt::format("pool element {} = {} is not a valid return", i, pool[i]));
        growth[i] = 1.0 + pool[i];
    }

    const auto isa = policy.isa.value_or(kernels::best_isa());
    const auto fill = kernels::select(isa);
    const kernels::ScenarioKernelArgs args{growth.data(), static_cast<std::uint32_t>(growth.size()), spec.draws_k,
                                           spec.mode, mix64(spec.seed)};

    const auto ranges = partition(spec.n_scenarios, policy);
    const std::uint64_t chunk = std::max<std::uint64_t>(policy.chunk, 1);
    const std::vector<double> query_values(queries.begin(), queries.end());

    std::vector<Tally> tallies(ranges.size());
    run_workers(ranges, [&](std::size_t w, Range r) {
        Tally& t = tallies[w];
        t.below.assign(query_values.size(), 0);
        t.equal.assign(query_values.size(), 0);
        std::vector<double> cars(chunk);
        for (std::uint64_t s = r.first; s < r.last; s += chunk) {
            const auto len = static_cast<std::size_t>(std::min(chunk, r.last - s));
            std::span<double> out(cars.data(), len);
            fill(args, s, out);
            for (const double c : out) {
                t.min = std::min(t.min, c);
                t.max = std::max(t.max, c);
            }
            for (std::size_t q = 0; q < query_values.size(); ++q) {
                const double v = query_values[q];
                std::uint64_t below = 0, equal = 0;
                for (const double c : out) {
                    below += c < v;
                    equal += c == v;
                }
                t.below[q] += below;
                t.equal[q] += equal;
            }
        }
    });

    Tally total;
    total.below.assign(query_values.size(), 0);
    total.equal.assign(query_values.size(), 0);
    for (const auto& t : tallies) {
        total.min = std::min(total.min, t.min);
        total.max = std::max(total.max, t.max);
        for (std::size_t q = 0; q < query_values.size(); ++q) {
            total.below[q] += t.below[q];
            total.equal[q] += t.equal[q];
        }
    }
    std::vector<QueryCount> counts;
    counts.reserve(query_values.size());
    for (std::size_t q = 0; q < query_values.size(); ++q)
        counts.push_back({query_values[q], total.below[q], total.equal[q]});

    std::optional<Histogram> histogram;
    if (spec.histogram_bins > 0) {
        Histogram h;
        h.low = total.min;
        h.high = total.max;
        const std::size_t bins = total.min == total.max ? 1 : spec.histogram_bins;
        std::vector<std::vector<std::uint64_t>> partial(ranges.size(), std::vector<std::uint64_t>(bins, 0));
        h.counts.assign(bins, 0);
        run_workers(ranges, [&](std::size_t w, Range r) {
            auto& local = partial[w];
            std::vector<double> cars(chunk);
            for (std::uint64_t s = r.first; s < r.last; s += chunk) {
                const auto len = static_cast<std::size_t>(std::min(chunk, r.last - s));
                std::span<double> out(cars.data(), len);
                fill(args, s, out);
                for (const double c : out) ++local[h.bin_of(c)];
            }
        });
        for (const auto& local : partial)
            for (std::size_t b = 0; b < bins; ++b) h.counts[b] += local[b];
        histogram = std::move(h);
    }

    return ScenarioDistribution(spec.n_scenarios, total.min, total.max, std::move(counts), std::move(histogram), isa);
}

double percentile_of(const ScenarioDistribution& dist, double v) {
    if (dist.n() == 0) throw std::invalid_argument("percentile of an empty distribution");
    const auto twice_rank = 2 * dist.count_below(v) + dist.count_equal(v);
    return 50.0 * static_cast<double>(twice_rank) / static_cast<double>(dist.n());
}

}  // namespace evstudy
