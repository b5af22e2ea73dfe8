// bootstrap.hpp
// Empirical multi-day CAR distributions generated by resampling
// estimation-period abnormal returns.
//
// Scenario CARs are never stored. A streaming pass counts, for each query
// value supplied up front (normally the observed CAR), how many scenarios
// fall strictly below it and how many tie it; it also tracks the observed
// range. When a histogram is requested a second pass regenerates the same
// scenarios (the generator is counter-based) and bins them over that range.
//
// Scenario i draws its randomness from Philox4x32-10 with counter
// (i, block) and a key derived from the seed, so the result is a pure
// function of (pool, spec): worker count and kernel choice never change any
// count.

#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "evstudy/kernels.hpp"

namespace evstudy {

inline constexpr std::uint64_t kDefaultScenarios = 5'000'000;
inline constexpr std::uint32_t kDefaultHistogramBins = 200;
inline constexpr std::string_view kGeneratorName = "philox4x32-10";

struct ScenarioSpec {
    std::uint32_t draws_k = 2;
    std::uint64_t n_scenarios = kDefaultScenarios;
    std::uint64_t seed = 0;
    DrawMode mode = DrawMode::iid;
    std::uint32_t histogram_bins = kDefaultHistogramBins;  // 0 skips the histogram pass
};

// True for the draw counts of the five standard event windows.
bool is_standard_draw_count(std::uint32_t k) noexcept;

struct ExecutionPolicy {
    unsigned workers = 0;            // 0 = hardware concurrency
    std::optional<kernels::Isa> isa;  // unset = best available
    std::uint64_t chunk = 4096;       // scenarios per kernel call
};

struct Histogram {
    double low = 0.0;
    double high = 0.0;
    std::vector<std::uint64_t> counts;

    std::size_t bins() const noexcept { return counts.size(); }
    double bin_low(std::size_t i) const noexcept;
    double bin_high(std::size_t i) const noexcept;
    // Index of the bin holding v; v outside [low, high] is clamped.
    std::size_t bin_of(double v) const noexcept;

    bool operator==(const Histogram&) const = default;
};

struct QueryCount {
    double value = 0.0;
    std::uint64_t below = 0;
    std::uint64_t equal = 0;

    bool operator==(const QueryCount&) const = default;
};

class ScenarioDistribution {
public:
    ScenarioDistribution() = default;
    ScenarioDistribution(std::uint64_t n, double min, double max, std::vector<QueryCount> queries,
                         std::optional<Histogram> histogram, kernels::Isa isa);

    std::uint64_t n() const noexcept { return n_; }
    double min() const noexcept { return min_; }
    double max() const noexcept { return max_; }

    // Exact for any v outside [min, max] and for every tracked query value.
    // Throws std::out_of_range for an untracked v inside the range.
    std::uint64_t count_below(double v) const;
    std::uint64_t count_equal(double v) const;

    const std::vector<QueryCount>& queries() const noexcept { return queries_; }
    const std::optional<Histogram>& histogram() const noexcept { return histogram_; }
    kernels::Isa isa() const noexcept { return isa_; }

    // Kernel identity is not compared.
    bool operator==(const ScenarioDistribution& other) const noexcept {
        return n_ == other.n_ && min_ == other.min_ && max_ == other.max_ && queries_ == other.queries_ &&
               histogram_ == other.histogram_;
    }

private:
    const QueryCount* find(double v) const noexcept;

    std::uint64_t n_ = 0;
    double min_ = 0.0;
    double max_ = 0.0;
    std::vector<QueryCount> queries_;
    std::optional<Histogram> histogram_;
    kernels::Isa isa_ = kernels::Isa::scalar;
};

// CAR = prod(1 + AR) - 1. Throws std::invalid_argument("empty window") on
// empty input and for any AR <= -1.
double cumulative_abnormal_return(std::span<const double> ars);

// Sum of ARs, the additive counterpart.
double additive_cumulative_return(std::span<const double> ars);

ScenarioDistribution generate_distribution(std::span<const double> pool, const ScenarioSpec& spec,
                                           std::span<const double> queries = {},
                                           const ExecutionPolicy& policy = {});

// 100 * (below + equal / 2) / n, midrank tie convention.
double percentile_of(const ScenarioDistribution& dist, double v);

}  // namespace evstudy
